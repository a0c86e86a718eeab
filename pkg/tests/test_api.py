import pytest
from fastapi.testclient import TestClient

from qig_kit.main import app

client = TestClient(app)
API = "/api/v1"


class TestRoot:
    def test_welcome(self):
        response = client.get("/")
        assert response.status_code == 200
        assert "qig-kit" in response.json()["message"]


class TestGeometryRoutes:
    def test_point(self):
        response = client.post(f"{API}/geometry/point", json={"h": 1e-3})
        assert response.status_code == 200
        body = response.json()
        assert body["rank"] == 2
        assert body["concurrence"] == pytest.approx(0.344214, abs=1e-6)
        assert body["curvature"]["R"] == pytest.approx(2.0, abs=1e-3)

    def test_point_bad_theta(self):
        response = client.post(f"{API}/geometry/point", json={"theta": [0.1, 0.2]})
        assert response.status_code == 400
        assert "4 parameters" in response.json()["detail"]

    def test_point_unknown_metric(self):
        response = client.post(f"{API}/geometry/point", json={"metric": "nope"})
        assert response.status_code == 400

    def test_kskd(self):
        assert client.get(f"{API}/geometry/kskd", params={"C": 0.0}).json()["kskd"] == pytest.approx(10.0)
        assert client.get(f"{API}/geometry/kskd", params={"C": 1.0}).status_code == 400

    def test_calibrate_strict(self):
        response = client.post(f"{API}/geometry/calibrate", json={"strict": True})
        assert response.status_code == 400

    def test_settings(self):
        assert client.get(f"{API}/geometry/settings").json()["metric"] == "sld"


class TestScanRoutes:
    def test_slice_summary(self):
        cfg = {"pairs": [[0, 1]], "grid": 3, "half_width": 0.1, "centers": [[1.755, 1.720, 5.417, 4.126]]}
        response = client.post(f"{API}/scans/slice", json=cfg, params={"include_rows": True})
        assert response.status_code == 200
        body = response.json()
        assert body["summary"]["attempted"] == 9
        assert len(body["rows"]) == body["summary"]["valid"]

    def test_slice_validation(self):
        response = client.post(f"{API}/scans/slice", json={"grid": 2})
        assert response.status_code == 422

    def test_noise_single_level(self):
        payload = {"levels": [{"channel": "depolarizing", "level": 0.05}], "h": 1e-3}
        rows = client.post(f"{API}/scans/noise", json=payload).json()["rows"]
        assert [r["label"] for r in rows] == ["noiseless", "depolarizing p=0.05"]


class TestVqeRoutes:
    def test_hamiltonians(self):
        names = {h["name"] for h in client.get(f"{API}/vqe/hamiltonians").json()}
        assert names == {"toy", "h2"}

    def test_run(self):
        response = client.post(f"{API}/vqe/run", json={"max_iters": 3}, params={"include_trace": True})
        assert response.status_code == 200
        assert len(response.json()["trace"]) == 4

    def test_unknown_hamiltonian(self):
        response = client.post(f"{API}/vqe/run", json={"hamiltonian": "lih", "max_iters": 1})
        assert response.status_code == 400
