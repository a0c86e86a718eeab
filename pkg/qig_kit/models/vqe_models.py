from typing import Literal

from pydantic import BaseModel, Field, PositiveFloat

from qig_kit.geometry.hea import CircuitSpec
from qig_kit.vqe.hamiltonians import BUILTIN, PauliSumHamiltonian
from qig_kit.vqe.natgrad import OptimizerConfig

Method = Literal["euclidean", "natgrad"]


class RunConfig(BaseModel):
    circuit: CircuitSpec = CircuitSpec(depth=2)
    hamiltonian: str | PauliSumHamiltonian = "toy"
    optimizer: OptimizerConfig = OptimizerConfig(metric_source="pure")
    steps: dict[Method, PositiveFloat] = Field(
        default_factory=lambda: {"euclidean": 0.1, "natgrad": 1.5},
        description="per-method step sizes overriding optimizer.step; the natgrad step is measured in the metric",
    )
    max_iters: int = Field(400, ge=0)
    seed: int = 42

    def optimizer_for(self, method: Method | None = None) -> OptimizerConfig:
        method = method or self.optimizer.method
        return self.optimizer.model_copy(update={"method": method, "step": self.steps.get(method, self.optimizer.step)})

    def resolve_hamiltonian(self) -> PauliSumHamiltonian:
        if isinstance(self.hamiltonian, PauliSumHamiltonian):
            return self.hamiltonian
        try:
            return BUILTIN[self.hamiltonian]()
        except KeyError:
            raise ValueError(f"unknown Hamiltonian '{self.hamiltonian}', expected one of {sorted(BUILTIN)}") from None


class RunSummary(BaseModel):
    method: str
    hamiltonian: str
    E_star: float
    final_energy: float
    final_error: float
    auc: float
    hit95: int | None
    iterations: int
    accepted: int
    params: list[float]
