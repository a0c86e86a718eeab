from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from qig_kit.core.config import Guards
from qig_kit.core.errors import BoundaryError, DomainError
from qig_kit.geometry.hea import HEA1, BlochJet, CircuitSpec, circuit_jet
from qig_kit.geometry.linops import ComplexArray, FloatArray
from qig_kit.geometry.petz import CHANNELS, SLD, OperatorMonotoneSpec, channel_tensor, get_spec, qfim_eigenbasis_oracle
from qig_kit.geometry.sldcore import sld_qfim_from_jet

Route = Literal["bloch", "oracle", "sld"]


@dataclass(frozen=True)
class MetricSource:
    """Reduced-state Petz tensor F(theta) of a circuit, optionally behind a noise channel."""

    metric: OperatorMonotoneSpec = SLD
    circuit: CircuitSpec = HEA1
    channel: Callable[[ComplexArray], ComplexArray] | None = field(default=None, compare=False)
    channels: tuple[str, ...] = CHANNELS
    route: Route = "bloch"
    sld_tau: float = 1e-14

    @classmethod
    def named(cls, metric: str = "sld", guards: Guards | None = None, **kwargs) -> "MetricSource":
        if guards is not None:
            kwargs.setdefault("sld_tau", guards.sld_delta_min)
        return cls(metric=get_spec(metric), **kwargs)

    @property
    def n_params(self) -> int:
        return self.circuit.n_params

    def jet(self, theta) -> BlochJet:
        return circuit_jet(self.circuit, theta, self.channel)

    def tensor(self, theta) -> FloatArray:
        jet = self.jet(theta)
        if jet.state.delta <= 0.0:
            raise BoundaryError("pure-reduction stratum: det rho_A <= 0")
        if self.route == "bloch":
            return channel_tensor(self.metric, jet.x, jet.z, jet.dx, jet.dz, jet.dC, self.channels)
        if self.channels != CHANNELS:
            raise DomainError("channel masks are only available on the bloch route")
        if self.route == "oracle":
            return qfim_eigenbasis_oracle(self.metric, jet.state.rho(), jet.drho())
        if self.metric.name != SLD.name:
            raise DomainError("the closed-form SLD route only serves the SLD metric")
        return sld_qfim_from_jet(jet, self.sld_tau)

    def __call__(self, theta) -> FloatArray:
        return self.tensor(np.asarray(theta, dtype=np.float64))
