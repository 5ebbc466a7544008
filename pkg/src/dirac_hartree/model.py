from __future__ import annotations

from dataclasses import asdict, dataclass

from .dirac import DiracParams
from .hartree import HartreeParams


@dataclass(frozen=True)
class ModelParams:
    """Mass, screening, density form and coupling sign of the Dirac-Hartree model."""

    m: float = 1.0
    b: float = 1.0
    density_form: str = "gamma0"
    coupling_sign: int = -1

    def __post_init__(self):
        # validation lives in the component parameter types
        self.dirac
        self.hartree

    @property
    def dirac(self) -> DiracParams:
        return DiracParams(self.m)

    @property
    def hartree(self) -> HartreeParams:
        return HartreeParams(self.b, self.density_form, self.coupling_sign)

    @property
    def linear(self) -> bool:
        return self.coupling_sign == 0

    def to_dict(self) -> dict:
        return asdict(self)
