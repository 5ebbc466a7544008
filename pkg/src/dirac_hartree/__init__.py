"""Pseudospectral solver and estimate verifiers for the 2D Dirac equation with Hartree nonlinearity."""

from .dirac import DiracParams, FreePropagator, propagator_step
from .evolution import EvolutionConfig, evolve, picard_solve, strang_step
from .hartree import HartreeParams, hartree_potential
from .model import ModelParams
from .spectral import ScalarField, SpectralGrid, SpinorField

__all__ = [
    "DiracParams",
    "EvolutionConfig",
    "FreePropagator",
    "HartreeParams",
    "ModelParams",
    "ScalarField",
    "SpectralGrid",
    "SpinorField",
    "evolve",
    "hartree_potential",
    "picard_solve",
    "propagator_step",
    "strang_step",
]
