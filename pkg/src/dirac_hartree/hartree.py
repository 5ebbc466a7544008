"""Bessel potentials, the Hartree potential and the Bessel kernel estimates."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .spectral import (
    DensityForm,
    Field,
    ScalarField,
    SpectralGrid,
    SpinorField,
    apply_multiplier,
    density_array,
    fft2,
    ifft2,
    inner_product,
)


@dataclass(frozen=True)
class HartreeParams:
    """Screening ``b``, which density feeds the potential, and the coupling sign.

    ``coupling_sign = -1`` reproduces ``i psi_t = D_m psi - V gamma0 psi``;
    ``0`` switches the nonlinearity off.
    """

    b: float = 1.0
    density_form: DensityForm = "gamma0"
    coupling_sign: Literal[-1, 0, 1] = -1

    def __post_init__(self):
        if not (np.isfinite(self.b) and self.b > 0):
            raise ValueError(f"b must be positive, got {self.b}")
        if self.density_form not in ("modulus", "gamma0"):
            raise ValueError(f"unknown density form {self.density_form!r}")
        if self.coupling_sign not in (-1, 0, 1):
            raise ValueError(f"coupling_sign must be -1, 0 or +1, got {self.coupling_sign}")


def bessel_symbol(grid: SpectralGrid, sigma: float, b: float) -> np.ndarray:
    if b <= 0:
        raise ValueError(f"b must be positive, got {b}")
    return (b + grid.xi_sq) ** sigma


def bessel_multiply(field: Field, sigma: float, b: float) -> Field:
    """Apply ``(b - Laplacian)^sigma`` as the multiplier ``(b + |xi|^2)^sigma``."""
    if sigma == 0:
        if b <= 0:
            raise ValueError(f"b must be positive, got {b}")
        return field
    return apply_multiplier(field, bessel_symbol(field.grid, sigma, b))


def potential_array(data: np.ndarray, grid: SpectralGrid, params: HartreeParams) -> np.ndarray:
    rho = density_array(data, params.density_form)
    return ifft2(fft2(rho) / (params.b + grid.xi_sq)).real


def hartree_potential(psi: SpinorField, params: HartreeParams) -> ScalarField:
    """``V = (b - Laplacian)^{-1} rho`` with ``rho`` chosen by ``params.density_form``."""
    return ScalarField(psi.grid, potential_array(psi.data, psi.grid, params))


def nonlinear_term_array(data: np.ndarray, V: np.ndarray, coupling_sign: int) -> np.ndarray:
    return coupling_sign * np.stack([V * data[0], -V * data[1]])


def nonlinear_term(psi: SpinorField, params: HartreeParams) -> SpinorField:
    """``coupling_sign * V * gamma0 psi``; the equation reads ``i psi_t = D_m psi + N(psi)``."""
    if params.coupling_sign == 0:
        return SpinorField.zeros(psi.grid)
    V = potential_array(psi.data, psi.grid, params)
    return SpinorField(psi.grid, nonlinear_term_array(psi.data, V, params.coupling_sign))


def nonlinear_pairing(psi: SpinorField, params: HartreeParams) -> complex:
    """``<N(psi), psi>``, real for either density form."""
    return inner_product(nonlinear_term(psi, params), psi)


# -- Bessel kernel ----------------------------------------------------------


@lru_cache(maxsize=8)
def _kernel_values(n: int, box_length: float, sigma: float) -> np.ndarray:
    grid = SpectralGrid(n, box_length)
    values = ifft2((1.0 + grid.xi_sq) ** sigma).real / grid.cell_area
    values.setflags(write=False)
    return values


def bessel_kernel_samples(grid: SpectralGrid, sigma: float) -> ScalarField:
    """Periodized kernel of ``(1 - Laplacian)^sigma`` sampled on the grid (origin at index 0)."""
    if sigma >= 0:
        raise ValueError(f"kernel samples need sigma < 0, got {sigma}")
    return ScalarField(grid, _kernel_values(grid.n, grid.box_length, float(sigma)))


def bessel_kernel_exact(r: np.ndarray) -> np.ndarray:
    """Closed form of the ``(1 - Laplacian)^{-1/2}`` kernel in the plane, ``exp(-r) / (2 pi r)``."""
    return np.exp(-r) / (2.0 * np.pi * r)


def kernel_bound_shape(r: np.ndarray) -> np.ndarray:
    """``exp(-r/2)`` for ``r >= 2`` and ``1/r`` below."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    far = r >= 2
    out[far] = np.exp(-r[far] / 2)
    out[~far] = 1.0 / r[~far]
    return out


@dataclass
class KernelBoundReport:
    r_min: float
    r_max: float
    fitted_constant: float
    min_value: float
    positive: bool
    holds: bool
    max_rel_err_vs_exact: float | None


def kernel_bound_check(
    grid: SpectralGrid,
    sigma: float = -0.5,
    r_min: float = 0.1,
    r_max: float = 8.0,
    positivity_r_max: float = 5.0,
) -> KernelBoundReport:
    """Fit the single constant of the two-regime bound on ``r_min <= |x| <= r_max``.

    Samples with ``|x| < dx`` are always excluded.  Positivity is checked on
    ``r_min <= |x| <= positivity_r_max``, where truncation ringing of the
    discrete kernel stays below the true kernel.
    """
    G = bessel_kernel_samples(grid, sigma).values
    r = grid.radius
    lo = max(r_min, grid.dx)
    mask = (r >= lo) & (r <= r_max)
    shape = kernel_bound_shape(r[mask])
    C = float(np.max(G[mask] / shape))
    pos_mask = (r >= lo) & (r <= positivity_r_max)
    min_value = float(np.min(G[pos_mask]))
    rel = None
    if sigma == -0.5:
        near = (r >= lo) & (r <= 2.0)
        exact = bessel_kernel_exact(r[near])
        rel = float(np.max(np.abs(G[near] - exact) / exact))
    holds = bool(np.all(G[mask] <= C * shape * (1 + 1e-12)))
    return KernelBoundReport(lo, r_max, C, min_value, min_value > 0, holds, rel)


def lp_exponent(epsilon: float) -> float:
    """``p = (2 + 2 eps) / (1 + 3 eps)``."""
    return (2.0 + 2.0 * epsilon) / (1.0 + 3.0 * epsilon)


@dataclass
class KernelLpReport:
    epsilon: float
    p: float
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs


DEFAULT_KERNEL_GRID = (1024, 32 * np.pi)


def kernel_lp_bound_check(epsilon: float, grid: SpectralGrid | None = None) -> KernelLpReport:
    """``||G||_{L^p}^p`` for the ``(1 - Laplacian)^{-1/2}`` kernel against ``2^eps / eps``.

    The ball ``|x| < dx`` around the origin is left out of the quadrature.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if grid is None:
        grid = SpectralGrid(*DEFAULT_KERNEL_GRID)
    p = lp_exponent(epsilon)
    G = bessel_kernel_samples(grid, -0.5).values
    mask = grid.radius >= grid.dx
    lhs = float(np.sum(np.abs(G[mask]) ** p) * grid.cell_area)
    return KernelLpReport(epsilon, p, lhs, 2.0**epsilon / epsilon)
