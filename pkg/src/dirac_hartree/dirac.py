"""Free massive Dirac operator in two space dimensions.

With ``alpha1 = [[0, i], [-i, 0]]``, ``alpha2 = [[0, 1], [1, 0]]`` and
``gamma0 = diag(1, -1)`` the operator ``D_m = -i alpha^j d_j + m gamma0`` has
the Fourier symbol

    D(xi) = [[ m,              xi2 + i xi1 ],
             [ xi2 - i xi1,    -m          ]],

with ``D(xi)^2 = lambda(xi)^2 I`` and ``lambda = sqrt(m^2 + |xi|^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    SpectralGrid,
    SpinorField,
    fft2,
    forward_transform,
    ifft2,
    inner_product,
    spectral_l2,
)

ALPHA1 = np.array([[0, 1j], [-1j, 0]])
ALPHA2 = np.array([[0, 1], [1, 0]], dtype=complex)
GAMMA0 = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class DiracParams:
    m: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.m) and self.m > 0):
            raise ValueError(f"mass must be positive (massless case unsupported), got {self.m}")


def symbol_matrix(xi1: float, xi2: float, m: float) -> np.ndarray:
    """The 2x2 Hermitian symbol ``alpha1 xi1 + alpha2 xi2 + m gamma0`` at one frequency."""
    return ALPHA1 * xi1 + ALPHA2 * xi2 + GAMMA0 * m


@dataclass(frozen=True)
class DiracSymbol:
    """Entries of D(xi) on the whole lattice.

    ``offdiag`` is the (0, 1) entry ``xi2 + i xi1``; the (1, 0) entry is its
    conjugate and the diagonal is ``(m, -m)``.
    """

    m: float
    offdiag: np.ndarray
    lam: np.ndarray

    @classmethod
    def on(cls, grid: SpectralGrid, params: DiracParams) -> "DiracSymbol":
        xi1, xi2 = grid.xi
        return cls(params.m, xi2 + 1j * xi1, np.sqrt(params.m**2 + grid.xi_sq))

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        a, b = coeffs
        return np.stack(
            [self.m * a + self.offdiag * b, np.conj(self.offdiag) * a - self.m * b]
        )

    def matrix(self) -> np.ndarray:
        """Full ``(2, 2, n, n)`` array of symbol matrices, for checks."""
        m = np.full(self.lam.shape, self.m, dtype=complex)
        return np.array([[m, self.offdiag], [np.conj(self.offdiag), -m]])


def _propagator_entries(w, lam, m: float, t: float):
    """``exp(-itD) = [[c + sl m, sl w], [sl conj(w), c - sl m]]`` with ``c = cos(t lam)``, ``sl = -i sin(t lam)/lam``."""
    c = np.cos(t * lam)
    sl = -1j * np.sin(t * lam) / lam
    return c + sl * m, sl * w, sl * np.conj(w), c - sl * m


def propagator_matrix(xi1: float, xi2: float, m: float, t: float) -> np.ndarray:
    """Closed-form ``exp(-i t D(xi))`` at one frequency."""
    lam = np.sqrt(m**2 + xi1**2 + xi2**2)
    p00, p01, p10, p11 = _propagator_entries(xi2 + 1j * xi1, lam, m, t)
    return np.array([[p00, p01], [p10, p11]])


class FreePropagator:
    """Per-mode ``exp(-i t D(xi)) = cos(t lam) I - i sin(t lam)/lam D(xi)`` for a fixed ``t``.

    The coefficient arrays are built once so repeated steps only cost the
    transforms.
    """

    def __init__(self, grid: SpectralGrid, params: DiracParams, t: float):
        sym = DiracSymbol.on(grid, params)
        self.grid = grid
        self.t = t
        self.p00, self.p01, self.p10, self.p11 = _propagator_entries(sym.offdiag, sym.lam, sym.m, t)

    def apply_hat(self, coeffs: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        a, b = coeffs[0], coeffs[1]
        if out is None:
            out = np.empty_like(coeffs)
        na = self.p00 * a + self.p01 * b
        out[1] = self.p10 * a + self.p11 * b
        out[0] = na
        return out

    def apply_array(self, data: np.ndarray) -> np.ndarray:
        return ifft2(self.apply_hat(fft2(data)))

    def __call__(self, field: SpinorField) -> SpinorField:
        return SpinorField(field.grid, self.apply_array(field.data))


def apply_dirac(field: SpinorField, params: DiracParams) -> SpinorField:
    """Spectral realization of ``D_m psi``."""
    sym = DiracSymbol.on(field.grid, params)
    return SpinorField(field.grid, ifft2(sym.apply(fft2(field.data))))


def propagator_step(field: SpinorField, t: float, params: DiracParams) -> SpinorField:
    """Exact free flow ``exp(-i t D_m) psi``."""
    return FreePropagator(field.grid, params, t)(field)


def kinetic_form(field: SpinorField, params: DiracParams) -> float:
    """The indefinite form ``<D_m psi, psi>``; real by self-adjointness."""
    return inner_product(apply_dirac(field, params), field).real


def kinetic_form_hat(coeffs: np.ndarray, grid: SpectralGrid, params: DiracParams) -> float:
    """Same as :func:`kinetic_form` from precomputed coefficients."""
    sym = DiracSymbol.on(grid, params)
    return float(np.vdot(coeffs, sym.apply(coeffs)).real) / grid.box_length**2


def sobolev_norm(field: SpinorField, s: float) -> float:
    """``||(1 + |xi|^2)^{s/2} psi_hat||`` with Plancherel normalization."""
    return sobolev_norm_hat(forward_transform(field), field.grid, s)


def sobolev_norm_hat(coeffs: np.ndarray, grid: SpectralGrid, s: float) -> float:
    weight = None if s == 0 else (1.0 + grid.xi_sq) ** s
    return spectral_l2(coeffs, grid, weight)


def eigenvector(xi1: float, xi2: float, m: float, sign: int) -> np.ndarray:
    """Unit eigenvector of D(xi) for eigenvalue ``sign * lambda(xi)``, in closed form."""
    lam = np.sqrt(m**2 + xi1**2 + xi2**2)
    w = xi2 + 1j * xi1
    if sign > 0:
        vec = np.array([lam + m, np.conj(w)], dtype=complex)
    else:
        vec = np.array([-w, lam + m], dtype=complex)
    return vec / np.linalg.norm(vec)
