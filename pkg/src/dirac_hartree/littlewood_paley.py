"""Dyadic Littlewood-Paley decomposition on the periodic grid, Besov norms, and
ratio verifiers for the dyadic inequalities used in the local theory.

The partition is built by telescoping a smooth cutoff ``chi``:

    rho0_hat(xi) = chi(|xi|/2),   rho_hat(xi) = chi(|xi|/2) - chi(|xi|),

so ``rho0_hat + sum_{j=1}^J rho_hat(2^-j xi) = chi(2^-(J+1) |xi|)`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .spectral import (
    Field,
    ScalarField,
    SpectralGrid,
    SpinorField,
    fft2,
    field_array,
    ifft2,
    lp_norm_array,
    with_array,
)


def smooth_step(x: np.ndarray) -> np.ndarray:
    """``exp(-1/x)`` for ``x > 0``, zero otherwise."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


@dataclass(frozen=True)
class DyadicProfile:
    """Radial cutoff ``chi`` equal to 1 on ``r <= inner`` and 0 on ``r >= outer``."""

    inner: float = 1.0
    outer: float = 8.0 / 7.0

    def chi(self, r) -> np.ndarray:
        width = self.outer - self.inner
        a = smooth_step((self.outer - np.asarray(r, dtype=float)) / width)
        b = smooth_step((np.asarray(r, dtype=float) - self.inner) / width)
        return a / (a + b)

    def rho_hat(self, r) -> np.ndarray:
        return self.chi(np.asarray(r) / 2.0) - self.chi(r)

    def rho0_hat(self, r) -> np.ndarray:
        return self.chi(np.asarray(r) / 2.0)

    def window(self, r, j: int) -> np.ndarray:
        """Multiplier of block ``j``; ``j = 0`` is the low-frequency base block."""
        if j == 0:
            return self.rho0_hat(r)
        return self.rho_hat(np.asarray(r) / 2.0**j)

    def support(self, j: int) -> tuple[float, float]:
        """Closed annulus outside which the block-``j`` multiplier vanishes."""
        if j == 0:
            return (0.0, 2 * self.outer)
        return (2.0**j * self.inner, 2.0**j * 2 * self.outer)


DEFAULT_PROFILE = DyadicProfile()


def j_max(grid: SpectralGrid) -> int:
    """Largest dyadic shell below Nyquist: ``floor(log2(xi_max)) - 1``."""
    return int(np.floor(np.log2(grid.xi_max))) - 1


def covering_level(grid: SpectralGrid, profile: DyadicProfile = DEFAULT_PROFILE) -> int:
    """Smallest ``J`` whose blocks ``0..J`` cover every lattice frequency."""
    top = float(np.max(grid.xi_abs))
    J = 0
    while 2.0 ** (J + 1) * profile.inner < top:
        J += 1
    return J


@dataclass
class DyadicDecomposition:
    base_block: Field
    blocks: list
    j_max: int

    def block(self, j: int) -> Field:
        return self.base_block if j == 0 else self.blocks[j - 1]

    def reconstruct(self) -> Field:
        total = field_array(self.base_block).copy()
        for blk in self.blocks:
            total = total + field_array(blk)
        return with_array(self.base_block, total)


def _block_arrays(arr: np.ndarray, grid: SpectralGrid, levels, profile) -> list:
    spec = fft2(arr)
    r = grid.xi_abs
    out = []
    for j in levels:
        out.append(ifft2(spec * profile.window(r, j)))
    return out


def decompose(
    field: Field,
    profile: DyadicProfile = DEFAULT_PROFILE,
    top: Optional[int] = None,
) -> DyadicDecomposition:
    """Blocks ``0..top`` of ``field``; ``top`` defaults to :func:`j_max`."""
    J = j_max(field.grid) if top is None else top
    arrs = _block_arrays(field_array(field), field.grid, range(J + 1), profile)
    blocks = [with_array(field, a) for a in arrs]
    return DyadicDecomposition(blocks[0], blocks[1:], J)


def _magnitude(a: np.ndarray) -> np.ndarray:
    power = a.real**2 + a.imag**2
    if a.ndim == 3:
        power = power.sum(axis=0)
    return np.sqrt(power)


def _check_exponent(p: float, what: str):
    if not (p == np.inf or p >= 1):
        raise ValueError(f"{what} must lie in [1, inf], got {p}")


def besov_norm_array(
    arr: np.ndarray,
    grid: SpectralGrid,
    s: float,
    p: float,
    q: float,
    profile: DyadicProfile = DEFAULT_PROFILE,
    top: Optional[int] = None,
) -> float:
    _check_exponent(p, "p")
    _check_exponent(q, "q")
    J = covering_level(grid, profile) if top is None else top
    blocks = _block_arrays(arr, grid, range(J + 1), profile)
    norms = [lp_norm_array(_magnitude(b), p, grid.cell_area) for b in blocks]
    weighted = np.array([2.0 ** (j * s) * norms[j] for j in range(1, J + 1)])
    if weighted.size == 0:
        tail = 0.0
    elif q == np.inf:
        tail = float(np.max(weighted))
    else:
        tail = float(np.sum(weighted**q) ** (1.0 / q))
    return norms[0] + tail


def besov_norm(
    field: Field,
    s: float,
    p: float,
    q: float,
    profile: DyadicProfile = DEFAULT_PROFILE,
    top: Optional[int] = None,
) -> float:
    """Inhomogeneous ``B^s_{p,q}`` norm.

    By default every block that meets the lattice is included, so the norm
    sees the whole discrete spectrum (corners above Nyquist included).
    """
    return besov_norm_array(field_array(field), field.grid, s, p, q, profile, top)


def block_array(field: Field, j: int, profile: DyadicProfile = DEFAULT_PROFILE) -> np.ndarray:
    return _block_arrays(field_array(field), field.grid, [j], profile)[0]


def bernstein_ratio(
    field: Field, j: int, q: float, r: float, profile: DyadicProfile = DEFAULT_PROFILE
) -> Optional[float]:
    """``||f_j||_r / (2^{2j(1/q - 1/r)} ||f_j||_q)``, or ``None`` when block ``j`` is empty."""
    _check_exponent(q, "q")
    _check_exponent(r, "r")
    if not q < r:
        raise ValueError(f"need q < r, got q={q}, r={r}")
    mag = _magnitude(block_array(field, j, profile))
    nq = lp_norm_array(mag, q, field.grid.cell_area)
    if nq == 0.0:
        return None
    nr = lp_norm_array(mag, r, field.grid.cell_area)
    gain = 2.0 ** (2 * j * (1.0 / q - 1.0 / r))
    return nr / (gain * nq)


def dyadic_multiplier_ratio(
    field: Field,
    j: int,
    sigma: float,
    b: float,
    p: float,
    profile: DyadicProfile = DEFAULT_PROFILE,
) -> Optional[float]:
    """``||(b - Laplacian)^{sigma/2} f_j||_p / (2^{sigma j} ||f_j||_p)`` for ``j >= 1``."""
    if j < 1:
        raise ValueError("the dyadic multiplier bound concerns blocks j >= 1")
    if b <= 0:
        raise ValueError(f"b must be positive, got {b}")
    _check_exponent(p, "p")
    grid = field.grid
    spec = fft2(field_array(field)) * profile.window(grid.xi_abs, j)
    blk = ifft2(spec)
    den = lp_norm_array(_magnitude(blk), p, grid.cell_area)
    if den == 0.0:
        return None
    if sigma == 0:
        return 1.0
    num = lp_norm_array(
        _magnitude(ifft2(spec * (b + grid.xi_sq) ** (sigma / 2))), p, grid.cell_area
    )
    return num / (2.0 ** (sigma * j) * den)


def pointwise_product(phi: Field, psi: Field) -> np.ndarray:
    """``phi * psi`` for scalars; ``sum_c conj(phi_c) psi_c`` for spinors (so ``phi = psi`` gives ``|psi|^2``)."""
    if phi.grid != psi.grid:
        raise ValueError("fields live on different grids")
    a, b = field_array(phi), field_array(psi)
    if isinstance(phi, SpinorField) and isinstance(psi, SpinorField):
        return np.sum(np.conj(a) * b, axis=0)
    if isinstance(phi, SpinorField) or isinstance(psi, SpinorField):
        raise TypeError("product of a spinor and a scalar field is not defined here")
    return a * b


def product_estimate_ratio(
    phi: Field, psi: Field, s: float, profile: DyadicProfile = DEFAULT_PROFILE
) -> float:
    """``||phi psi||_{B^s_{1,inf}} / (||phi||_{B^s_{2,2}} ||psi||_{B^s_{2,2}})``."""
    grid = phi.grid
    dphi = besov_norm(phi, s, 2, 2, profile)
    dpsi = besov_norm(psi, s, 2, 2, profile)
    if dphi == 0.0 or dpsi == 0.0:
        raise ValueError("product estimate needs nonzero inputs")
    num = besov_norm_array(pointwise_product(phi, psi), grid, s, 1, np.inf, profile)
    return num / (dphi * dpsi)


@dataclass
class BrezisGallouetReport:
    lhs_inf: float
    lhs_2s: float
    l1: float
    besov: float
    rhs: float

    @property
    def ratio(self) -> float:
        return (self.lhs_inf + self.lhs_2s) / self.rhs


def log_bound(l1: float, besov: float) -> float:
    """``||f||_1 log(2 + ||f||_B / ||f||_1)``, the right side without its constant."""
    return l1 * np.log(2.0 + besov / l1)


def brezis_gallouet_ratio(
    f: ScalarField, b: float, s: float, profile: DyadicProfile = DEFAULT_PROFILE
) -> BrezisGallouetReport:
    """Both left-hand terms of the logarithmic estimate and its right side on the grid.

    ``lhs_inf = ||(b - Lap)^{-1} f||_inf`` and
    ``lhs_2s = ||(b - Lap)^{-1} (1 - Lap)^{s/2} f||_{2/s}``.
    """
    if b <= 0:
        raise ValueError(f"b must be positive, got {b}")
    if not 0 < s <= 1:
        raise ValueError(f"s must lie in (0, 1], got {s}")
    grid = f.grid
    spec = fft2(f.values)
    resolvent = 1.0 / (b + grid.xi_sq)
    g_inf = ifft2(spec * resolvent).real
    g_2s = ifft2(spec * resolvent * (1.0 + grid.xi_sq) ** (s / 2)).real
    l1 = lp_norm_array(np.abs(f.values), 1, grid.cell_area)
    if l1 == 0.0:
        raise ValueError("Brezis-Gallouet ratio needs a nonzero input")
    besov = besov_norm(f, s, 1, np.inf, profile)
    return BrezisGallouetReport(
        lhs_inf=float(np.max(np.abs(g_inf))),
        lhs_2s=lp_norm_array(np.abs(g_2s), 2.0 / s, grid.cell_area),
        l1=l1,
        besov=besov,
        rhs=log_bound(l1, besov),
    )


def gaussian_scale_member(grid: SpectralGrid, lam: float) -> ScalarField:
    """Unit-mass Gaussian ``lam^2/pi exp(-lam^2 |x|^2)`` centred at the origin, built from its spectrum.

    The spectrum ``exp(-|xi|^2 / (4 lam^2))`` is sampled on the lattice, so the
    member is the band-limited periodization of the planar Gaussian.
    """
    return ScalarField(grid, ifft2(np.exp(-grid.xi_sq / (4.0 * lam**2))).real / grid.cell_area)
