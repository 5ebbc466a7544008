"""Initial data library: Gaussians, modulated Gaussians, eigen-projected plane waves."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .dirac import eigenvector, sobolev_norm
from .spectral import ScalarField, SpectralGrid, SpinorField


def _envelope(grid: SpectralGrid, width: float, center: Optional[Sequence[float]]) -> np.ndarray:
    """Periodic Gaussian ``exp(-|x - x0|^2 / w^2)`` using minimum-image distance."""
    x0 = grid.center if center is None else center
    X, Y = grid.coords
    L = grid.box_length
    dx = (X - x0[0] + L / 2) % L - L / 2
    dy = (Y - x0[1] + L / 2) % L - L / 2
    return np.exp(-(dx**2 + dy**2) / width**2)


def gaussian(
    grid: SpectralGrid,
    width: float = 2.0,
    amplitude: float = 1.0,
    spinor: Sequence[complex] = (1.0, 0.0),
    center: Optional[Sequence[float]] = None,
) -> SpinorField:
    """``A exp(-|x - x0|^2 / w^2) (c1, c2)``, centred in the box by default."""
    env = amplitude * _envelope(grid, width, center)
    c1, c2 = spinor
    return SpinorField.from_components(grid, c1 * env, c2 * env)


def modulated_gaussian(
    grid: SpectralGrid,
    xi0: Sequence[float],
    width: float = 2.0,
    amplitude: float = 1.0,
    spinor: Sequence[complex] = (1.0, 0.0),
    center: Optional[Sequence[float]] = None,
) -> SpinorField:
    """Gaussian multiplied by the plane wave ``exp(i x.xi0)``."""
    X, Y = grid.coords
    wave = np.exp(1j * (xi0[0] * X + xi0[1] * Y))
    g = gaussian(grid, width, amplitude, spinor, center)
    return SpinorField(grid, g.data * wave)


def plane_wave(grid: SpectralGrid, xi0: Sequence[float], spinor: Sequence[complex]) -> SpinorField:
    """``exp(i x.xi0) w`` for a lattice frequency ``xi0``."""
    grid.lattice_index(xi0[0])
    grid.lattice_index(xi0[1])
    X, Y = grid.coords
    wave = np.exp(1j * (xi0[0] * X + xi0[1] * Y))
    return SpinorField.from_components(grid, spinor[0] * wave, spinor[1] * wave)


def eigen_projected_plane_wave(
    grid: SpectralGrid, xi0: Sequence[float], m: float, sign: int = 1, amplitude: float = 1.0
) -> SpinorField:
    """Plane wave in the ``sign * lambda(xi0)`` eigenspace of the Dirac symbol, with L^2 norm ``amplitude``."""
    w = eigenvector(xi0[0], xi0[1], m, sign)
    return plane_wave(grid, xi0, amplitude * w / grid.box_length)


def scale_to_norm(psi: SpinorField, target: float, s: float = 0.0) -> SpinorField:
    """Rescale so that ``||psi||_{H^s} = target``."""
    current = sobolev_norm(psi, s)
    if current == 0:
        raise ValueError("cannot rescale the zero field")
    return psi * (target / current)


def random_band_limited(grid: SpectralGrid, k_cut: float, rng: np.random.Generator, spinor: bool = True):
    """Random field whose spectrum is supported in ``|xi| < k_cut``."""
    shape = (2, grid.n, grid.n) if spinor else (grid.n, grid.n)
    coeffs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    coeffs = coeffs * (grid.xi_abs < k_cut)
    data = np.fft.ifft2(coeffs, axes=(-2, -1))
    if spinor:
        return SpinorField(grid, data / np.max(np.abs(data)))
    real = data.real
    return ScalarField(grid, real / np.max(np.abs(real)))
