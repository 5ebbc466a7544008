"""Periodic grid, discrete Fourier transforms and quadrature norms.

Conventions
-----------
Sample points are ``x_j = j * dx`` for ``j = 0..n-1`` on each axis, so the
box is ``[0, L)^2``.  Frequencies are ``xi_k = 2*pi*k/L`` stored in numpy FFT
order.  The forward transform is the Riemann sum

    psi_hat(xi) = sum_x psi(x) exp(-i x.xi) dx^2,

which makes ``sum |psi|^2 dx^2 == sum |psi_hat|^2 / L^2`` (Plancherel).
Spinor data is stored as a ``(2, n, n)`` complex array, component first.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Union

import numpy as np
import scipy.fft

DensityForm = Literal["modulus", "gamma0"]


def fft_workers() -> int:
    """Worker count for scipy.fft, capped by ``DHL_THREADS``."""
    value = os.environ.get("DHL_THREADS")
    if value is None:
        return 1
    return max(1, int(value))


def fft2(a: np.ndarray) -> np.ndarray:
    return scipy.fft.fft2(a, axes=(-2, -1), workers=fft_workers())


def ifft2(a: np.ndarray) -> np.ndarray:
    return scipy.fft.ifft2(a, axes=(-2, -1), workers=fft_workers())


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Square periodic box of side ``box_length`` sampled at ``n`` points per axis."""

    n: int
    box_length: float

    def __post_init__(self):
        n = self.n
        if n < 8 or n & (n - 1):
            raise ValueError(f"n must be a power of two >= 8, got {n}")
        if not (np.isfinite(self.box_length) and self.box_length > 0):
            raise ValueError(f"box_length must be positive, got {self.box_length}")

    def __eq__(self, other):
        if not isinstance(other, SpectralGrid):
            return NotImplemented
        return self.n == other.n and self.box_length == other.box_length

    def __hash__(self):
        return hash((self.n, self.box_length))

    @property
    def dx(self) -> float:
        return self.box_length / self.n

    @property
    def cell_area(self) -> float:
        return self.dx**2

    @cached_property
    def x(self) -> np.ndarray:
        """1D sample coordinates in ``[0, L)``."""
        return np.arange(self.n) * self.dx

    @cached_property
    def k(self) -> np.ndarray:
        """1D frequency lattice in FFT order, ``2*pi*k/L`` for ``k = -n/2..n/2-1``."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @cached_property
    def xi(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(self.k, self.k, indexing="ij"))

    @cached_property
    def xi_sq(self) -> np.ndarray:
        xi1, xi2 = self.xi
        return xi1**2 + xi2**2

    @cached_property
    def xi_abs(self) -> np.ndarray:
        return np.sqrt(self.xi_sq)

    @property
    def xi_max(self) -> float:
        """Nyquist frequency ``pi / dx``."""
        return np.pi / self.dx

    @property
    def xi_step(self) -> float:
        return 2.0 * np.pi / self.box_length

    @cached_property
    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(self.x, self.x, indexing="ij"))

    @cached_property
    def centered_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Minimum-image displacement of every sample from the origin."""
        half = self.box_length / 2
        c = np.where(self.x >= half, self.x - self.box_length, self.x)
        return tuple(np.meshgrid(c, c, indexing="ij"))

    @cached_property
    def radius(self) -> np.ndarray:
        """Periodic distance of every sample to the origin."""
        c1, c2 = self.centered_coords
        return np.hypot(c1, c2)

    @property
    def center(self) -> tuple[float, float]:
        return (self.box_length / 2, self.box_length / 2)

    def lattice_index(self, xi: float) -> int:
        """Index into ``k`` of a lattice frequency, raising if ``xi`` is off-lattice."""
        m = xi / self.xi_step
        mi = int(round(m))
        if abs(m - mi) > 1e-9 or not (-self.n // 2 <= mi < self.n // 2):
            raise ValueError(f"frequency {xi} is not on the lattice")
        return mi % self.n

    def to_dict(self) -> dict:
        return {"n": self.n, "L": self.box_length}


def _check_finite(a: np.ndarray, what: str):
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{what} contains non-finite entries")


@dataclass(frozen=True, eq=False)
class SpinorField:
    """Two-component complex field on a grid; ``data`` has shape ``(2, n, n)``."""

    grid: SpectralGrid
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128)
        n = self.grid.n
        if data.shape != (2, n, n):
            raise ValueError(f"spinor data must have shape (2, {n}, {n}), got {data.shape}")
        _check_finite(data, "spinor field")
        object.__setattr__(self, "data", data)

    @classmethod
    def from_components(cls, grid: SpectralGrid, u, v) -> "SpinorField":
        u = np.broadcast_to(np.asarray(u, dtype=np.complex128), (grid.n, grid.n))
        v = np.broadcast_to(np.asarray(v, dtype=np.complex128), (grid.n, grid.n))
        return cls(grid, np.stack([u, v]))

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "SpinorField":
        return cls(grid, np.zeros((2, grid.n, grid.n), dtype=np.complex128))

    @property
    def u(self) -> np.ndarray:
        return self.data[0]

    @property
    def v(self) -> np.ndarray:
        return self.data[1]

    def __add__(self, other: "SpinorField") -> "SpinorField":
        _same_grid(self, other)
        return SpinorField(self.grid, self.data + other.data)

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        _same_grid(self, other)
        return SpinorField(self.grid, self.data - other.data)

    def __mul__(self, c) -> "SpinorField":
        return SpinorField(self.grid, self.data * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real scalar field (densities, potentials, kernels)."""

    grid: SpectralGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if np.iscomplexobj(values):
            raise TypeError("ScalarField values must be real")
        values = values.astype(np.float64)
        n = self.grid.n
        if values.shape != (n, n):
            raise ValueError(f"scalar values must have shape ({n}, {n}), got {values.shape}")
        _check_finite(values, "scalar field")
        object.__setattr__(self, "values", values)

    def __mul__(self, c) -> "ScalarField":
        return ScalarField(self.grid, self.values * c)

    __rmul__ = __mul__


Field = Union[SpinorField, ScalarField]


def _same_grid(f, g):
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")


def field_array(field: Field) -> np.ndarray:
    return field.data if isinstance(field, SpinorField) else field.values


def with_array(field: Field, values: np.ndarray) -> Field:
    """Wrap ``values`` in the same field kind as ``field``.

    Scalar fields must come back real; a residual imaginary part from a
    transform round trip is dropped.
    """
    if isinstance(field, SpinorField):
        return SpinorField(field.grid, values)
    return ScalarField(field.grid, np.real(values))


def forward_transform(field: Field) -> np.ndarray:
    """Spectral coefficients with the Riemann-sum normalization (``* dx^2``)."""
    return fft2(field_array(field)) * field.grid.cell_area


def inverse_transform(coeffs: np.ndarray, grid: SpectralGrid) -> SpinorField:
    """Exact inverse of :func:`forward_transform` for spinor coefficients."""
    return SpinorField(grid, ifft2(coeffs) / grid.cell_area)


def inverse_transform_scalar(coeffs: np.ndarray, grid: SpectralGrid) -> ScalarField:
    """Inverse transform of coefficients of a real field; imaginary residue is discarded."""
    return ScalarField(grid, ifft2(coeffs).real / grid.cell_area)


def apply_multiplier(field: Field, multiplier: np.ndarray) -> Field:
    """Multiply the spectrum of ``field`` by a real or complex array indexed like ``grid.xi``."""
    out = ifft2(fft2(field_array(field)) * multiplier)
    return with_array(field, out)


def density_array(data: np.ndarray, form: DensityForm) -> np.ndarray:
    au = data[0].real**2 + data[0].imag**2
    av = data[1].real**2 + data[1].imag**2
    if form == "modulus":
        return au + av
    if form == "gamma0":
        return au - av
    raise ValueError(f"unknown density form {form!r}")


def density(field: SpinorField, form: DensityForm = "modulus") -> ScalarField:
    """Pointwise ``|u|^2 + |v|^2`` (modulus) or ``|u|^2 - |v|^2`` (gamma0)."""
    return ScalarField(field.grid, density_array(field.data, form))


def pointwise_magnitude(field: Field) -> np.ndarray:
    """|f(x)|, the C^2 Euclidean norm for spinors."""
    if isinstance(field, SpinorField):
        return np.sqrt(density_array(field.data, "modulus"))
    return np.abs(field.values)


def lp_norm_array(mag: np.ndarray, p: float, cell_area: float) -> float:
    if p == np.inf:
        return float(np.max(mag)) if mag.size else 0.0
    if p < 1:
        raise ValueError(f"Lebesgue exponent must be >= 1, got {p}")
    peak = float(np.max(mag))
    if peak == 0.0:
        return 0.0
    # scale out the peak so large p does not overflow
    return peak * float(np.sum((mag / peak) ** p) * cell_area) ** (1.0 / p)


def lp_norm(field: Field, p: float) -> float:
    """Quadrature L^p norm; ``p = inf`` gives the max pointwise magnitude."""
    if not (p == np.inf or p >= 1):
        raise ValueError(f"Lebesgue exponent must be >= 1, got {p}")
    return lp_norm_array(pointwise_magnitude(field), p, field.grid.cell_area)


def inner_product(f: SpinorField, g: SpinorField) -> complex:
    """``sum_x <f(x), g(x)> dx^2``, linear in ``f`` and conjugate-linear in ``g``."""
    _same_grid(f, g)
    return complex(np.vdot(g.data, f.data) * f.grid.cell_area)


def spectral_l2(coeffs: np.ndarray, grid: SpectralGrid, weight: np.ndarray | None = None) -> float:
    """Plancherel-normalized l^2 norm of coefficients, optionally weighted by ``weight`` (squared)."""
    power = coeffs.real**2 + coeffs.imag**2
    if coeffs.ndim == 3:
        power = power.sum(axis=0)
    if weight is not None:
        power = power * weight
    return float(np.sqrt(np.sum(power)) / grid.box_length)
