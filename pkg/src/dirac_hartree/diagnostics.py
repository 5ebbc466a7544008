"""Conserved quantities, norm-growth fits and the potential-term estimate."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .dirac import DiracParams, kinetic_form_hat, sobolev_norm_hat
from .evolution import PicardResult
from .hartree import lp_exponent
from .model import ModelParams
from .spectral import SpinorField, density_array, fft2, spectral_l2


@dataclass
class DiagnosticsRecord:
    t: float
    mass: float
    energy: float
    kinetic: float
    h_half: float
    h_s: dict = field(default_factory=dict)
    potential_term: float = 0.0


def potential_term(psi: SpinorField, model: ModelParams) -> float:
    """``||(b - Lap)^{-1/2} rho||_{L^2}^2`` with ``rho`` chosen by the model's density form."""
    grid = psi.grid
    rho_hat = fft2(density_array(psi.data, model.density_form)) * grid.cell_area
    return spectral_l2(rho_hat, grid, 1.0 / (model.b + grid.xi_sq)) ** 2


def energy(psi: SpinorField, model: ModelParams) -> float:
    """``1/2 <D_m psi, psi> + sign/4 ||(b - Lap)^{-1/2} rho||^2``.

    For ``sign = -1`` this is ``1/2 <D psi, psi> - 1/4 ||...||^2``;
    with the coupling off only the kinetic half remains.
    """
    coeffs = fft2(psi.data) * psi.grid.cell_area
    kin = kinetic_form_hat(coeffs, psi.grid, model.dirac)
    return 0.5 * kin + 0.25 * model.coupling_sign * potential_term(psi, model)


def record(
    psi: SpinorField, t: float, model: ModelParams, s_list: Sequence[float] = ()
) -> DiagnosticsRecord:
    grid = psi.grid
    coeffs = fft2(psi.data) * grid.cell_area
    mass = spectral_l2(coeffs, grid) ** 2
    kin = kinetic_form_hat(coeffs, grid, model.dirac)
    pot = potential_term(psi, model)
    return DiagnosticsRecord(
        t=t,
        mass=mass,
        energy=0.5 * kin + 0.25 * model.coupling_sign * pot,
        kinetic=kin,
        h_half=sobolev_norm_hat(coeffs, grid, 0.5),
        h_s={s: sobolev_norm_hat(coeffs, grid, s) for s in s_list},
        potential_term=pot,
    )


def max_relative_drift(values: Sequence[float]) -> float:
    v = np.asarray(values, dtype=float)
    if v[0] == 0:
        return float(np.max(np.abs(v - v[0])))
    return float(np.max(np.abs(v - v[0])) / abs(v[0]))


# -- potential-term estimate ---------------------------------------------------


@dataclass
class PotentialBoundReport:
    epsilon: float
    p: float
    exponent: float
    h_half: float
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs


def potential_term_bound_check(psi: SpinorField, epsilon: float) -> PotentialBoundReport:
    """Compare ``||(1 - Lap)^{-1/2} |psi|^2||_{L^2}`` with ``(2^eps/eps)^{1/p} ||psi||_{H^{1/2}}^{4 eps/(1+eps)}``.

    ``psi`` is rescaled to unit mass first, the normalization under which the
    interpolation step holds without further constants.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    grid = psi.grid
    coeffs = fft2(psi.data) * grid.cell_area
    norm = spectral_l2(coeffs, grid)
    if norm == 0:
        raise ValueError("potential-term check needs a nonzero field")
    data = psi.data / norm
    coeffs = coeffs / norm
    rho_hat = fft2(density_array(data, "modulus")) * grid.cell_area
    lhs = spectral_l2(rho_hat, grid, 1.0 / (1.0 + grid.xi_sq))
    p = lp_exponent(epsilon)
    exponent = 4 * epsilon / (1 + epsilon)
    h_half = sobolev_norm_hat(coeffs, grid, 0.5)
    rhs = (2.0**epsilon / epsilon) ** (1.0 / p) * h_half**exponent
    return PotentialBoundReport(epsilon, p, exponent, h_half, lhs, rhs)


# -- growth fits -----------------------------------------------------------------

GrowthModel = Literal["single_exponential", "double_exponential"]


@dataclass
class GrowthFit:
    """``single_exponential``: value ~ exp(a + c t), params ``(a, c)``.

    ``double_exponential``: value ~ exp(C1 exp(C2 t)), params ``(C1, C2)``.
    """

    model: GrowthModel
    params: tuple
    residual: float
    t_range: tuple

    def envelope(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.model == "single_exponential":
            a, c = self.params
            return np.exp(a + c * t)
        C1, C2 = self.params
        return np.exp(C1 * np.exp(C2 * t))


def _series(series) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("series must be a sequence of (t, value) pairs")
    return arr[:, 0], arr[:, 1]


MIN_SAMPLES = 8


def fit_growth(series, model: GrowthModel = "single_exponential") -> GrowthFit:
    """Least squares on ``log(value)`` or ``log(log(value))``.

    The double-exponential fit keeps only samples with value >= 2.
    """
    t, v = _series(series)
    if len(t) < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {len(t)}")
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise ValueError("growth fits need positive finite values")
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample times must increase strictly")
    if model == "single_exponential":
        y = np.log(v)
    elif model == "double_exponential":
        keep = v >= 2
        t, v = t[keep], v[keep]
        if len(t) < MIN_SAMPLES:
            raise ValueError(f"only {len(t)} samples with value >= 2; need {MIN_SAMPLES}")
        y = np.log(np.log(v))
    else:
        raise ValueError(f"unknown growth model {model!r}")
    A = np.column_stack([np.ones_like(t), t])
    (c0, c1), *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.sqrt(np.mean((A @ np.array([c0, c1]) - y) ** 2)))
    params = (float(c0), float(c1)) if model == "single_exponential" else (float(np.exp(c0)), float(c1))
    return GrowthFit(model, params, residual, (float(t[0]), float(t[-1])))


@dataclass
class EnvelopeVerdict:
    fit: GrowthFit
    times: np.ndarray
    values: np.ndarray
    bounds: np.ndarray
    per_sample: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(np.all(self.per_sample))


def envelope_check(series, fit: GrowthFit, slack: float = 2.0) -> EnvelopeVerdict:
    """Every sample must lie below ``slack`` times the fitted envelope."""
    t, v = _series(series)
    bounds = slack * fit.envelope(t)
    return EnvelopeVerdict(fit, t, v, bounds, v <= bounds)


def envelope_protocol(series, model: GrowthModel, slack: float = 2.0) -> EnvelopeVerdict:
    """Fit on the first half of the series, test the second half."""
    t, v = _series(series)
    half = len(t) // 2
    fit = fit_growth(np.column_stack([t[:half], v[:half]]), model)
    return envelope_check(np.column_stack([t[half:], v[half:]]), fit, slack)


# -- mass identity on a Picard window ----------------------------------------------


@dataclass
class MassIdentityReport:
    """Terms of ``||psi(t)||^2 = ||psi0||^2 + ||J||^2 - 2 Im <psi0, J>``.

    ``J(t) = int_0^t U(-s) N(psi(s)) ds`` so that ``U(-t) psi(t) = psi0 - i J(t)``.
    Mass conservation is the statement ``balance = ||J||^2 - 2 Im<psi0, J> = 0``.
    """

    mass_0: float
    mass_t: float
    duhamel_sq: float
    cross: float
    algebraic_residual: float
    balance: float
    quadrature_error: float

    @property
    def balanced(self) -> bool:
        return abs(self.balance) <= 10.0 * self.quadrature_error


def picard_mass_identity(result: PicardResult, grid, roundoff: float = 1e-14) -> MassIdentityReport:
    """Evaluate the expansion at the end of a Picard window.

    The quadrature error of ``balance`` is estimated by Richardson
    extrapolation against the trapezoid rule on every other node, with a
    floor of ``roundoff * mass``.
    """
    scale = grid.cell_area  # raw FFT sums -> Riemann-normalized coefficients
    psi0 = result.psi0_hat * scale
    J = result.duhamel_hats[-1] * scale
    psiT = result.node_hats[-1] * scale
    L2 = grid.box_length**2

    def terms(Jv):
        sq = float(np.sum(np.abs(Jv) ** 2)) / L2
        cross = -2.0 * float(np.vdot(Jv, psi0).imag) / L2
        return sq, cross

    mass_0 = float(np.sum(np.abs(psi0) ** 2)) / L2
    mass_t = float(np.sum(np.abs(psiT) ** 2)) / L2
    sq, cross = terms(J)
    balance = sq + cross

    g = result.integrand_hats * scale
    Q = len(result.nodes)
    if Q >= 3 and (Q - 1) % 2 == 0:
        h2 = 2 * (result.nodes[1] - result.nodes[0])
        g2 = g[::2]
        J2 = 0.5 * h2 * (g2[0] + g2[-1] + 2 * np.sum(g2[1:-1], axis=0))
        sq2, cross2 = terms(J2)
        est = abs(balance - (sq2 + cross2)) / 3.0
    else:
        est = 0.0
    return MassIdentityReport(
        mass_0=mass_0,
        mass_t=mass_t,
        duhamel_sq=sq,
        cross=cross,
        algebraic_residual=mass_t - (mass_0 + sq + cross),
        balance=balance,
        quadrature_error=max(est, roundoff * mass_0),
    )


def kinetic_bound_constant(params: DiracParams) -> float:
    """``c(m) = max(1, m)`` with ``|<D psi, psi>| <= c(m) ||psi||_{H^{1/2}}^2``."""
    return max(1.0, params.m)
