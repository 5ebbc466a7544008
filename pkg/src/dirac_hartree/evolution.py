"""Time integration of ``i psi_t = D_m psi + N(psi)``.

Two integrators are provided: Strang splitting with exact substeps
(kinetic half step, frozen-potential phase rotation, kinetic half step) and
Picard iteration of the Duhamel map on a window, with the time integral
taken by the composite trapezoid rule in the interaction picture.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

import numpy as np
import scipy.fft

from .dirac import FreePropagator
from .hartree import nonlinear_term_array
from .model import ModelParams
from .spectral import (
    SpectralGrid,
    SpinorField,
    density_array,
    fft2,
    fft_workers,
    ifft2,
)

log = logging.getLogger(__name__)


class NumericalAbort(RuntimeError):
    """Non-finite values appeared; carries the last valid time and the partial trajectory."""

    def __init__(self, message: str, last_valid_time: float, trajectory=None):
        super().__init__(message)
        self.last_valid_time = last_valid_time
        self.trajectory = trajectory


class PicardDivergence(RuntimeError):
    """Picard iteration did not reach the tolerance within the iteration cap."""

    def __init__(self, message: str, iterate_errors: list[float], trajectory=None):
        super().__init__(message)
        self.iterate_errors = iterate_errors
        self.trajectory = trajectory


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float = 1e-2
    t_final: float = 1.0
    method: Literal["strang", "picard"] = "strang"
    model: ModelParams = field(default_factory=ModelParams)
    picard_tol: float = 1e-12
    picard_max_iter: int = 50
    quad_nodes: int = 17
    window_T: float = 0.1
    sample_every: int = 10

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_final >= 0:
            raise ValueError(f"t_final must be nonnegative, got {self.t_final}")
        if self.method not in ("strang", "picard"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.picard_tol > 0:
            raise ValueError("picard_tol must be positive")
        if self.quad_nodes < 2:
            raise ValueError("quad_nodes must be at least 2")
        if not self.window_T > 0:
            raise ValueError("window_T must be positive")
        if self.sample_every < 1:
            raise ValueError("sample_every must be at least 1")


def step_count(t_final: float, dt: float) -> int:
    n = int(round(t_final / dt))
    if abs(n * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ValueError(f"t_final={t_final} is not a whole number of steps of {dt}")
    return n


# -- Strang splitting --------------------------------------------------------


class StrangStepper:
    """Reusable kinetic-potential-kinetic splitting for a fixed grid, model and ``dt``."""

    def __init__(self, grid: SpectralGrid, model: ModelParams, dt: float):
        self.grid = grid
        self.model = model
        self.dt = dt
        self.half = FreePropagator(grid, model.dirac, dt / 2)
        self.full = FreePropagator(grid, model.dirac, dt)
        n = grid.n
        k_half = 2.0 * np.pi * np.fft.rfftfreq(n, d=grid.dx)
        xi_sq_half = grid.k[:, None] ** 2 + k_half[None, :] ** 2
        self._resolvent = 1.0 / (model.b + xi_sq_half)

    def potential(self, data: np.ndarray) -> np.ndarray:
        rho = density_array(data, self.model.density_form)
        w = fft_workers()
        n = self.grid.n
        return scipy.fft.irfft2(scipy.fft.rfft2(rho, workers=w) * self._resolvent, s=(n, n), workers=w)

    def nonlinear_substep(self, data: np.ndarray, dt: float) -> np.ndarray:
        """Exact flow of ``i psi_t = sign V gamma0 psi``; ``V`` is invariant along it."""
        sign = self.model.coupling_sign
        if sign == 0:
            return data
        phase = np.exp(-1j * sign * dt * self.potential(data))
        data[0] *= phase
        data[1] *= np.conj(phase)
        return data

    def step(self, data: np.ndarray) -> np.ndarray:
        return self.advance(data, 1)

    def advance(self, data: np.ndarray, nsteps: int) -> np.ndarray:
        """``nsteps`` Strang steps with adjacent kinetic half steps fused."""
        if nsteps == 0:
            return np.array(data, dtype=np.complex128, copy=True)
        hat = self.half.apply_hat(fft2(data))
        for i in range(nsteps):
            phys = self.nonlinear_substep(ifft2(hat), self.dt)
            hat = fft2(phys)
            prop = self.full if i < nsteps - 1 else self.half
            prop.apply_hat(hat, out=hat)
        return ifft2(hat)


def strang_step(psi: SpinorField, dt: float, model: ModelParams) -> SpinorField:
    """One Strang step of size ``dt`` (negative ``dt`` runs backwards)."""
    stepper = StrangStepper(psi.grid, model, dt)
    return SpinorField(psi.grid, stepper.step(psi.data.copy()))


# -- Picard iteration of the Duhamel map ----------------------------------------


@dataclass
class PicardResult:
    state: SpinorField
    iterate_errors: list[float]
    nodes: np.ndarray
    node_hats: np.ndarray
    integrand_hats: np.ndarray
    duhamel_hats: np.ndarray
    psi0_hat: np.ndarray

    @property
    def iterations(self) -> int:
        return len(self.iterate_errors)


def _cumulative_trapezoid(g: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros_like(g)
    if len(g) > 1:
        out[1:] = np.cumsum(0.5 * h * (g[1:] + g[:-1]), axis=0)
    return out


def picard_solve(psi0: SpinorField, window_T: float, config: EvolutionConfig) -> PicardResult:
    """Fixed point of ``S(psi)(t) = U(t) psi0 - i int_0^t U(t-s) N(psi(s)) ds`` on ``[0, window_T]``.

    ``U(t) = exp(-i t D_m)``.  The first iterate is the free flow of ``psi0``.
    Iterate errors are ``max_nodes ||psi^(k+1)(s) - psi^(k)(s)||_{L^2}``.

    Raises :class:`PicardDivergence` with the error sequence if the
    tolerance is not met within ``picard_max_iter`` iterations.
    """
    grid = psi0.grid
    model = config.model
    Q = config.quad_nodes
    nodes = np.linspace(0.0, window_T, Q)
    h = window_T / (Q - 1)
    fwd = [FreePropagator(grid, model.dirac, s) for s in nodes]
    back = [FreePropagator(grid, model.dirac, -s) for s in nodes]
    # coefficients are raw FFT sums; the L^2 norm of a field is |c|_2 * dx^2 / L
    to_l2 = grid.cell_area / grid.box_length

    psi0_hat = fft2(psi0.data)
    current = np.stack([U.apply_hat(psi0_hat) for U in fwd])
    g = np.zeros_like(current)
    J = np.zeros_like(current)
    errors: list[float] = []
    sign = model.coupling_sign
    potential = _potential_fn(grid, model)
    for _ in range(config.picard_max_iter):
        if sign != 0:
            for i in range(Q):
                phys = ifft2(current[i])
                N = nonlinear_term_array(phys, potential(phys), sign)
                g[i] = back[i].apply_hat(fft2(N))
        J = _cumulative_trapezoid(g, h)
        new = np.stack([fwd[i].apply_hat(psi0_hat - 1j * J[i]) for i in range(Q)])
        diff = new - current
        err = float(np.max(np.sqrt(np.sum(np.abs(diff) ** 2, axis=(1, 2, 3)))) * to_l2)
        errors.append(err)
        current = new
        if not np.isfinite(err):
            break
        if err <= config.picard_tol:
            state = SpinorField(grid, ifft2(current[-1]))
            return PicardResult(state, errors, nodes, current, g.copy(), J, psi0_hat)
    raise PicardDivergence(
        f"Picard iteration on window {window_T} did not reach tol {config.picard_tol} "
        f"in {len(errors)} iterations (last error {errors[-1]:.3e})",
        errors,
    )


def _potential_fn(grid: SpectralGrid, model: ModelParams) -> Callable[[np.ndarray], np.ndarray]:
    resolvent = 1.0 / (model.b + grid.xi_sq)

    def potential(data):
        return ifft2(fft2(density_array(data, model.density_form)) * resolvent).real

    return potential


def contraction_factor(errors: list[float], floor: float = 1e-13) -> float:
    """Largest ratio of successive iterate errors, ignoring errors at roundoff level."""
    ratios = [b / a for a, b in zip(errors, errors[1:]) if a > floor and b > floor]
    if not ratios:
        return 0.0
    return float(max(ratios))


# -- driver -------------------------------------------------------------------


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    records: list = field(default_factory=list)
    states: Optional[list[SpinorField]] = None
    final_state: Optional[SpinorField] = None

    def append(self, t: float, record, state: SpinorField):
        if self.times and not t > self.times[-1]:
            raise ValueError("trajectory times must increase")
        self.times.append(t)
        self.records.append(record)
        self.final_state = state
        if self.states is not None:
            self.states.append(state)


def _default_hook(model: ModelParams):
    from .diagnostics import record

    def hook(psi: SpinorField, t: float):
        return record(psi, t, model)

    return hook


def evolve(
    psi0: SpinorField,
    config: EvolutionConfig,
    diagnostics_hook: Optional[Callable[[SpinorField, float], object]] = None,
    keep_states: bool = False,
) -> Trajectory:
    """March ``psi0`` to ``config.t_final``, sampling diagnostics every ``sample_every`` steps.

    For ``picard`` a step is one window of length ``window_T``.  The final
    time is always sampled.  A non-finite state raises :class:`NumericalAbort`
    carrying the trajectory so far; a :class:`PicardDivergence` is re-raised
    with the trajectory attached.
    """
    hook = diagnostics_hook or _default_hook(config.model)
    traj = Trajectory(states=[] if keep_states else None)
    traj.append(0.0, hook(psi0, 0.0), psi0)
    grid = psi0.grid

    if config.method == "strang":
        h = config.dt
        nsteps = step_count(config.t_final, h)
        stepper = StrangStepper(grid, config.model, h)

        def advance(data, k):
            return stepper.advance(data, k)

    else:
        h = config.window_T
        nsteps = step_count(config.t_final, h)

        def advance(data, k):
            state = SpinorField(grid, data)
            for _ in range(k):
                state = picard_solve(state, h, config).state
            return state.data

    data = psi0.data.copy()
    done = 0
    while done < nsteps:
        chunk = min(config.sample_every, nsteps - done)
        try:
            new = advance(data, chunk)
        except PicardDivergence as exc:
            exc.trajectory = traj
            raise
        if not np.all(np.isfinite(new)):
            t_last = done * h
            raise NumericalAbort(f"non-finite state after t={t_last}", t_last, traj)
        data = new
        done += chunk
        t = done * h
        state = SpinorField(grid, data)
        traj.append(t, hook(state, t), state)
        log.debug("t=%.6g", t)
    return traj
