import numpy as np
import pytest

from dirac_hartree import evolution
from dirac_hartree.dirac import propagator_step, sobolev_norm
from dirac_hartree.evolution import (
    EvolutionConfig,
    NumericalAbort,
    PicardDivergence,
    StrangStepper,
    contraction_factor,
    evolve,
    picard_solve,
    step_count,
    strang_step,
)
from dirac_hartree.initial_data import gaussian, random_band_limited, scale_to_norm
from dirac_hartree.model import ModelParams
from dirac_hartree.spectral import SpectralGrid, density_array, lp_norm


@pytest.mark.parametrize(
    "kw",
    [
        {"dt": 0.0},
        {"dt": -1e-3},
        {"t_final": -1.0},
        {"method": "rk4"},
        {"picard_tol": 0.0},
        {"quad_nodes": 1},
        {"window_T": 0.0},
        {"sample_every": 0},
    ],
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        EvolutionConfig(**kw)


def test_step_count():
    assert step_count(1.0, 0.01) == 100
    assert step_count(0.0, 0.1) == 0
    with pytest.raises(ValueError):
        step_count(1.0, 0.3)


@pytest.fixture(scope="module")
def big_data():
    grid = SpectralGrid(64, 8 * np.pi)
    return scale_to_norm(gaussian(grid, width=1.5), 3.0)


def test_strang_without_coupling_is_free_flow(big_data):
    model = ModelParams(coupling_sign=0)
    out = strang_step(big_data, 0.05, model)
    ref = propagator_step(big_data, 0.05, model.dirac)
    assert np.max(np.abs(out.data - ref.data)) < 1e-13


@pytest.mark.parametrize("form", ["gamma0", "modulus"])
@pytest.mark.parametrize("sign", [-1, 1])
def test_strang_mass_per_step(big_data, form, sign):
    model = ModelParams(density_form=form, coupling_sign=sign)
    m0 = lp_norm(big_data, 2) ** 2
    psi = big_data
    for _ in range(5):
        psi = strang_step(psi, 0.05, model)
        assert abs(lp_norm(psi, 2) ** 2 - m0) <= 1e-13 * m0


@pytest.mark.parametrize("form", ["gamma0", "modulus"])
def test_nonlinear_substep_keeps_density(big_data, form):
    model = ModelParams(density_form=form)
    stepper = StrangStepper(big_data.grid, model, 0.1)
    before = density_array(big_data.data, form)
    after = density_array(stepper.nonlinear_substep(big_data.data.copy(), 0.1), form)
    assert np.max(np.abs(after - before)) < 1e-13 * np.max(np.abs(before))


def test_strang_time_reversible(big_data):
    model = ModelParams()
    back = strang_step(strang_step(big_data, 0.03, model), -0.03, model)
    assert np.max(np.abs(back.data - big_data.data)) < 1e-12


def test_fused_advance_matches_single_steps(big_data):
    model = ModelParams()
    stepper = StrangStepper(big_data.grid, model, 0.02)
    fused = stepper.advance(big_data.data.copy(), 7)
    single = big_data.data.copy()
    for _ in range(7):
        single = stepper.step(single)
    assert np.max(np.abs(fused - single)) < 1e-13


def _final(psi, dt, T, model):
    cfg = EvolutionConfig(dt=dt, t_final=T, model=model, sample_every=10**6)
    return evolve(psi, cfg, lambda p, t: None).final_state


def test_strang_halving_factor(big_data):
    model = ModelParams()
    h, T = 0.02, 1.0
    ref = _final(big_data, h / 16, T, model)
    e1 = sobolev_norm(_final(big_data, h, T, model) - ref, 0)
    e2 = sobolev_norm(_final(big_data, h / 2, T, model) - ref, 0)
    assert e1 / e2 == pytest.approx(4.0, abs=0.4)


def test_linear_run_exact():
    grid = SpectralGrid(64, 8 * np.pi)
    psi = random_band_limited(grid, 6.0, np.random.default_rng(3))
    model = ModelParams(coupling_sign=0)
    out = _final(psi, 0.1, 5.0, model)
    ref = propagator_step(psi, 5.0, model.dirac)
    assert sobolev_norm(out - ref, 0) / sobolev_norm(ref, 0) < 1e-11


def test_picard_linear_single_iteration(big_data):
    cfg = EvolutionConfig(model=ModelParams(coupling_sign=0))
    res = picard_solve(big_data, 0.1, cfg)
    assert res.iterations == 1
    ref = propagator_step(big_data, 0.1, cfg.model.dirac)
    assert np.max(np.abs(res.state.data - ref.data)) < 1e-13


@pytest.fixture(scope="module")
def small_data():
    grid = SpectralGrid(64, 8 * np.pi)
    return scale_to_norm(gaussian(grid, width=1.5), 0.1, s=0.5)


def test_picard_geometric_decay(small_data):
    cfg = EvolutionConfig(picard_tol=1e-13, quad_nodes=17)
    res = picard_solve(small_data, 0.1, cfg)
    errs = [e for e in res.iterate_errors if e > 1e-13]
    ratios = np.array(errs[1:]) / np.array(errs[:-1])
    assert len(ratios) >= 1
    assert np.all(ratios < 0.5)
    assert res.iterate_errors[-1] <= 1e-13


def test_picard_agrees_with_strang(small_data):
    cfg = EvolutionConfig(picard_tol=1e-13, quad_nodes=17)
    res = picard_solve(small_data, 0.1, cfg)
    ref = _final(small_data, 1e-3, 0.1, cfg.model)
    assert sobolev_norm(res.state - ref, 0) < 1e-6


def test_picard_divergence_reports_errors(big_data):
    cfg = EvolutionConfig(picard_tol=1e-14, picard_max_iter=3)
    with pytest.raises(PicardDivergence) as info:
        picard_solve(big_data * 5.0, 1.0, cfg)
    assert len(info.value.iterate_errors) == 3


def test_contraction_factor():
    assert contraction_factor([1.0, 0.1, 0.01, 1e-14]) == pytest.approx(0.1)
    assert contraction_factor([1e-15]) == 0.0


def test_evolve_t0_single_record(big_data):
    traj = evolve(big_data, EvolutionConfig(t_final=0.0))
    assert traj.times == [0.0]
    assert len(traj.records) == 1


def test_evolve_samples_and_final_time(big_data):
    cfg = EvolutionConfig(dt=0.01, t_final=0.25, sample_every=10)
    traj = evolve(big_data, cfg, keep_states=True)
    assert traj.times == pytest.approx([0.0, 0.1, 0.2, 0.25])
    assert np.all(np.diff(traj.times) > 0)
    assert len(traj.records) == len(traj.states) == 4


def test_evolve_picard_windows(small_data):
    cfg = EvolutionConfig(method="picard", window_T=0.1, t_final=0.3, sample_every=1)
    traj = evolve(small_data, cfg)
    assert traj.times == pytest.approx([0.0, 0.1, 0.2, 0.3])


def test_evolve_aborts_on_nonfinite(big_data, monkeypatch):
    def broken(self, data, nsteps):
        return np.full_like(data, np.nan)

    calls = {"n": 0}
    real = StrangStepper.advance

    def flaky(self, data, nsteps):
        calls["n"] += 1
        return real(self, data, nsteps) if calls["n"] == 1 else broken(self, data, nsteps)

    monkeypatch.setattr(evolution.StrangStepper, "advance", flaky)
    with pytest.raises(NumericalAbort) as info:
        evolve(big_data, EvolutionConfig(dt=0.01, t_final=0.5, sample_every=10))
    assert info.value.last_valid_time == pytest.approx(0.1)
    assert info.value.trajectory.times == pytest.approx([0.0, 0.1])


def test_evolve_attaches_trajectory_to_picard_failure(big_data):
    cfg = EvolutionConfig(method="picard", window_T=1.0, t_final=2.0, picard_tol=1e-14, picard_max_iter=2)
    with pytest.raises(PicardDivergence) as info:
        evolve(big_data * 5.0, cfg)
    assert info.value.trajectory.times == [0.0]
