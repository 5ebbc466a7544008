import numpy as np
import pytest
from hypothesis import given, strategies as st

from dirac_hartree.initial_data import gaussian, random_band_limited
from dirac_hartree.spectral import (
    ScalarField,
    SpectralGrid,
    SpinorField,
    apply_multiplier,
    density,
    forward_transform,
    inner_product,
    inverse_transform,
    lp_norm,
    spectral_l2,
)


@pytest.mark.parametrize("n", [3, 6, 100, 4])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        SpectralGrid(n, 10.0)


def test_grid_rejects_nonpositive_length():
    with pytest.raises(ValueError):
        SpectralGrid(16, 0.0)


def test_grid_geometry(grid64):
    assert grid64.dx == pytest.approx(8 * np.pi / 64)
    assert grid64.xi_max == pytest.approx(np.pi / grid64.dx)
    assert grid64.xi_step == pytest.approx(2 * np.pi / grid64.box_length)
    assert grid64.xi_sq[0, 0] == 0.0


def test_lattice_index_rejects_off_lattice(grid64):
    assert grid64.lattice_index(3 * grid64.xi_step) == 3
    with pytest.raises(ValueError):
        grid64.lattice_index(0.3 * grid64.xi_step)


def test_spinor_rejects_nonfinite(grid64):
    data = np.zeros((2, 64, 64), complex)
    data[0, 1, 1] = np.nan
    with pytest.raises(ValueError):
        SpinorField(grid64, data)


def test_spinor_rejects_wrong_shape(grid64):
    with pytest.raises(ValueError):
        SpinorField(grid64, np.zeros((64, 64), complex))


def test_transform_round_trip(grid64, rng):
    psi = random_band_limited(grid64, 6.0, rng)
    back = inverse_transform(forward_transform(psi), grid64)
    assert np.max(np.abs(back.data - psi.data)) < 1e-14


def test_plancherel(grid64, rng):
    psi = random_band_limited(grid64, 6.0, rng)
    direct = np.sqrt(np.sum(np.abs(psi.data) ** 2) * grid64.cell_area)
    assert spectral_l2(forward_transform(psi), grid64) == pytest.approx(direct, rel=1e-13)
    assert lp_norm(psi, 2) == pytest.approx(direct, rel=1e-13)


def test_gaussian_l2_closed_form():
    # int exp(-2|x|^2/w^2) dx = pi w^2 / 2
    grid = SpectralGrid(128, 16 * np.pi)
    w, A = 2.0, 1.5
    psi = gaussian(grid, width=w, amplitude=A)
    assert lp_norm(psi, 2) ** 2 == pytest.approx(A**2 * np.pi * w**2 / 2, rel=1e-12)
    assert lp_norm(psi, np.inf) == pytest.approx(A)


def test_lp_norm_rejects_small_exponent(grid64):
    with pytest.raises(ValueError):
        lp_norm(gaussian(grid64), 0.5)


def test_inner_product_linearity(grid64, rng):
    f = random_band_limited(grid64, 5.0, rng)
    g = random_band_limited(grid64, 5.0, rng)
    c = 0.3 - 1.2j
    assert inner_product(f * c, g) == pytest.approx(c * inner_product(f, g), rel=1e-12)
    assert inner_product(f, g * c) == pytest.approx(np.conj(c) * inner_product(f, g), rel=1e-12)
    assert inner_product(f, f).imag == pytest.approx(0.0, abs=1e-12)


def test_density_forms(grid64, rng):
    psi = random_band_limited(grid64, 5.0, rng)
    mod = density(psi, "modulus").values
    g0 = density(psi, "gamma0").values
    assert np.allclose(mod, np.abs(psi.u) ** 2 + np.abs(psi.v) ** 2)
    assert np.allclose(g0, np.abs(psi.u) ** 2 - np.abs(psi.v) ** 2)
    with pytest.raises(ValueError):
        density(psi, "other")


def test_multiplier_identity(grid64, rng):
    f = random_band_limited(grid64, 5.0, rng, spinor=False)
    out = apply_multiplier(f, np.ones((64, 64)))
    assert isinstance(out, ScalarField)
    assert np.max(np.abs(out.values - f.values)) < 1e-14


@given(st.floats(0.5, 4.0), st.floats(-3.0, 3.0))
def test_plancherel_property(width, phase):
    grid = SpectralGrid(32, 8 * np.pi)
    psi = gaussian(grid, width=width, spinor=(np.exp(1j * phase), 0.5))
    direct = np.sqrt(np.sum(np.abs(psi.data) ** 2) * grid.cell_area)
    assert spectral_l2(forward_transform(psi), grid) == pytest.approx(direct, rel=1e-12)
