import numpy as np
import pytest
from scipy import integrate

from weighted_multipliers.bumps import averaging_bump, averaging_bump_cdf, smooth_plateau
from weighted_multipliers.fields import SampledField, make_grid
from weighted_multipliers.lattice import (ORTHOGONAL_SEPARATION, BumpSuite,
                                          FourierSupportError, LatticeResolutionError,
                                          apply_arr, apply_sk, build_lattice, cell_symbol,
                                          chain_ratio, forward_square_check,
                                          orthogonality_defect, representation_residual,
                                          reverse_square_check, sk_stack, weight_chain)
from weighted_multipliers.multipliers import make_miyachi, make_tensor_2d, restrict_support
from weighted_multipliers.weights import lognormal_weight, random_signal


def _partition_error(lat):
    total = sum(cell_symbol(lat, k) for k in lat.cells)
    return float(np.max(np.abs(total[lat.band_mask()] - 1)))


@pytest.mark.parametrize("R,alpha,symmetric", [(2.0, 2.0, True), (3.0, 0.5, False),
                                               (0.5, -1.0, True), (3.0, 0.0, True)])
def test_partition_of_unity_1d(R, alpha, symmetric):
    lat = build_lattice(R, alpha, grid=make_grid(1024, 64.0), symmetric=symmetric)
    assert _partition_error(lat) <= 1e-10


def test_partition_of_unity_2d():
    lat = build_lattice((1.5, 1.8), (2.0, 0.5), grid=make_grid(64, 8.0, dim=2), symmetric=True)
    assert _partition_error(lat) <= 1e-10


def test_bump_suite_properties():
    s = BumpSuite()
    eta = np.linspace(-2, 2, 4001)
    psi = s.psi_hat(eta)
    assert np.all(psi[np.abs(eta) >= 0.75] == 0)
    assert np.all(psi >= 0) and np.all(psi <= 1)
    total = sum(s.psi_hat(eta + j) for j in range(-3, 4))
    np.testing.assert_allclose(total, 1, atol=1e-15, rtol=0)
    assert np.all(s.theta(np.linspace(-1, 1, 201)) >= 0.5)
    assert np.all(s.phi_hat(np.linspace(-1, 1, 11)) == 1)
    assert np.all(s.phi_hat(np.array([2.0, -2.5])) == 0)
    with pytest.raises(ValueError):
        BumpSuite(phi_radius=0.6)
    with pytest.raises(ValueError):
        BumpSuite(theta_dilation=0.5)


@pytest.mark.parametrize("eta", [0.0, 0.1, 0.25, 0.39])
def test_theta_transform_matches_quadrature(eta):
    # independent check of the closed form for the transform of sinc(x/D)^2
    s = BumpSuite()
    val, _ = integrate.quad(lambda x: s.theta(x) * np.cos(2 * np.pi * x * eta), -400, 400,
                            limit=4000)
    assert val == pytest.approx(float(s.theta_hat(eta)), abs=2e-3)


def test_averaging_bump_has_unit_mass():
    mass, _ = integrate.quad(averaging_bump, -2.0, 2.0, limit=200)
    assert mass == pytest.approx(1.0, abs=1e-10)
    assert averaging_bump_cdf(np.array(2.0)) == pytest.approx(1.0, abs=1e-12)
    assert np.all(averaging_bump(np.linspace(-0.99, 0.99, 51)) > 0)


def test_smooth_plateau():
    x = np.array([0.0, 1.0, 1.5, 2.0, 3.0])
    v = smooth_plateau(x, 1.0, 2.0)
    assert v[0] == 1 and v[1] == 1 and v[3] == 0 and v[4] == 0 and 0 < v[2] < 1


def test_orthogonality_of_far_cells():
    g = make_grid(1024, 64.0)
    lat = build_lattice(2.0, 2.0, grid=g, symmetric=True)
    f = random_signal(g, 3, band=(2.0, 4.0))
    _, _, w3 = weight_chain(lognormal_weight(g, 1, corr_length=2.0), lat)
    assert ORTHOGONAL_SEPARATION == 2
    assert orthogonality_defect(f, w3, lat) <= 1e-10
    # adjacent cells overlap, so the same measure is visibly nonzero there
    assert orthogonality_defect(f, w3, lat, separation=1) > 1e-6


def test_weight_chain_ordering(rng):
    g = make_grid(512, 32.0)
    lat = build_lattice(2.0, 2.0, grid=g, symmetric=True)
    w = SampledField(g, rng.lognormal(0, 1, 512), "weight")
    w1, w2, w3 = weight_chain(w, lat)
    assert np.all(w2.values >= w1.values)
    assert np.all(w3.values >= 0)


def test_chain_ratio_is_bounded_and_stable():
    # closed-form inputs, so both grids sample the same functions
    vals = []
    for n in (512, 1024):
        g = make_grid(n, 32.0)
        x = g.coords()
        f = SampledField(g, np.exp(-x ** 2 / 8) * np.exp(2j * np.pi * 3 * x))
        w = SampledField(g, 1 + 0.9 * np.cos(2 * np.pi * x / 5) + 4 * np.exp(-4 * (x - 1) ** 2),
                         "weight")
        lat = build_lattice(2.0, 2.0, grid=g, symmetric=True)
        vals.append(chain_ratio(f, w, lat))
    assert all(np.isfinite(vals)) and 0 < vals[0] < 10
    assert abs(vals[1] / vals[0] - 1) <= 0.2


def test_square_function_checks():
    g = make_grid(512, 32.0)
    lat = build_lattice(2.0, 2.0, grid=g, symmetric=True)
    f = random_signal(g, 1, band=(2.0, 4.0))
    w = lognormal_weight(g, 4, corr_length=1.0)
    assert 0 < forward_square_check(f, w, lat) <= 1.0 + 1e-12
    assert 0 < reverse_square_check(f, w, lat) < 10
    assert 0 < reverse_square_check(f, w, lat, sharp=True) < 10
    wide = random_signal(g, 1)
    with pytest.raises(FourierSupportError):
        reverse_square_check(wide, w, lat)


def test_sk_stack_sums_to_band_part():
    g = make_grid(512, 32.0)
    lat = build_lattice(2.0, 2.0, grid=g, symmetric=True)
    f = random_signal(g, 5, band=(2.0, 4.0))
    S = sk_stack(f, lat)
    np.testing.assert_allclose(S.sum(axis=0), f.values, atol=1e-12 * np.abs(f.values).max())
    k = lat.cells[3]
    np.testing.assert_allclose(S[3], apply_sk(f, lat, k).values, atol=1e-15)


def test_arr_of_constant_weight():
    g = make_grid(256, 16.0)
    lat = build_lattice(2.0, 2.0, grid=g, symmetric=True)
    out = apply_arr(SampledField(g, np.full(256, 2.5), "weight"), lat)
    np.testing.assert_allclose(out.values, 2.5, rtol=1e-14)


def test_resolution_and_admissibility_errors():
    with pytest.raises(LatticeResolutionError):
        build_lattice(8.0, 2.0, grid=make_grid(256, 4.0))
    with pytest.raises(ValueError):
        build_lattice(0.5, 2.0, grid=make_grid(256, 16.0))
    with pytest.raises(ValueError):
        build_lattice(2.0, 2.0)


def test_representation_residual_converges():
    g = make_grid(1024, 64.0)
    lat = build_lattice(2.0, 2.0, grid=g, symmetric=True)
    m = restrict_support(make_miyachi(2.0, 1.0))
    f = random_signal(g, 0, band=(2.0, 4.0))
    k = [c for c in lat.cells if c[0] > 0][len(lat.cells) // 4]
    res = [representation_residual(m, f, lat, k, quad_points=q) for q in (64, 128, 256)]
    assert res[2] <= 1e-6
    # at least second order until rounding
    assert res[1] <= res[0] / 4 and (res[2] <= res[1] / 4 or res[2] <= 1e-12)


def test_representation_residual_2d():
    g = make_grid(64, 8.0, dim=2)
    lat = build_lattice(1.5, 2.0, grid=g, symmetric=True)
    m1 = make_miyachi(2.0, 1.0)
    f = random_signal(g, 0, band=((1.5, 3.0), (1.5, 3.0)))
    k = [c for c in lat.cells if np.all(c > 0)][0]
    assert representation_residual(make_tensor_2d(m1, m1), f, lat, k, quad_points=64) <= 1e-5


def test_representation_rejects_support_edge():
    g = make_grid(1024, 64.0)
    lat = build_lattice(1.0, 2.0, grid=g, symmetric=True)
    m = restrict_support(make_miyachi(2.0, 1.0), 1.2)
    f = random_signal(g, 0, band=(1.0, 2.0))
    k = [c for c in lat.cells if c[0] > 0][0]
    with pytest.raises(ValueError):
        representation_residual(m, f, lat, k)
