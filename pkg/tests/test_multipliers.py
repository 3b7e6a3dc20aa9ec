import numpy as np
import pytest

from weighted_multipliers.fields import SymbolEvaluationError, make_grid
from weighted_multipliers.multipliers import (KabSpec, build_multiplier, check_membership,
                                              make_constant, make_fractional, make_hilbert,
                                              make_kab_multiplier, make_miyachi,
                                              make_schrodinger, make_tensor_2d,
                                              multiplier_dim, r_variation, restrict_support)


def _sample_points(rng, n=1000, lo=0.05, hi=20.0):
    # log-uniform magnitudes, both signs; keeps clear of the origin
    mag = np.exp(rng.uniform(np.log(lo), np.log(hi), n))
    return mag * rng.choice([-1.0, 1.0], n)


def _five_point(f, x, h):
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


@pytest.mark.parametrize("m", [
    make_miyachi(2.0, 1.0), make_miyachi(0.5, 0.25), make_miyachi(-1.0, 0.5),
    make_fractional(0.5), make_schrodinger(0.25, 1.0), make_schrodinger(4.0, 1.0),
    make_hilbert(), make_constant(2.0),
], ids=lambda m: m.name + str(sorted(m.params.items())))
def test_derivative_matches_central_differences(m, rng):
    xi = _sample_points(rng)
    exact = m.derivative(xi)
    # step scaled to the local oscillation and distance to the origin
    freq = np.abs(exact) / np.maximum(np.abs(m.value(xi)), 1e-300)
    h = 1e-3 * np.minimum(np.abs(xi), 1.0 / np.maximum(freq, 1.0))
    fd = _five_point(m.value, xi, h)
    scale = np.maximum(np.abs(exact), 1e-3 * np.max(np.abs(exact)) + 1e-300)
    assert np.max(np.abs(fd - exact) / scale) <= 1e-6


def test_kab_derivative_matches_central_differences(rng):
    g = make_grid(1024, 32.0)
    m = make_kab_multiplier(KabSpec(3.0, 0.5), g)
    xi = rng.uniform(-10, 10, 200)
    h = 1e-5
    fd = (m.value(xi + h) - m.value(xi - h)) / (2 * h)
    exact = m.derivative(xi)
    assert np.max(np.abs(fd - exact)) <= 1e-6 * np.max(np.abs(exact))


def test_miyachi_closed_form():
    m = make_miyachi(2.0, 1.0)
    xi = np.array([0.0, 1.0, -3.0])
    exact = np.exp(1j * xi ** 2) / np.sqrt(1 + xi ** 2)
    np.testing.assert_allclose(m.value(xi), exact, rtol=1e-15)


def test_schrodinger_reduces_to_miyachi_at_unit_time(rng):
    xi = rng.uniform(-5, 5, 50)
    a = make_schrodinger(1.0, 1.0).value(xi)
    b = make_miyachi(2.0, 1.0).value(xi)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("t", [0.25, 4.0])
def test_schrodinger_is_a_rescaled_miyachi(t, rng):
    xi = rng.uniform(-5, 5, 50)
    a = make_schrodinger(t, 1.0).value(xi)
    b = t ** 0.5 * make_miyachi(2.0, 1.0).value(np.sqrt(t) * xi)
    np.testing.assert_allclose(a, b, rtol=1e-12)
    assert make_schrodinger(t, 1.0).lam == pytest.approx(t ** -0.5)


def test_fractional_rejects_origin():
    with pytest.raises(SymbolEvaluationError):
        make_fractional(0.5).value(np.array([0.0, 1.0]))
    np.testing.assert_allclose(make_fractional(0.5).value(np.array([4.0])), [0.5])


def test_hilbert_sign_convention():
    np.testing.assert_array_equal(make_hilbert().value(np.array([-2.0, 0.0, 3.0])),
                                  [1j, 0, -1j])


def test_restrict_support():
    m = restrict_support(make_miyachi(2.0, 1.0))
    v = m.value(np.array([0.5, -0.9, 1.0, 2.0]))
    assert v[0] == 0 and v[1] == 0 and v[2] != 0 and v[3] != 0
    esc = restrict_support(make_miyachi(-1.0, 0.5), 2.0)
    w = esc.value(np.array([1.0, 2.0, 3.0]))
    assert w[0] != 0 and w[1] != 0 and w[2] == 0


def test_tensor_commutes_with_axis_order(rng):
    m1, m2 = make_miyachi(2.0, 1.0), make_fractional(0.5)
    a = rng.uniform(0.1, 5, 17)[:, None]
    b = rng.uniform(0.1, 5, 13)[None, :]
    swapped = make_tensor_2d(m2, m1).value(b.T, a.T)
    np.testing.assert_array_equal(make_tensor_2d(m1, m2).value(a, b), swapped.T)


def test_tensor_partials(rng):
    m = make_tensor_2d(make_miyachi(2.0, 1.0), make_miyachi(2.0, 1.0))
    x1, x2 = rng.uniform(0.5, 3, 20), rng.uniform(0.5, 3, 20)
    h = 1e-6
    fd = (m.value(x1 + h, x2) - m.value(x1 - h, x2)) / (2 * h)
    np.testing.assert_allclose(m.partial(0, x1, x2), fd, rtol=1e-6, atol=1e-8)


def test_kab_derived_exponents():
    k = KabSpec(3.0, 0.5)
    assert (k.alpha, k.beta, k.p0) == (1.5, 0.5, 1.2)
    k = KabSpec(0.5, 0.75)
    assert (k.alpha, k.beta, k.p0) == (-1.0, 0.0, 2.0)
    # recomputing from (a, b) reproduces the stored values exactly
    for a, b in [(3.0, 0.5), (0.5, 0.75), (1.5, 0.6)]:
        k = KabSpec(a, b)
        assert k.alpha == a / (a - 1) and k.beta == (a / 2 + b - 1) / (a - 1)
        assert k.p0 == a / (a + b - 1)
    with pytest.raises(ValueError):
        KabSpec(1.0, 0.7)
    with pytest.raises(ValueError):
        KabSpec(3.0, 1.0)
    with pytest.raises(ValueError):
        KabSpec(0.5, 0.5)


def test_kab_table_matches_direct_sum():
    g = make_grid(512, 32.0)
    m = make_kab_multiplier(KabSpec(3.0, 0.5), g)
    xi = g.freqs()[:40]
    table = m.value(xi)
    direct = m.value(xi + 1e-7)  # off-grid path
    np.testing.assert_allclose(table, direct, atol=1e-4)


def test_kab_needs_room_for_the_cutoff():
    with pytest.raises(ValueError):
        make_kab_multiplier(KabSpec(3.0, 0.5), make_grid(64, 4.0))


def test_membership_consistent_for_miyachi():
    rep = check_membership(restrict_support(make_miyachi(2.0, 1.0)), 2.0, 1.0)
    assert rep.consistent and rep.support_ok
    assert abs(rep.growth_exponent) < 0.1


def test_membership_flags_too_small_beta():
    rep = check_membership(restrict_support(make_miyachi(2.0, 1.0)), 2.0, 0.5)
    assert not rep.consistent
    assert rep.growth_exponent == pytest.approx(-0.5, abs=0.1)


def test_membership_monotone_in_beta():
    m = restrict_support(make_miyachi(2.0, 1.0))
    g = [check_membership(m, 2.0, b).growth_exponent for b in (0.75, 1.0, 1.25)]
    assert g[0] <= g[1] <= g[2]


def test_membership_support_failure():
    rep = check_membership(make_miyachi(2.0, 1.0), 2.0, 1.0)
    assert not rep.support_ok


def test_r_variation_nonincreasing_in_r():
    m = make_miyachi(2.0, 1.0)
    vals = [r_variation(m, (1.0, 4.0), r, 200) for r in (1.0, 2.0, 4.0)]
    assert vals[0] >= vals[1] >= vals[2]


def test_r_variation_dynamic_programme_matches_enumeration():
    m = make_miyachi(2.0, 0.0)
    for r in (1.5, 2.0, 3.0):
        assert r_variation(m, (0.0, 3.0), r, 14) == pytest.approx(
            r_variation(m, (0.0, 3.0), r, 14, exact=True), rel=1e-12)


def test_r_variation_of_monotone_function():
    # a monotone real symbol has 1-variation equal to its total rise
    m = make_fractional(-1.0)  # |xi|
    assert r_variation(m, (1.0, 3.0), 1.0, 50) == pytest.approx(2.0, rel=1e-12)


def test_build_multiplier_by_name():
    g = make_grid(256, 16.0)
    m = build_multiplier({"name": "miyachi", "alpha": 2, "beta": 1, "restrict": True})
    assert m.value(np.array([0.5]))[0] == 0
    t = build_multiplier({"name": "tensor", "factors": [{"name": "miyachi", "alpha": 2,
                                                         "beta": 1}] * 2})
    assert t.dim == 2
    assert build_multiplier({"name": "kab", "a": 3, "b": 0.5}, g).name == "kab"
    with pytest.raises(ValueError):
        build_multiplier({"name": "kab", "a": 3, "b": 0.5})
    with pytest.raises(ValueError):
        build_multiplier({"name": "nope"})
    with pytest.raises(ValueError):
        build_multiplier({"name": "miyachi", "alpha": 2, "beta": 1, "gamma": 3})


def test_multiplier_dim_validates_without_sampling():
    assert multiplier_dim({"name": "kab", "a": 3, "b": 0.5}) == 1
    assert multiplier_dim({"name": "constant", "dim": 2}) == 2
    with pytest.raises(ValueError):
        multiplier_dim({"name": "kab", "a": 1, "b": 0.5})
    with pytest.raises(ValueError):
        multiplier_dim({"name": "tensor", "factors": [{"name": "hilbert"}]})
