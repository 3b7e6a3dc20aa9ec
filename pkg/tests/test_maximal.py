import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weighted_multipliers.fields import SampledField, UnsupportedDimensionError, make_grid
from weighted_multipliers.maximal import (HL, ConfigurationError, Fractional, Region,
                                          Region2D, RegionSpec, Regularized, Strong2D,
                                          eval_chain, eval_fractional, eval_hl, eval_region,
                                          eval_region_2d, eval_regularized, eval_strong_2d,
                                          parse_chain, radius_grid, reach_cells,
                                          regularized_domination_constant, window_averages)
from weighted_multipliers.suites import oracle_compare

from conftest import random_weight

REGIONS = [RegionSpec(2.0), RegionSpec(0.5), RegionSpec(0.0), RegionSpec(-1.0),
           RegionSpec(2.0, lam=2.0)]


@pytest.mark.parametrize("op,params", [
    ("eval_hl", {"k": 1}), ("eval_hl", {"k": 2}), ("eval_fractional", {"beta": -0.25}),
    ("eval_region", {"alpha": 2.0, "beta": 0.5}), ("eval_region", {"alpha": -1.0, "beta": -0.25}),
    ("eval_region", {"alpha": 0.5, "beta": 0.1, "lam": 0.5}),
    ("eval_region_2d", {}), ("eval_strong_2d", {}), ("apply_arr", {}),
])
def test_oracle_equivalence_small(op, params):
    res = oracle_compare(op, weights=3, params=params, seed=7)
    assert res["max_relative_gap"] <= 1e-12


def test_constant_weight_closed_forms():
    g = make_grid(128, 16.0)
    w = SampledField(g, np.full(128, 3.0), "weight")
    np.testing.assert_allclose(eval_hl(w, 3).values, 3.0, rtol=1e-14)
    # sup_r r^(2 beta) c over [h/2, L/4] is attained at r = L/4
    np.testing.assert_allclose(eval_fractional(w, 0.25).values, 3.0 * 4.0 ** 0.5, rtol=1e-14)
    np.testing.assert_allclose(eval_fractional(w, -0.25).values,
                               3.0 * (g.spacing[0] / 2) ** -0.5, rtol=1e-14)
    # approach region alpha = 2 caps r at 1
    np.testing.assert_allclose(eval_region(w, RegionSpec(2.0), 1.0).values, 3.0, rtol=1e-14)


def test_single_spike_hl():
    # a unit spike in one cell: the best window just covers it
    g = make_grid(256, 32.0)
    h = g.spacing[0]
    v = np.zeros(256)
    v[128] = 1.0
    out = eval_hl(SampledField(g, v, "weight")).values
    assert out[128] == pytest.approx(1.0, rel=1e-14)
    # at distance d cells the window of radius (d + 1/2) h is optimal,
    # so the value is h / (2 (d + 1/2) h) up to the net's rounding
    for d in (3, 10, 40):
        exact = 1.0 / (2 * d + 1)
        assert exact / 2 ** 0.25 <= out[128 + d] <= exact * (1 + 1e-12)


def test_window_average_of_linear_function():
    g = make_grid(64, 8.0)
    x = g.coords()
    vals = 1.0 + 0.0 * x
    np.testing.assert_allclose(window_averages(vals, g.spacing[0], 0.7), 1.0, rtol=1e-14)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 16), ridx=st.integers(0, len(REGIONS) - 1),
       beta=st.floats(-0.5, 1.0))
def test_monotone_in_the_weight(seed, ridx, beta):
    rng = np.random.default_rng(seed)
    g = make_grid(128, 16.0)
    w = rng.lognormal(0, 1, 128)
    w2 = w + rng.uniform(0, 1, 128)
    a = eval_region(SampledField(g, w, "weight"), REGIONS[ridx], beta).values
    b = eval_region(SampledField(g, w2, "weight"), REGIONS[ridx], beta).values
    assert np.all(a <= b)


def test_monotone_2d(rng):
    g = make_grid(16, 4.0, dim=2)
    w = rng.lognormal(0, 1, g.shape)
    w2 = w * 1.5
    regs = (RegionSpec(2.0), RegionSpec(-1.0))
    a = eval_region_2d(SampledField(g, w, "weight"), regs, (0.5, -0.25)).values
    b = eval_region_2d(SampledField(g, w2, "weight"), regs, (0.5, -0.25)).values
    assert np.all(a <= b)
    assert np.all(eval_strong_2d(SampledField(g, w, "weight")).values
                  <= eval_strong_2d(SampledField(g, w2, "weight")).values)


@pytest.mark.parametrize("region", REGIONS)
def test_homogeneity(region, rng):
    g = make_grid(256, 16.0)
    w = rng.lognormal(0, 1, 256)
    base = eval_region(SampledField(g, w, "weight"), region, 0.3).values
    # powers of two scale every intermediate exactly
    for c in (0.25, 8.0):
        out = eval_region(SampledField(g, c * w, "weight"), region, 0.3).values
        np.testing.assert_array_equal(out, c * base)
    out = eval_region(SampledField(g, 3.7 * w, "weight"), region, 0.3).values
    np.testing.assert_allclose(out, 3.7 * base, rtol=1e-14)


@pytest.mark.parametrize("region", REGIONS)
def test_translation_covariance(region, rng):
    g = make_grid(256, 16.0)
    w = rng.lognormal(0, 1, 256)
    base = eval_region(SampledField(g, w, "weight"), region, 0.3).values
    for s in (1, 17, 128):
        out = eval_region(SampledField(g, np.roll(w, s), "weight"), region, 0.3).values
        np.testing.assert_allclose(out, np.roll(base, s), rtol=1e-13, atol=0)


def test_translation_covariance_of_integer_weights(rng):
    # with integer-valued weights every window sum is exact, so shifts commute bitwise
    g = make_grid(256, 16.0)
    w = rng.integers(0, 50, 256).astype(float)
    region = RegionSpec(-1.0)
    base = eval_region(SampledField(g, w, "weight"), region, 0.0).values
    out = eval_region(SampledField(g, np.roll(w, 31), "weight"), region, 0.0).values
    np.testing.assert_array_equal(out, np.roll(base, 31))


@pytest.mark.parametrize("region", REGIONS[:4])
def test_radius_net_refinement(region, rng):
    g = make_grid(512, 32.0)
    w = SampledField(g, rng.lognormal(0, 1.5, 512), "weight")
    coarse = eval_region(w, region, 0.25).values
    ratio = region.r_ratio
    fine_ratio = 1 + (ratio - 1) / 2
    fine_region = RegionSpec(region.alpha, region.lam, r_ratio=fine_ratio)
    fine = eval_region(w, fine_region, 0.25).values
    assert np.all(fine <= coarse * ratio * (1 + 1e-12))
    assert np.all(coarse <= fine * ratio * (1 + 1e-12))


def test_scaled_region_candidate_set():
    # lam = 2, alpha = 2: radii r <= 1/2 and reach r^-1 / 4
    reg = RegionSpec(2.0, lam=2.0)
    g = make_grid(1024, 64.0)
    h = g.spacing[0]
    radii = radius_grid(reg, h, 64.0)
    assert radii.max() == pytest.approx(0.5, rel=1e-15)
    assert radii.min() == pytest.approx(h / 2)
    assert np.all(np.diff(np.log(radii)) <= np.log(reg.r_ratio) + 1e-12)
    np.testing.assert_allclose(reg.reach(radii), 0.25 / radii, rtol=1e-15)
    d = reach_cells(reg, radii, h)
    np.testing.assert_array_equal(d, np.ceil(0.25 / radii / h - 1e-9).astype(int))
    assert np.all(d * h >= 0.25 / radii * (1 - 1e-9))


def test_escape_region_radius_range():
    reg = RegionSpec(-1.0)
    radii = radius_grid(reg, 0.0625, 64.0)
    assert radii.min() == 1.0 and radii.max() == pytest.approx(16.0)


def test_empty_region_is_an_error():
    with pytest.raises(ConfigurationError):
        radius_grid(RegionSpec(2.0, r_min=2.0), 0.1, 64.0)
    with pytest.raises(ConfigurationError):
        RegionSpec(1.0, lam=0.0)


def test_regularized_dominates_region(rng):
    g = make_grid(256, 16.0)
    w = SampledField(g, rng.lognormal(0, 1, 256), "weight")
    reg = RegionSpec(1.0)
    c = regularized_domination_constant(256, 16.0, reg)
    assert np.isfinite(c)
    a = eval_region(w, reg, 0.5).values
    b = eval_regularized(w, reg, 0.5).values
    assert np.all(a <= c * b * (1 + 1e-12))


def test_regularized_accepts_signed_input():
    g = make_grid(128, 16.0)
    x = g.coords()
    f = SampledField(g, np.sign(x) * (np.abs(x) < 1), "signal")
    out = eval_regularized(f, RegionSpec(2.0), 1.0).values
    assert np.all(out >= 0) and out.max() > 0


def test_dimension_checks(grid2d):
    w2 = SampledField(grid2d, np.ones(grid2d.shape), "weight")
    with pytest.raises(UnsupportedDimensionError):
        eval_region(w2, RegionSpec(2.0), 0.5)
    with pytest.raises(ConfigurationError):
        eval_chain(w2, [HL(1)])
    with pytest.raises(ConfigurationError):
        parse_chain("HL * S")
    with pytest.raises(ValueError):
        eval_hl(SampledField(make_grid(8, 1.0), np.ones(8)), 1)


def test_chain_applies_right_to_left(rng):
    g = make_grid(256, 16.0)
    w = SampledField(g, rng.lognormal(0, 1, 256), "weight")
    reg = RegionSpec(2.0)
    out = eval_chain(w, [HL(2), Region(reg, 1.0)])
    manual = eval_hl(eval_region(w, reg, 1.0), 2)
    np.testing.assert_array_equal(out.values, manual.values)
    other = eval_chain(w, [Region(reg, 1.0), HL(2)])
    assert not np.array_equal(out.values, other.values)


def test_parse_chain_grammar():
    c = parse_chain("HL^6 * R(2, 1) * HL^4")
    assert [type(s) for s in c.stages] == [HL, Region, HL]
    assert c.stages[0].power == 6 and c.stages[2].power == 4
    assert c.stages[1].region.alpha == 2.0 and c.stages[1].beta == 1.0
    c = parse_chain("S^9 * R2(3/2, 1/2, 2; -1, 0) * S^7")
    r2 = c.stages[1]
    assert isinstance(r2, Region2D) and c.dim == 2
    assert r2.regions[0].lam == 2.0 and r2.betas == (0.5, 0.0)
    assert isinstance(parse_chain("Reg(1, 1/2)").stages[0], Regularized)
    assert isinstance(parse_chain("F(-1/4)").stages[0], Fractional)
    assert isinstance(parse_chain("S").stages[0], Strong2D)
    assert parse_chain("  ").stages == ()


@pytest.mark.parametrize("bad", ["HL(2)", "R^2(1, 1)", "R(1)", "Q(1, 2)", "F(1, 2)",
                                 "R2(1, 1)", "R(a, 1)", "R(1, 1/0)"])
def test_parse_chain_rejects(bad):
    with pytest.raises(ConfigurationError):
        parse_chain(bad)
