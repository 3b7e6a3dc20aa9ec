"""The ten acceptance criteria at their stated tolerances.

The packaged default configuration is run twice (module fixture); most
criteria read their reports from the first run.  One PASS/FAIL line per
criterion is printed in the terminal summary.
"""
import numpy as np
import pytest

from conftest import ACCEPTANCE
from weighted_multipliers.reports import dumps_bundle
from weighted_multipliers.runner import default_config, run
from weighted_multipliers.suites import ORACLE_OPS, linear_time_benchmark
from weighted_multipliers.verify import sharp_beta, theorem_bounded

pytestmark = pytest.mark.slow

LPLQ_IDS = [f"lplq_{a}_{pq}_{s}" for pq in ("pq22", "pq2inf") for a in ("am1", "a0", "a2")
            for s in ("on", "lo", "hi")]
ATOM_IDS = ["atoms_am1", "atoms_a0p5", "atoms_a1", "atoms_a2"]
DOMINATION_IDS = ["main1_miyachi", "main1_fractional", "applSj_3_half", "applSj_half_3q",
                  "main3_tensor_miyachi"]


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    assert ok, f"criterion {n}: {detail}"


@pytest.fixture(scope="module")
def runs():
    cfg = default_config()
    t1, t2 = {}, {}
    b1 = run(cfg, timings=t1)
    b2 = run(cfg, timings=t2)
    return {"bundle": b1, "again": b2, "timings": t1,
            "reports": {r.check_id: r for r in b1.reports}}


def test_criterion_01_oracle_equivalence(runs):
    rep = runs["reports"]["oracles"]
    ops = {row[0] for row in rep.tables["oracles"]["rows"]}
    weights = {row[2] for row in rep.tables["oracles"]["rows"]}
    t = runs["timings"]["oracles"]
    gap = rep.scalars["max_relative_gap"]
    ok = (rep.verdict == "pass" and ops == set(ORACLE_OPS) and weights == {25}
          and gap <= 1e-12 and t <= 120)
    record(1, ok, f"{len(ops)} ops x 25 weights, max relative gap {gap:.2e}, {t:.1f} s")


def test_criterion_02_linear_time():
    rep = linear_time_benchmark(small=2 ** 15, large=2 ** 20, radii=80)
    s = rep.scalars
    ok = rep.verdict == "pass" and s["time_ratio"] <= 40 and s["radii_large"] == 80
    record(2, ok, f"t(2^20)/t(2^15) = {s['time_ratio']:.1f} (limit 40), "
                  f"{s['radii_large']} radii")


def test_criterion_03_sharp_line(runs):
    reps = runs["reports"]
    bad = []
    for cid in LPLQ_IDS:
        rep = reps[cid]
        a, b = rep.inputs["alpha"], rep.inputs["beta"]
        p, q = float(rep.inputs["p"]), float(rep.inputs["q"])
        predicted = theorem_bounded(a, b, p, q)
        measured = rep.scalars["measured"] == "bounded"
        on_line = abs(b - sharp_beta(a, p, q)) < 1e-12
        if measured != predicted or rep.verdict != "pass":
            bad.append(f"{cid} verdict")
        lo, hi = rep.slopes["small_nu"], rep.slopes["large_nu"]
        growth = max(float(lo["growth"]), float(hi["growth"]))
        if predicted and not growth <= 0.05:
            bad.append(f"{cid} grows")
        if not predicted and not growth > 0.05:
            bad.append(f"{cid} flat")
        if cid.endswith("_on"):
            # alpha != 0 fixes a scale (r <= 1 or r >= 1), so the ratio decays at the
            # end where the region is cut off and plateaus at the scale-free end
            flat = [abs(float(e["slope"])) <= 0.05 for e in (lo, hi)]
            if not on_line or not any(flat):
                bad.append(f"{cid} plateau")
            if rep.inputs["alpha"] == 0 and not all(flat):
                bad.append(f"{cid} plateau at both ends")
        nu = rep.inputs["sweep"]["values"]
        if (min(nu), max(nu)) != (2.0 ** -10, 2.0 ** 10):
            bad.append(f"{cid} sweep range")
    t = sum(runs["timings"][c] for c in LPLQ_IDS)
    ok = not bad and t <= 300
    record(3, ok, f"{len(LPLQ_IDS)} cases, mismatches {bad or 'none'}, {t:.1f} s")


def test_criterion_04_atoms(runs):
    parts = []
    ok = True
    for cid in ATOM_IDS:
        rep = runs["reports"][cid]
        s = rep.scalars
        nu = rep.inputs["sweep"]["values"]
        decades = np.log10(max(nu) / min(nu))
        good = (rep.verdict == "pass" and s["l1_max_over_min"] <= 10 and decades >= 4
                and s["c_corrected_change"] <= 0.2 and s["c_literal_change"] <= 0.2)
        ok = ok and good
        parts.append(f"a={rep.inputs['alpha']}: max/min {s['l1_max_over_min']:.2f}, "
                     f"c change {max(s['c_corrected_change'], s['c_literal_change']):.1%}")
    record(4, ok, "; ".join(parts))


def test_criterion_05_lattice(runs):
    s = runs["reports"]["lattice"].scalars
    ok = (runs["reports"]["lattice"].verdict == "pass"
          and s["partition_error_1d"] <= 1e-10 and s["partition_error_2d"] <= 1e-10
          and s["residual_1d_256"] <= 1e-6 and s["residual_2d_256"] <= 1e-5
          and s["rate_ok_1d"] and s["rate_ok_2d"] and s["halfline_hilbert_residual"] <= 1e-10)
    record(5, ok, f"partition {max(s['partition_error_1d'], s['partition_error_2d']):.1e}, "
                  f"residuals {s['residual_1d_256']:.1e} / {s['residual_2d_256']:.1e}, "
                  f"halfline {s['halfline_hilbert_residual']:.1e}")


def test_criterion_06_weighted_domination(runs):
    parts = []
    ok = True
    for cid in DOMINATION_IDS:
        rep = runs["reports"][cid]
        rows = rep.tables["constants"]["rows"]
        vals = np.array([r[2:4] for r in rows], float)
        change = rep.scalars["max_relative_change"]
        top = max(rep.inputs["grid"]["points"]) * 2
        want_top = 128 if cid.startswith("main3") else 4096
        good = (rep.verdict == "pass" and len(rows) == 10 and np.all(np.isfinite(vals))
                and change <= 0.2 and top == want_top)
        ok = ok and good
        parts.append(f"{cid} {change:.1%}")
    t = sum(runs["timings"][c] for c in DOMINATION_IDS)
    ok = ok and t <= 600
    record(6, ok, "max refinement change " + ", ".join(parts) + f"; {t:.0f} s")


def test_criterion_07_scaling(runs):
    rep = runs["reports"]["scaling_schrodinger"]
    spread = rep.scalars["max_spread"]
    ok = rep.verdict == "pass" and rep.inputs["t"] == [0.25, 1.0, 4.0] and spread <= 4
    record(7, ok, f"largest per-weight spread across t = {spread:.3f} (limit 4)")


def test_criterion_08_structural(runs):
    h = runs["reports"]["holder"]
    s = runs["reports"]["stilldom"]
    a = runs["reports"]["arr_domination"]
    ok = (h.verdict == s.verdict == a.verdict == "pass"
          and len(h.inputs["weights"]) == 50 and len(s.inputs["weights"]) == 50
          and abs(2 * h.inputs["s"] * h.inputs["beta"] - h.inputs["alpha"]) < 1e-12
          and h.scalars["c"] <= h.scalars["expected_bound"] * (1 + 1e-12)
          and s.scalars["relative_change"] <= 0.2 and np.isfinite(a.scalars["c"]))
    record(8, ok, f"holder c {h.scalars['c']:.3f} <= {h.scalars['expected_bound']:.3f}; "
                  f"w2/w3 {s.scalars['c_grid']:.3f} ({s.scalars['relative_change']:.1%} "
                  f"change); arr c {a.scalars['c']:.3f}")


def test_criterion_09_duality(runs):
    rep = runs["reports"]["duality"]
    s = rep.scalars
    bound = np.sqrt(s["chain_2_norm"]) * 1.25
    ok = rep.verdict == "pass" and s["multiplier_4_norm"] <= bound
    record(9, ok, f"||T_m||_4->4 = {s['multiplier_4_norm']:.3f} <= {bound:.3f}")


def test_criterion_10_determinism(runs):
    a = dumps_bundle(runs["bundle"])
    b = dumps_bundle(runs["again"])
    ok = a == b and len(runs["bundle"].reports) == len(default_config()["checks"])
    record(10, ok, f"two default runs, {len(a)} bytes each, identical: {a == b}")


def test_default_run_verdict(runs):
    assert runs["bundle"].verdict == "pass"
