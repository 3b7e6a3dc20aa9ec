import json
import os

import numpy as np
import pytest
from matplotlib import image as mpimg

from weighted_multipliers import runner
from weighted_multipliers.cli import main
from weighted_multipliers.reports import (BUNDLE_NAME, dumps_bundle, emit, loads_bundle,
                                          read_bundle)
from weighted_multipliers.runner import (CHECKS, ConfigError, ReportBundle, aggregate,
                                         default_config, run, validate_config)
from weighted_multipliers.verify import VerificationReport

ATOM = {"type": "atom_test", "id": "atoms_a2",
        "params": {"alpha": 2, "sweep": {"lo2": -6, "hi2": 0, "step": 3}, "per_octave": 4,
                   "refine": False}}
SWEEP12 = {"type": "lplq", "id": "sweep12",
           "params": {"alpha": 2, "beta": 0.5, "p": 2, "q": 2,
                      "sweep": {"lo2": -6, "hi2": 5}, "random_trials": 0, "per_octave": 8}}
SMALL = {"schema_version": 1, "seed": 0, "checks": [ATOM, SWEEP12]}


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_empty_config(tmp_path):
    code = main(["run", _write(tmp_path, {"schema_version": 1, "checks": []}),
                 "--output", str(tmp_path / "o")])
    assert code == 0
    b = read_bundle(tmp_path / "o" / BUNDLE_NAME)
    assert b.reports == [] and b.verdict == "pass"


def test_single_atom_check(tmp_path):
    b = run({"schema_version": 1, "checks": [ATOM]})
    assert len(b.reports) == 1
    rep = b.reports[0]
    assert rep.check_id == "atoms_a2" and rep.verdict == "pass"
    assert rep.scalars["l1_max_over_min"] <= 10


def test_repeat_runs_are_byte_identical(tmp_path):
    a = dumps_bundle(run(SMALL))
    b = dumps_bundle(run(SMALL))
    assert a == b


def test_workers_match_serial():
    serial = dumps_bundle(run(SMALL))
    parallel = dumps_bundle(run(dict(SMALL, workers=2)))
    assert serial == parallel


def test_emit_formats(tmp_path):
    bundle = run(SMALL)
    files = emit(bundle, tmp_path, ["table", "structured", "plot"])
    names = {f.name for f in files}
    assert BUNDLE_NAME in names
    csv = (tmp_path / "sweep12.sweep.csv").read_text().splitlines()
    assert csv[0] == "nu,ratio" and len(csv) == 13
    # shortest round-trip floats
    vals = [line.split(",") for line in csv[1:]]
    ratios = bundle.reports[1].tables["sweep"]["rows"]
    assert all(float(v[1]) == r[1] and v[1] == repr(r[1]) for v, r in zip(vals, ratios))
    slopes = (tmp_path / "sweep12.slopes.csv").read_text().splitlines()
    assert slopes[0] == "fit,slope,stderr"
    png = tmp_path / "sweep12.sweep.png"
    assert png.stat().st_size > 0
    img = mpimg.imread(png)
    assert img.ndim == 3 and img.shape[0] > 100


def test_structured_round_trip(tmp_path):
    bundle = run(SMALL)
    emit(bundle, tmp_path, ["structured"])
    back = read_bundle(tmp_path / BUNDLE_NAME)
    assert back.as_dict() == bundle.as_dict()
    assert dumps_bundle(loads_bundle(dumps_bundle(bundle))) == dumps_bundle(bundle)


def test_plots_are_reproducible(tmp_path):
    bundle = run(SMALL)
    emit(bundle, tmp_path / "a", ["plot"])
    emit(bundle, tmp_path / "b", ["plot"])
    assert (tmp_path / "a" / "sweep12.sweep.png").read_bytes() == \
        (tmp_path / "b" / "sweep12.sweep.png").read_bytes()


def test_fail_fast(tmp_path, monkeypatch, capsys):
    calls = []
    monkeypatch.setattr(runner, "atom_test", lambda *a, **k: calls.append(1))
    bad = {"type": "lplq", "id": "bad", "params": {"alpha": 2, "beta": 0.5, "p": 2}}
    cfg = {"schema_version": 1, "checks": [ATOM, SWEEP12, bad]}
    code = main(["run", _write(tmp_path, cfg), "--output", str(tmp_path / "o")])
    assert code == 1 and calls == []
    err = capsys.readouterr().err
    assert "checks[2].params.q" in err
    assert not (tmp_path / "o").exists()


@pytest.mark.parametrize("cfg,path", [
    ({"schema_version": 2}, "config.schema_version"),
    ({"schema_version": 1, "bogus": 1}, "config.bogus"),
    ({"schema_version": 1, "checks": [{"type": "nope"}]}, "checks[0].type"),
    ({"schema_version": 1, "checks": [{"type": "main1", "params": {
        "multiplier": {"name": "miyachi", "alpha": 2, "beta": 1},
        "grid": {"points": 100, "length": 8}}}]}, "checks[0].params.grid.points"),
    ({"schema_version": 1, "checks": [{"type": "weighted_constant", "params": {
        "multiplier": {"name": "miyachi", "alpha": 2, "beta": 1}, "chain": "HL * Q(1)",
        "grid": {"points": 64, "length": 8}}}]}, "checks[0].params.chain"),
    ({"schema_version": 1, "checks": [ATOM, dict(ATOM)]}, "checks[1].id"),
])
def test_config_errors_name_the_field(cfg, path):
    with pytest.raises(ConfigError) as exc:
        validate_config(cfg)
    assert exc.value.path == path


def test_unwritable_output(tmp_path):
    ro = tmp_path / "ro"
    ro.mkdir()
    ro.chmod(0o500)
    try:
        if os.access(ro, os.W_OK):
            pytest.skip("running with privileges that ignore directory permissions")
        code = main(["run", _write(tmp_path, {"schema_version": 1, "checks": []}),
                     "--output", str(ro / "sub")])
        assert code == 1
    finally:
        ro.chmod(0o700)


def test_output_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("WEIGHTED_MULTIPLIERS_OUTPUT", str(tmp_path / "env"))
    assert main(["run", _write(tmp_path, {"schema_version": 1, "checks": []})]) == 0
    assert (tmp_path / "env" / BUNDLE_NAME).exists()


def test_emit_subcommand(tmp_path, capsys):
    bundle = run(SMALL)
    p = tmp_path / BUNDLE_NAME
    p.write_text(dumps_bundle(bundle))
    assert main(["emit", str(p), "--formats", "table", "--output", str(tmp_path / "t")]) == 0
    assert (tmp_path / "t" / "sweep12.sweep.csv").exists()
    assert main(["emit", str(tmp_path / "missing.json")]) == 1


def test_list_checks(capsys):
    assert main(["list-checks"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in CHECKS)


def test_oracle_subcommand(capsys):
    assert main(["oracle", "eval_region", "--weights", "2", "--param", "alpha=-1",
                 "--param", "beta=-0.25"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["match"] and res["max_relative_gap"] <= 1e-12
    assert main(["oracle", "eval_hl", "--param", "k"]) == 1


def test_refine_override():
    cfg = validate_config(default_config(), refine=False)
    assert cfg.refine is False
    assert validate_config(default_config()).refine is True


def test_default_config_covers_every_deterministic_check():
    cfg = default_config()
    kinds = {c["type"] for c in cfg["checks"]}
    assert kinds == set(CHECKS) - {"linear_time", "weighted_constant"}
    assert len(validate_config(cfg).jobs) == len(cfg["checks"])


def test_exit_codes():
    def rep(v):
        r = VerificationReport("x")
        r.verdict = v
        return r
    assert aggregate([rep("pass"), rep("flagged")]) == "flagged"
    assert aggregate([rep("flagged"), rep("fail")]) == "fail"
    assert ReportBundle([], {}, "pass").exit_code == 0
    assert ReportBundle([], {}, "flagged").exit_code == 2
    assert ReportBundle([], {}, "fail").exit_code == 1


def test_timings_stay_out_of_the_bundle():
    t = {}
    b = run({"schema_version": 1, "checks": [ATOM]}, timings=t)
    assert set(t) == {"atoms_a2"} and t["atoms_a2"] > 0
    assert "time" not in json.dumps(b.as_dict())


def test_bundle_rejects_other_schema():
    with pytest.raises(ValueError):
        ReportBundle.from_dict({"schema_version": 99, "reports": []})


def test_weighted_constant_check_runs():
    cfg = {"schema_version": 1, "checks": [{"type": "weighted_constant", "id": "wc", "params": {
        "multiplier": {"name": "miyachi", "alpha": 2, "beta": 1, "restrict": True},
        "chain": "HL^6 * R(2, 1) * HL^4", "grid": {"points": 256, "length": 32},
        "weights": {"count": 2}, "refine": False}}]}
    b = run(cfg)
    assert b.reports[0].verdict == "pass"
    assert np.isfinite(b.reports[0].scalars["max_constant"])


def test_output_under_a_file_fails(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = main(["run", _write(tmp_path, {"schema_version": 1, "checks": []}),
                 "--output", str(blocker / "sub")])
    assert code == 1
    assert "error" in capsys.readouterr().err
