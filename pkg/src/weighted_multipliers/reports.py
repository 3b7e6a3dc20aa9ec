"""Report persistence: CSV tables, the JSON bundle and log-log plots.

Numbers are written in their shortest round-trip decimal form, so the
text files reproduce the binary values exactly and identical runs give
identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path

from .runner import ReportBundle

__all__ = ["FORMATS", "BUNDLE_NAME", "dumps_bundle", "loads_bundle", "emit", "write_bundle",
           "read_bundle"]

FORMATS = ("table", "structured", "plot")
BUNDLE_NAME = "bundle.json"


def dumps_bundle(bundle: ReportBundle) -> str:
    return json.dumps(bundle.as_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def loads_bundle(text: str) -> ReportBundle:
    return ReportBundle.from_dict(json.loads(text))


def read_bundle(path) -> ReportBundle:
    return loads_bundle(Path(path).read_text(encoding="utf-8"))


def _ensure_dir(out) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    return out


def write_bundle(bundle: ReportBundle, out) -> Path:
    path = _ensure_dir(out) / BUNDLE_NAME
    path.write_text(dumps_bundle(bundle), encoding="utf-8")
    return path


def _cell(v):
    # json floats are already the shortest round-trip repr
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _numeric(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _plot_table(rep: dict, name: str, table: dict, path: Path) -> bool:
    rows = table["rows"]
    if len(rows) < 2 or not all(_numeric(r[0]) and r[0] > 0 for r in rows):
        return False
    cols = [j for j in range(1, len(table["columns"]))
            if all(_numeric(r[j]) and r[j] > 0 for r in rows)]
    if not cols:
        return False
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    x = [r[0] for r in rows]
    for j in cols:
        ax.loglog(x, [r[j] for r in rows], "o-", ms=3, label=table["columns"][j])
    ax.set_xlabel(table["columns"][0])
    ax.set_title(f"{rep['check_id']}: {name}")
    notes = [f"{k}: slope {v['slope']:.3g} +/- {v['stderr']:.2g}"
             for k, v in sorted(rep.get("slopes", {}).items())
             if isinstance(v, dict) and _numeric(v.get("slope")) and _numeric(v.get("stderr"))]
    if notes:
        ax.text(0.02, 0.02, "\n".join(notes), transform=ax.transAxes, fontsize=8,
                va="bottom")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return True


def emit(bundle: ReportBundle, out, formats=FORMATS) -> list[Path]:
    """Write the requested formats under ``out``; returns the files written.

    ``table``: one CSV per report table plus ``<check>.slopes.csv`` when a
    report has fitted slopes.  ``structured``: the single JSON bundle.
    ``plot``: one PNG per table whose first column is a positive sweep.
    """
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown formats {sorted(unknown)}; expected {FORMATS}")
    out = _ensure_dir(out)
    written = []
    if "structured" in formats:
        written.append(write_bundle(bundle, out))
    data = bundle.as_dict()["reports"]
    for rep in data:
        cid = rep["check_id"]
        for name, table in sorted(rep["tables"].items()):
            if "table" in formats:
                p = out / f"{cid}.{name}.csv"
                p.write_text(_csv_text(table["columns"], table["rows"]), encoding="utf-8")
                written.append(p)
            if "plot" in formats:
                p = out / f"{cid}.{name}.png"
                if _plot_table(rep, name, table, p):
                    written.append(p)
        slopes = [[k, v.get("slope"), v.get("stderr")] for k, v in sorted(rep["slopes"].items())
                  if isinstance(v, dict)]
        if slopes and "table" in formats:
            p = out / f"{cid}.slopes.csv"
            p.write_text(_csv_text(["fit", "slope", "stderr"], slopes), encoding="utf-8")
            written.append(p)
    return written
