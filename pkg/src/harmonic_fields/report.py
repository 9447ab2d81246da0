"""Report serialization: JSON with exact/17-digit number strings, and Markdown."""
from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from . import scalar


def jsonable(x):
    """Recursively convert a report into JSON-ready values.

    Rationals become ``"p/q"`` strings and floats 17-significant-digit
    strings; Python ints (counts) and booleans are kept as JSON values.
    """
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Fraction):
        return scalar.fmt(x)
    if isinstance(x, (float, np.floating)):
        return scalar.fmt(float(x))
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, np.ndarray):
        if x.ndim == 0:
            return jsonable(x.item())
        return [jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return str(x)


def to_json(report: dict) -> str:
    return json.dumps(jsonable(report), indent=2, ensure_ascii=False) + "\n"


def _cell(v) -> str:
    v = jsonable(v)
    if isinstance(v, list):
        return "(" + ", ".join(_cell(x) for x in v) + ")"
    if v is None:
        return "-"
    return str(v)


def _matrix(m) -> list:
    m = jsonable(m)
    n = len(m[0])
    lines = ["| " + " | ".join(f"e{j + 1}" for j in range(n)) + " |", "|" + "---|" * n]
    lines += ["| " + " | ".join(str(v) for v in row) + " |" for row in m]
    return lines


def _table(rows: list, cols: list) -> list:
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    for r in rows:
        lines.append("| " + " | ".join(_cell(r.get(c)).replace("|", "\\|") for c in cols) + " |")
    return lines


def to_markdown(report: dict) -> str:
    out = [f"# Report: {report['mode']}", "", f"**Verdict: {report['verdict']}**", ""]
    if report.get("failures"):
        out += ["Failures: " + ", ".join(report["failures"]), ""]
    if "model" in report:
        m = report["model"]
        out += ["## Model", "", f"- name: {m['name']}", f"- kernel: {m['kernel']}",
                f"- Jacobi residual: {_cell(m['jacobi_residual'])}", f"- Milnor type: {m['milnor_type']}", ""]
        out += _table(m["structure_constants"], ["bracket", "component", "value"]) + [""]
    if "connection" in report:
        out += ["## Connection", "", "Nonzero <nabla_{e_i} e_j, e_k>:", ""]
        out += _table(report["connection"], ["nabla", "of", "component", "value"]) + [""]
    if "ricci" in report:
        out += ["## Ricci", ""] + _matrix(report["ricci"]) + ["", f"Scal = {_cell(report['scal'])}", ""]
    if "field" in report:
        f = report["field"]
        out += ["## Field", "", f"zeta = {_cell(f['zeta'])}", "", "phi (column j is phi(e_j)):", ""]
        out += _matrix(f["phi"]) + ["", "phi on the horizontal plane:", ""] + _matrix(f["phi_horizontal"]) + [""]
        out += _table([{"name": k, "value": v} for k, v in f["invariants"].items()], ["name", "value"]) + [""]
        out += _table([{"flag": k, "value": v} for k, v in f["flags"].items()], ["flag", "value"]) + [""]
    if "residuals" in report:
        out += ["## Residuals", ""]
        out += _table(report["residuals"], ["name", "value", "asserted", "passed", "anchor"]) + [""]
    if "classification" in report:
        c = report["classification"]
        keys = ["case", "reason", "lambda", "lambda1", "b", "norm2_phi", "scal", "emitted_brackets",
                "milnor_type", "emitted_milnor_type", "theorem_family", "compact_obstruction"]
        out += ["## Classification", ""]
        out += _table([{"quantity": k, "value": c.get(k)} for k in keys], ["quantity", "value"]) + [""]
        if c.get("alternate"):
            out += [f"Opposite sign of b: b = {_cell(c['alternate']['b'])}, brackets "
                    f"{_cell(c['alternate']['emitted_brackets'])}", ""]
        if c.get("reconstructed_ricci") is not None:
            out += ["Ricci of the emitted algebra:", ""] + _matrix(c["reconstructed_ricci"]) + [""]
        if c["checks"]:
            out += _table(c["checks"], ["name", "value", "passed"]) + [""]
        for w in c.get("warnings", []):
            out += [f"> warning: {w}", ""]
    if "catalog_facts" in report:
        out += ["## Expected facts", ""]
        out += _table(report["catalog_facts"], ["name", "basis", "field", "deviation", "passed"]) + [""]
    if "finder" in report:
        fd = report["finder"]
        out += ["## Harmonic directions", "", f"seeds: {fd['seeds']}, dropped: {fd['dropped']}, "
                f"symmetry: {_cell(fd['symmetry'])}", ""]
        rows = [dict(d, **{f"flag_{k}": v for k, v in d["flags"].items()}) for d in fd["directions"]]
        out += _table(rows, ["direction", "residual", "basin_count", "flag_totally_geodesic", "flag_killing",
                             "flag_divergence_free", "note"]) + [""]
    if "chart" in report:
        out += ["## Chart cross-validation", ""]
        out += _table([{"key": k, "value": v} for k, v in report["chart"].items()], ["key", "value"]) + [""]
    if "sweep" in report:
        s = report["sweep"]
        out += ["## Sweep", "", f"source: {s['source']}, seed: {s['seed']}, count: {s['count']}", ""]
        out += _table(s["rows"], ["alpha", "beta", "gamma", "case", "lambda", "lambda1", "b", "emitted_brackets",
                                  "milnor_type", "verdict"]) + [""]
    if "catalog" in report:
        for e in report["catalog"]:
            out += [f"## {e['name']}", "", e["description"], ""]
            out += _table(e["facts"], ["name", "basis", "field", "deviation", "passed"]) + [""]
    return "\n".join(out).rstrip() + "\n"
