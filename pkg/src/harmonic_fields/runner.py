"""Execute a RunConfig and assemble the report."""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import catalog, chart as chartmod, scalar
from .classify import ClassificationResult, classify, milnor_type
from .config import RunConfig
from .field import FieldAnalysis, FieldError, ResidualMap, axis, unit_field
from .finder import FinderConfig, find_all
from .frame import FrameModel, ModelError, _is_rational_input, metric_defect, riemann_symmetry_defects, \
    torsion_defect

PASS, FAIL = "pass", "fail"


class ConfigError(ValueError):
    """Raised for inputs that parse but do not describe a usable model or field."""


# --- building blocks from the config -----------------------------------------

def _number(v):
    if isinstance(v, bool):
        raise ConfigError("booleans are not numbers")
    if isinstance(v, float):
        return v
    if _is_rational_input(v):
        return scalar.to_fraction(v)
    return float(v)


def build_frame(spec) -> tuple[FrameModel | None, "catalog.CatalogInstance | None"]:
    try:
        if spec.type == "unimodular":
            vals = [_number(spec.alpha), _number(spec.beta), _number(spec.gamma)]
            if any(isinstance(v, float) for v in vals):
                vals = [float(v) for v in vals]
            return FrameModel.unimodular(*vals), None
        if spec.type == "frame":
            flat = [_number(x) for r in spec.c for row in r for x in row]
            arr = np.array(flat, dtype=object).reshape(3, 3, 3)
            arr = scalar.float_array(arr) if any(isinstance(x, float) for x in flat) else scalar.exact_array(arr)
            return FrameModel(arr, name=spec.name), None
        if spec.type == "catalog":
            inst = catalog.get(spec.name, spec.params)
            return inst.frame, inst
    except (ModelError, catalog.CatalogError, chartmod.ChartError) as exc:
        raise ConfigError(str(exc)) from exc
    return None, None


CHARTS = {
    "hyperbolic-torus": (lambda p: chartmod.hyperbolic_torus_chart(p.get("A", [[2, 1], [1, 1]]), p.get("field", "e3")),
                         None),
    "flat-torus": (lambda p: chartmod.flat_torus_chart(float(_number(p.get("a", 1))), p.get("field", "e3")), None),
    "round-sphere": (lambda p: chartmod.round_sphere_chart(), 2.0 * np.eye(3)),
    "euclidean": (lambda p: chartmod.euclidean_chart(float(_number(p.get("scale", 1)))), None),
}


def build_chart(spec):
    name = spec.name
    if name not in CHARTS:
        raise ConfigError(f"unknown chart {name!r}; known: {', '.join(CHARTS)}")
    builder, expected = CHARTS[name]
    try:
        return builder(spec.params), expected
    except (chartmod.ChartError, KeyError, ValueError) as exc:
        raise ConfigError(f"chart {name}: {exc}") from exc


def build_field(spec, kernel: str):
    try:
        if isinstance(spec, str):
            return axis(int(spec[1]) - 1, kernel)
        vals = [_number(x) for x in spec]
        if kernel == scalar.FLOAT or any(isinstance(v, float) for v in vals):
            return unit_field([float(v) for v in vals], scalar.FLOAT)
        return unit_field(vals)
    except FieldError as exc:
        raise ConfigError(str(exc)) from exc


# --- report sections ------------------------------------------------------------

def _brackets(c) -> list:
    out = []
    for i in range(3):
        for j in range(i + 1, 3):
            for k in range(3):
                if c[i, j, k] != 0:
                    out.append({"bracket": f"[e{i + 1},e{j + 1}]", "component": f"e{k + 1}", "value": c[i, j, k]})
    return out


def _connection(g) -> list:
    return [{"nabla": f"e{i + 1}", "of": f"e{j + 1}", "component": f"e{k + 1}", "value": g[i, j, k]}
            for i in range(3) for j in range(3) for k in range(3) if g[i, j, k] != 0]


def model_section(model: FrameModel, spec) -> dict:
    mt = milnor_type(model.c)
    return {
        "spec": spec.model_dump() if spec is not None else None,
        "name": model.name,
        "kernel": model.kernel,
        "structure_constants": _brackets(model.c),
        "jacobi_residual": model.jacobi,
        "milnor_type": mt.label,
        "killing_consistent": mt.killing_consistent,
    }


def full_residuals(fa: FieldAnalysis) -> ResidualMap:
    """Frame-level defects, field-level checks and the identity suite in one map."""
    m = fa.model
    rm = ResidualMap()
    rm.add("torsion", torsion_defect(m.gamma, m.c), True, "nabla_X Y - nabla_Y X = [X, Y]")
    rm.add("metric", metric_defect(m.gamma), True, "<nabla_X Y, Z> + <Y, nabla_X Z> = 0")
    lie = m.is_lie()
    for name, val in riemann_symmetry_defects(m.riemann).items():
        asserted = lie if name == "bianchi_1" else True
        rm.add(f"riemann_{name}", val, asserted, {
            "antisym_12": "R(X,Y,Z,W) = -R(Y,X,Z,W)",
            "antisym_34": "R(X,Y,Z,W) = -R(X,Y,W,Z)",
            "pair_sym": "R(X,Y,Z,W) = R(Z,W,X,Y)",
            "bianchi_1": "R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0",
        }[name], ["lie_algebra"] if name == "bianchi_1" else [])
    rm.add("unit_harmonic", fa.unit_harmonic, False, "nabla* nabla zeta - |nabla zeta|^2 zeta = 0")
    rm.add("harmonic_map", fa.harmonic_map, False, "sum_i R(nabla_{e_i} zeta, zeta) e_i = 0")
    kk = fa.killing_and_kostant()
    killing = scalar.is_zero(kk["killing_residual"], fa.tol)
    rm.add("killing", kk["killing_residual"], False, "phi + phi^T = 0")
    rm.add("kostant", kk["kostant_residual"], killing, "nabla^2_{X,Y} zeta = R(X, zeta) Y", ["killing"])
    lk = kk["lemma_kill_check"]
    rm.add("lemma_kill", lk["residual"], lk["applicable"], "Ric(zeta, zeta) = |phi|^2 for Killing eigenfields",
           ["killing", "ricci_eigenvector"])
    rm.add("sasakian", fa.sasakian_residual(), False,
           "phi^2 = -Id + zeta (x) zeta, (nabla_X phi)Y = <X,Y> zeta - <Y,zeta> X")
    cc = fa.contact_check()
    rm.add("contact_trace", cc["agreement"], True, "(eta ^ d eta)(zeta, e1, e2) = trace(phi J)")
    for r in fa.identity_suite():
        rm.entries[r.name] = r
    return rm


def residual_rows(rm: ResidualMap, tol: float) -> list:
    return [{"name": r.name, "value": r.value, "asserted": r.asserted, "passed": r.passes(tol),
             "anchor": r.anchor, "requires": list(r.requires)} for r in rm]


def field_section(fa: FieldAnalysis) -> dict:
    inv = fa.invariants()
    cc = fa.contact_check()
    return {
        "zeta": fa.zeta,
        "phi": fa.phi,
        "phi_horizontal": fa.phi_horizontal,
        "invariants": {k: v for k, v in inv.items() if k not in ("S", "S_tilde")},
        "S": inv["S"],
        "S_tilde": inv["S_tilde"],
        "flags": fa.flags(),
        "lambda": fa.ric_zz,
        "ricci_defect": fa.ricci_defect,
        "contact": {"trace_phiJ": cc["trace_phiJ"], "wedge_value": cc["wedge_value"], "is_contact": cc["is_contact"]},
    }


def classification_section(res: ClassificationResult, tol: float) -> dict:
    out = {
        "case": res.case,
        "reason": res.reason,
        "lambda": res.lam,
        "lambda1": res.lambda1,
        "b": res.b,
        "norm2_phi": res.norm2_phi,
        "trace_phi": res.trace_phi,
        "scal": res.scal,
        "emitted_brackets": list(res.emitted_brackets) if res.emitted_brackets else None,
        "reconstructed_ricci": res.reconstructed_ricci,
        "expected_ricci": res.expected_ricci,
        "milnor_type": res.milnor_type,
        "emitted_milnor_type": res.emitted_milnor_type,
        "theorem_family": res.theorem_family,
        "compact_obstruction": res.compact_obstruction,
        "checks": [{"name": k, "value": v, "passed": scalar.is_zero(v, tol)} for k, v in res.checks.items()],
        "alternate": None,
        "warnings": list(res.warnings),
    }
    if res.alternate:
        out["alternate"] = {"b": res.alternate["b"], "emitted_brackets": list(res.alternate["emitted_brackets"])}
    return out


def facts_section(inst, tol: float) -> list:
    return [{"name": r.fact.name, "quantity": r.fact.quantity, "field": r.fact.field, "basis": r.fact.basis,
             "expected": r.fact.expected, "actual": r.actual, "deviation": r.deviation, "passed": r.passed}
            for r in catalog.check(inst, tol)]


# --- modes ----------------------------------------------------------------------

def _analysis(cfg: RunConfig, with_residuals: bool) -> tuple[dict, list]:
    model, inst = build_frame(cfg.model)
    if model is None:
        raise ConfigError(f"catalog model {cfg.model.name!r} has no frame model")
    tol = cfg.tolerances.algebraic
    zeta = build_field(cfg.field, model.kernel)
    fa = FieldAnalysis(model, zeta, tol)
    model = fa.model
    rep = {"model": model_section(model, cfg.model)}
    failures = []
    if with_residuals:
        rep["connection"] = _connection(model.gamma)
        rep["ricci"] = model.ricci
        rep["scal"] = model.scal
        rep["field"] = field_section(fa)
        rm = full_residuals(fa)
        rep["residuals"] = residual_rows(rm, tol)
        failures += [f"residual:{n}" for n in rm.failures(tol)]
    res = classify(model, fa.zeta, tol)
    rep["classification"] = classification_section(res, tol)
    failures += [f"classification:{n}" for n in res.failed_checks(tol)]
    if not with_residuals:
        mi = milnor_type(model.c)
        rep["classification"]["input_killing_consistent"] = mi.killing_consistent
    if inst is not None:
        rep["catalog_facts"] = facts_section(inst, tol)
        failures += [f"fact:{f['name']}" for f in rep["catalog_facts"] if not f["passed"]]
    return rep, failures


def run_analyze(cfg):
    return _analysis(cfg, True)


def run_classify(cfg):
    return _analysis(cfg, False)


def run_find(cfg):
    model, inst = build_frame(cfg.model)
    if model is None:
        raise ConfigError("find needs a frame model")
    f = cfg.finder
    fc = FinderConfig(n_starts=f.n_starts, max_iters=f.max_iters, step=f.step, converge_tol=f.converge_tol,
                      dedupe_tol=f.dedupe_tol, newton_polish=f.newton_polish)
    res = find_all(model, fc)
    rep = {
        "model": model_section(model, cfg.model),
        "finder": {
            "config": f.model_dump(),
            "seeds": res.n_seeds,
            "dropped": res.dropped,
            "symmetry": res.symmetry,
            "symmetry_axis": res.symmetry_axis,
            "directions": [{"direction": d.direction, "residual": d.residual, "unit_harmonic": d.unit_harmonic,
                            "flags": d.flags, "basin_count": d.basin_count, "note": d.note}
                           for d in res.directions],
            "unverified": [{"direction": d.direction, "unit_harmonic": d.unit_harmonic} for d in res.unverified],
        },
    }
    failures = [f"finder:unverified:{i}" for i in range(len(res.unverified))]
    return rep, failures


def run_chart_verify(cfg):
    tol = cfg.tolerances
    expected = None
    if cfg.model.type == "chart":
        ch, expected = build_chart(cfg.model)
    else:
        _, inst = build_frame(cfg.model)
        if inst.chart is None:
            raise ConfigError(f"catalog model {cfg.model.name!r} has no chart")
        ch = inst.chart
    pts = chartmod.grid((-1, -1, -1), (1, 1, 1))
    rep = {"chart": {"name": ch.name, "params": ch.params, "fd_step": tol.fd_step, "tolerance": tol.fd,
                     "points": len(pts)}}
    failures = []
    sec = rep["chart"]
    try:
        if ch.frame is not None and ch.frame_model is not None:
            cv = chartmod.cross_validate(ch, sample_points=pts, h=tol.fd_step, tol=tol.fd)
            sec["max_structure_deviation"] = cv.max_structure
            sec["max_ricci_deviation"] = cv.max_ricci
            sec["max_phi_deviation"] = cv.max_phi
            sec["cross_validation"] = PASS if cv.passed else FAIL
            if not cv.passed:
                failures.append("chart:cross_validation")
            x = np.array([0.1, -0.2, 0.3])
            ref = ch.frame_model.to_float().ricci if ch.frame_model.kernel == "exact" else ch.frame_model.ricci
            d1 = float(np.max(np.abs(chartmod.ricci_fd(ch, x, 1e-2) - ref)))
            d2 = float(np.max(np.abs(chartmod.ricci_fd(ch, x, 5e-3) - ref)))
            sec["convergence_ratio"] = d1 / d2 if d2 > 0 else None
        elif expected is not None:
            dev = max(float(np.max(np.abs(chartmod.ricci_fd(ch, p, tol.fd_step) - expected))) for p in pts)
            sec["max_ricci_deviation"] = dev
            sec["cross_validation"] = PASS if dev <= tol.fd else FAIL
            if dev > tol.fd:
                failures.append("chart:ricci")
        if ch.field is not None:
            cr = chartmod.integral_curve(ch, None, (0.1, 0.2, 0.3), 10.0, 0.01)
            sec["integral_curve"] = {"T": 10.0, "dt": 0.01, "geodesic_residual": cr.geodesic_residual,
                                     "speed_defect": cr.speed_defect, "end_point": cr.points[-1]}
            if cr.speed_defect > 1e-8:
                failures.append("chart:speed")
    except chartmod.ChartError as exc:
        sec["error"] = str(exc)
        failures.append("chart:error")
    return rep, failures


def _random_triples(sw) -> list:
    rng = random.Random(sw.seed)
    lo, hi, d = sw.low * sw.denominator, sw.high * sw.denominator, sw.denominator
    return [tuple(Fraction(rng.randint(lo, hi), d) for _ in range(3)) for _ in range(sw.random)]


def sweep_row(args) -> dict:
    """One sweep entry; module level so worker processes can pickle it."""
    triple, field_spec, tol = args
    vals = [_number(v) if not isinstance(v, Fraction) else v for v in triple]
    if any(isinstance(v, float) for v in vals):
        vals = [float(v) for v in vals]
    model = FrameModel.unimodular(*vals)
    zeta = build_field(field_spec, model.kernel)
    fa = FieldAnalysis(model, zeta, tol)
    rm = full_residuals(fa)
    res = classify(fa.model, fa.zeta, tol)
    fails = rm.failures(tol) + res.failed_checks(tol)
    return {
        "alpha": vals[0], "beta": vals[1], "gamma": vals[2],
        "case": res.case, "lambda": res.lam, "lambda1": res.lambda1, "b": res.b,
        "emitted_brackets": list(res.emitted_brackets) if res.emitted_brackets else None,
        "milnor_type": res.milnor_type, "emitted_milnor_type": res.emitted_milnor_type,
        "failures": fails, "verdict": PASS if not fails else FAIL,
    }


def run_sweep(cfg):
    sw = cfg.sweep
    triples = [tuple(r) for r in sw.grid] if sw.grid is not None else _random_triples(sw)
    jobs = [(t, cfg.field, cfg.tolerances.algebraic) for t in triples]
    if sw.workers > 1:
        with ProcessPoolExecutor(max_workers=sw.workers) as ex:
            rows = list(ex.map(sweep_row, jobs))
    else:
        rows = [sweep_row(j) for j in jobs]
    rep = {"sweep": {"source": "grid" if sw.grid is not None else "random", "seed": sw.seed,
                     "count": len(rows), "rows": rows}}
    failures = [f"sweep:{i}" for i, r in enumerate(rows) if r["verdict"] != PASS]
    return rep, failures


def run_catalog(cfg):
    tol = cfg.tolerances.algebraic
    if cfg.model is not None:
        if cfg.model.type != "catalog":
            raise ConfigError("catalog mode takes a catalog model or none")
        todo = [(cfg.model.name, cfg.model.params)]
    else:
        todo = [(n, {}) for n in catalog.names()]
    entries = []
    failures = []
    for name, params in todo:
        try:
            inst = catalog.get(name, params)
        except catalog.CatalogError as exc:
            raise ConfigError(str(exc)) from exc
        facts = facts_section(inst, tol)
        entries.append({"name": name, "kind": inst.kind, "params": inst.params,
                        "description": catalog.ENTRIES[name].description, "facts": facts})
        failures += [f"{name}:{f['name']}" for f in facts if not f["passed"]]
    return {"catalog": entries}, failures


MODES = {
    "analyze": run_analyze,
    "classify": run_classify,
    "find": run_find,
    "chart-verify": run_chart_verify,
    "sweep": run_sweep,
    "catalog": run_catalog,
}


def run(cfg: RunConfig) -> dict:
    """Build the report.  Raises ``ConfigError`` for unusable input."""
    body, failures = MODES[cfg.mode](cfg)
    report = {"mode": cfg.mode, "field_spec": cfg.field, "tolerances": cfg.tolerances.model_dump()}
    report.update(body)
    report["failures"] = failures
    report["verdict"] = PASS if not failures else FAIL
    return report
