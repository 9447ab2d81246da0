"""Named models with sheets of expected facts.

Each fact records the quantity it checks, the expected value and its basis:
``published`` (a value printed in the literature for that example),
``derived`` (computed by hand or by an independent route) or ``trivial``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import scalar
from .chart import ChartError, ChartModel, anosov_beta, euclidean_chart, flat_torus_chart, \
    hyperbolic_torus_chart, hyperbolic_torus_constants, ricci_fd, round_sphere_chart
from .classify import classify, conformal_rescale, milnor_type
from .field import FieldAnalysis, axis, unit_field
from .frame import FrameModel, _is_rational_input

PUBLISHED, DERIVED, TRIVIAL = "published", "derived", "trivial"


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class Fact:
    name: str
    quantity: str
    expected: object
    basis: str
    field: str | None = None
    tol: float = 1e-12


@dataclass
class CatalogInstance:
    name: str
    kind: str
    params: dict
    frame: FrameModel | None
    chart: ChartModel | None
    default_field: str | None
    facts: list = field(default_factory=list)


@dataclass(frozen=True)
class FactResult:
    fact: Fact
    actual: object
    deviation: object
    passed: bool


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str
    defaults: dict
    build: Callable[..., CatalogInstance]
    description: str


def _num(v):
    if _is_rational_input(v):
        return scalar.to_fraction(v)
    try:
        return float(v)
    except (TypeError, ValueError) as exc:
        raise CatalogError(f"not a number: {v!r}") from exc


def _diag(*vals):
    kernel = scalar.EXACT if all(scalar.is_exact_scalar(v) for v in vals) else scalar.FLOAT
    out = scalar.zeros((3, 3), kernel)
    for i, v in enumerate(vals):
        out[i, i] = v
    return out


def unimodular_ricci(a, b, g):
    return _diag(-(a + b - g) * (a + b + g) / 2, -(a - b - g) * (a + b - g) / 2, -(a + b + g) * (-a + b + g) / 2)


def unimodular_connection(a, b, g):
    """gamma[i, j, k] = <nabla_{e_i} e_j, e_k> from the six published formulas."""
    kernel = scalar.EXACT if all(scalar.is_exact_scalar(v) for v in (a, b, g)) else scalar.FLOAT
    G = scalar.zeros((3, 3, 3), kernel)
    G[2, 0, 1] = (g - a - b) / 2
    G[2, 1, 0] = (a + b - g) / 2
    G[0, 2, 1] = (b - a + g) / 2
    G[1, 2, 0] = (a + b + g) / 2
    G[1, 0, 2] = (-a - b - g) / 2
    G[0, 1, 2] = (a - b - g) / 2
    return G


def _hopf(params):
    m = FrameModel.unimodular(2, -2, 2, name="hopf")
    two = Fraction(2)
    facts = [
        Fact("ricci", "ricci", _diag(two, two, two), PUBLISHED),
        Fact("lambda", "lambda", two, PUBLISHED, "e3"),
        Fact("norm2_phi", "norm2_phi", two, DERIVED, "e3"),
        Fact("killing", "killing", True, PUBLISHED, "e3"),
        Fact("kostant_residual", "kostant_residual", Fraction(0), DERIVED, "e3"),
        Fact("lemma_kill", "lemma_kill", True, PUBLISHED, "e3"),
        Fact("harmonic_map_residual", "harmonic_map", Fraction(0), DERIVED, "e3"),
        Fact("contact_value", "contact_abs", two, DERIVED, "e3"),
        Fact("sasakian_residual", "sasakian_residual", Fraction(0), DERIVED, "e3"),
        Fact("case", "case", "KillingSasakianRescale", DERIVED, "e3"),
        Fact("b", "b", Fraction(1), DERIVED, "e3"),
        Fact("milnor_type", "milnor_type", "SU2", DERIVED),
    ]
    return CatalogInstance("hopf", "frame", {}, m, None, "e3", facts)


def _hyperbolic_torus(params):
    A = params.get("A", [[2, 1], [1, 1]])
    try:
        beta = anosov_beta(A)
        chart = hyperbolic_torus_chart(A)
    except ChartError as exc:
        raise CatalogError(str(exc)) from exc
    L = math.log(beta)
    m = FrameModel(hyperbolic_torus_constants(beta), name="hyperbolic-torus")
    G = np.zeros((3, 3, 3))
    G[0, 0, 2], G[0, 2, 0] = -L, L
    G[1, 1, 2], G[1, 2, 1] = L, -L
    facts = [
        Fact("ricci", "ricci", _diag(0.0, 0.0, -2 * L * L), PUBLISHED),
        Fact("connection", "gamma", G, PUBLISHED),
        Fact("phi_e3", "phi_horizontal", np.diag([-L, L]), PUBLISHED, "e3"),
        Fact("e3_harmonic", "unit_harmonic", 0.0, PUBLISHED, "e3"),
        Fact("e3_totally_geodesic", "totally_geodesic", True, PUBLISHED, "e3"),
        Fact("e3_not_killing", "killing", False, PUBLISHED, "e3"),
        Fact("e1_harmonic", "unit_harmonic", 0.0, PUBLISHED, "e1"),
        Fact("e1_not_totally_geodesic", "totally_geodesic", False, PUBLISHED, "e1"),
        Fact("e1_phi_horizontal_zero", "phi_horizontal", np.zeros((2, 2)), PUBLISHED, "e1"),
        Fact("case", "case", "NonKilling_b_zero", DERIVED, "e3"),
        Fact("scal_equals_lambda", "scal_minus_lambda", 0.0, DERIVED, "e3"),
        Fact("chart_ricci", "chart_ricci", _diag(0.0, 0.0, -2 * L * L), PUBLISHED, tol=1e-5),
    ]
    return CatalogInstance("hyperbolic-torus", "both", {"A": A, "beta": beta}, m, chart, "e3", facts)


def _unimodular(params):
    a, b, g = (_num(params.get(k, d)) for k, d in (("alpha", 1), ("beta", 2), ("gamma", 3)))
    m = FrameModel.unimodular(a, b, g, name="unimodular")
    half = Fraction(1, 2) if scalar.is_exact_scalar(a + b + g) else 0.5
    phi = np.array([[0, -(a + b + g) * half], [-(-a + b + g) * half, 0]], dtype=object)
    facts = [
        Fact("ricci", "ricci", unimodular_ricci(a, b, g), PUBLISHED),
        Fact("connection", "gamma", unimodular_connection(a, b, g), PUBLISHED),
        Fact("phi_e3", "phi_horizontal", scalar.simplify(phi), PUBLISHED, "e3"),
    ]
    for k in ("e1", "e2", "e3"):
        facts.append(Fact(f"{k}_harmonic", "unit_harmonic", 0 * a, PUBLISHED, k))
        facts.append(Fact(f"{k}_totally_geodesic", "totally_geodesic", True, PUBLISHED, k))
    return CatalogInstance("unimodular", "frame", {"alpha": a, "beta": b, "gamma": g}, m, None, "e3", facts)


def _flat_torus(params):
    a = _num(params.get("a", 1))
    if a == 0:
        raise CatalogError("flat-torus needs a != 0")
    m = FrameModel.unimodular(a, -a, 0 * a, name="flat-torus")
    chart = flat_torus_chart(float(a))
    l1 = abs(a)
    zero = 0 * a
    facts = [
        Fact("ricci", "ricci", _diag(zero, zero, zero), PUBLISHED),
        Fact("e1_parallel", "parallel", True, PUBLISHED, "e1"),
        Fact("case", "case", "NonKilling_b_nonzero", DERIVED, "e3"),
        Fact("lambda1", "lambda1", l1, DERIVED, "e3"),
        Fact("b", "b", -l1 / 2, PUBLISHED, "e3"),
        Fact("emitted_brackets", "emitted_brackets", (l1, zero, l1), PUBLISHED, "e3"),
        Fact("chart_ricci", "chart_ricci", _diag(0.0, 0.0, 0.0), TRIVIAL, tol=1e-5),
    ]
    return CatalogInstance("flat-torus", "both", {"a": a}, m, chart, "e3", facts)


def hyperbolic_space_constants() -> np.ndarray:
    """[e1, e3] = e1, [e2, e3] = e2: the upper half-space with e3 = d/dt."""
    c = scalar.zeros((3, 3, 3), scalar.EXACT)
    one = Fraction(1)
    c[0, 2, 0], c[2, 0, 0] = one, -one
    c[1, 2, 1], c[2, 1, 1] = one, -one
    return c


def _hyperbolic_space(params):
    m = FrameModel(hyperbolic_space_constants(), name="hyperbolic-space")
    m2 = Fraction(-2)
    facts = [
        Fact("ricci", "ricci", _diag(m2, m2, m2), DERIVED),
        Fact("e3_harmonic", "unit_harmonic", Fraction(0), DERIVED, "e3"),
        Fact("e3_totally_geodesic", "totally_geodesic", True, DERIVED, "e3"),
        Fact("trace_phi", "trace_phi", m2, DERIVED, "e3"),
        Fact("compact_obstruction", "compact_obstruction", True, DERIVED, "e3"),
    ]
    return CatalogInstance("hyperbolic-space", "frame", {}, m, None, "e3", facts)


def _sphere_su2(params):
    c = _num(params.get("c", 1))
    if c == 0:
        raise CatalogError("sphere-su2 needs c != 0")
    m = FrameModel.unimodular(2 * c, -2 * c, 2 * c, name="sphere-su2")
    r = 2 * c * c
    facts = [
        Fact("ricci", "ricci", _diag(r, r, r), DERIVED),
        Fact("case", "case", "KillingSasakianRescale", DERIVED, "e3"),
        Fact("b", "b", abs(c), DERIVED, "e3"),
        Fact("rescaled_sasakian", "rescaled_sasakian_residual", 0 * c, DERIVED, "e3"),
        Fact("milnor_type", "milnor_type", "SU2", DERIVED),
    ]
    return CatalogInstance("sphere-su2", "frame", {"c": c}, m, None, "e3", facts)


def _round_sphere(params):
    chart = round_sphere_chart()
    facts = [Fact("chart_ricci", "chart_ricci", _diag(2.0, 2.0, 2.0), DERIVED, tol=1e-5)]
    return CatalogInstance("round-sphere", "chart", {}, None, chart, None, facts)


def _euclidean(params):
    m = FrameModel(scalar.zeros((3, 3, 3), scalar.EXACT), name="euclidean")
    zero = Fraction(0)
    facts = [
        Fact("ricci", "ricci", _diag(zero, zero, zero), TRIVIAL),
        Fact("e3_parallel", "parallel", True, TRIVIAL, "e3"),
        Fact("case", "case", "Parallel", TRIVIAL, "e3"),
        Fact("chart_ricci", "chart_ricci", _diag(0.0, 0.0, 0.0), TRIVIAL, tol=1e-5),
    ]
    return CatalogInstance("euclidean", "both", {}, m, euclidean_chart(), "e3", facts)


ENTRIES = {
    e.name: e for e in (
        CatalogEntry("hopf", "frame", {}, _hopf, "round S3 frame (2,-2,2) with the Hopf field e3"),
        CatalogEntry("hyperbolic-torus", "both", {"A": [[2, 1], [1, 1]]}, _hyperbolic_torus,
                     "mapping torus of an Anosov matrix A with the Sol metric"),
        CatalogEntry("unimodular", "frame", {"alpha": 1, "beta": 2, "gamma": 3}, _unimodular,
                     "[e1,e2] = alpha e3, [e1,e3] = beta e2, [e2,e3] = gamma e1"),
        CatalogEntry("flat-torus", "both", {"a": 1}, _flat_torus, "flat unimodular model (a, -a, 0)"),
        CatalogEntry("hyperbolic-space", "frame", {}, _hyperbolic_space, "[e1,e3] = e1, [e2,e3] = e2"),
        CatalogEntry("sphere-su2", "frame", {"c": 1}, _sphere_su2, "SU(2) model (2c, -2c, 2c)"),
        CatalogEntry("round-sphere", "chart", {}, _round_sphere, "stereographic chart of the unit sphere"),
        CatalogEntry("euclidean", "both", {}, _euclidean, "flat R3, c = 0"),
    )
}


def names() -> list:
    return list(ENTRIES)


def get(name: str, params: dict | None = None) -> CatalogInstance:
    if name not in ENTRIES:
        raise CatalogError(f"unknown catalog model {name!r}; known: {', '.join(ENTRIES)}")
    merged = dict(ENTRIES[name].defaults)
    merged.update(params or {})
    unknown = set(merged) - set(ENTRIES[name].defaults)
    if unknown:
        raise CatalogError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    return ENTRIES[name].build(merged)


# --- fact evaluation ----------------------------------------------------------

def field_vector(spec, kernel: str = scalar.EXACT):
    if isinstance(spec, str):
        if spec not in ("e1", "e2", "e3"):
            raise CatalogError(f"unknown field {spec!r}")
        return axis(int(spec[1]) - 1, kernel)
    return unit_field(spec, None if kernel == scalar.EXACT else kernel)


def quantity(inst: CatalogInstance, name: str, fld=None, tol: float = 1e-10):
    m = inst.frame
    if name == "chart_ricci":
        return ricci_fd(inst.chart, np.array([0.1, -0.2, 0.3]))
    if name == "ricci":
        return m.ricci
    if name == "gamma":
        return m.gamma
    if name == "milnor_type":
        return milnor_type(m.c, tol).label
    fa = FieldAnalysis(m, field_vector(fld, m.kernel), tol)
    direct = {
        "phi_horizontal": lambda: fa.phi_horizontal,
        "norm2_phi": lambda: fa.norm2_phi,
        "trace_phi": lambda: fa.trace_phi,
        "unit_harmonic": lambda: fa.unit_harmonic,
        "harmonic_map": lambda: fa.harmonic_map,
        "totally_geodesic": lambda: fa.totally_geodesic,
        "killing": lambda: scalar.is_zero(scalar.max_abs(fa.S), tol),
        "parallel": lambda: scalar.is_zero(scalar.max_abs(fa.phi), tol),
        "kostant_residual": lambda: fa.killing_and_kostant()["kostant_residual"],
        "lemma_kill": lambda: fa.killing_and_kostant()["lemma_kill_check"]["holds"],
        "contact_abs": lambda: abs(fa.trace_phiJ),
        "sasakian_residual": lambda: fa.sasakian_residual(),
    }
    if name in direct:
        return direct[name]()
    res = classify(m, field_vector(fld, m.kernel), tol)
    cls = {
        "case": lambda: res.case,
        "lambda": lambda: res.lam,
        "lambda1": lambda: res.lambda1,
        "b": lambda: res.b,
        "emitted_brackets": lambda: res.emitted_brackets,
        "compact_obstruction": lambda: res.compact_obstruction,
        "scal_minus_lambda": lambda: res.scal - res.lam,
        "rescaled_sasakian_residual": lambda: conformal_rescale(m, field_vector(fld, m.kernel), res.b).sasakian_residual,
    }
    if name in cls:
        return cls[name]()
    raise CatalogError(f"unknown quantity {name!r}")


def _deviation(actual, expected):
    if isinstance(expected, (bool, str)):
        return 0 if actual == expected else 1
    a = np.asarray(actual, dtype=object)
    e = np.asarray(expected, dtype=object)
    if a.shape != e.shape:
        return math.inf
    if a.size == 0:
        return 0
    pairs = list(zip(a.flat, e.flat))
    if all(scalar.is_exact_scalar(x) and scalar.is_exact_scalar(y) for x, y in pairs):
        return max(abs(x - y) for x, y in pairs)
    return max(abs(float(x) - float(y)) for x, y in pairs)


def check(inst: CatalogInstance, tol: float = 1e-10) -> list:
    out = []
    for f in inst.facts:
        actual = quantity(inst, f.quantity, f.field, tol)
        dev = _deviation(actual, f.expected)
        exact = scalar.is_exact_scalar(dev) and inst.frame is not None and inst.frame.kernel == scalar.EXACT \
            and f.quantity != "chart_ricci"
        passed = dev == 0 if exact else float(dev) <= f.tol
        out.append(FactResult(f, actual, dev, passed))
    return out
