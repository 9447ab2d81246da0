"""Coordinate charts: finite-difference curvature and integral curves.

This backend shares no code with the frame algebra; it only sees a metric
``g(x)`` and, optionally, a declared orthonormal frame and a vector field in
coordinates.  It is used to cross-check frame-model results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .field import FieldAnalysis
from .frame import FrameModel

CURVATURE_STEP = 1e-3
LOCAL_STEP = 1e-6


class ChartError(ValueError):
    pass


@dataclass
class ChartModel:
    name: str
    metric: Callable[[np.ndarray], np.ndarray]
    frame: Callable[[np.ndarray], np.ndarray] | None = None  # rows are the frame vectors
    field: Callable[[np.ndarray], np.ndarray] | None = None
    periods: tuple = (None, None, None)
    params: dict = dc_field(default_factory=dict)
    frame_model: FrameModel | None = None
    field_frame: np.ndarray | None = None  # field components in the declared frame

    def wrap(self, x: np.ndarray) -> np.ndarray:
        x = np.array(x, dtype=float)
        for i, p in enumerate(self.periods):
            if p:
                x[i] = x[i] % p
        return x


def _metric(chart: ChartModel, x) -> np.ndarray:
    g = np.asarray(chart.metric(np.asarray(x, dtype=float)), dtype=float)
    if g.shape != (3, 3) or not np.all(np.isfinite(g)):
        raise ChartError(f"metric of {chart.name} is not a finite 3x3 matrix at {x}")
    return g


def _inverse_metric(g: np.ndarray) -> np.ndarray:
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise ChartError("metric is not positive definite") from exc
    return np.linalg.inv(g)


def metric_derivative(chart: ChartModel, x, h: float) -> np.ndarray:
    """``dg[k, i, j] = d_k g_ij`` by central differences."""
    x = np.asarray(x, dtype=float)
    out = np.empty((3, 3, 3))
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        out[k] = (_metric(chart, x + e) - _metric(chart, x - e)) / (2 * h)
    return out


def christoffel_fd(chart: ChartModel, x, h: float = CURVATURE_STEP) -> np.ndarray:
    """``Gamma[k, i, j]`` = Gamma^k_ij."""
    if not h > 0:
        raise ChartError("finite-difference step must be positive")
    ginv = _inverse_metric(_metric(chart, x))
    dg = metric_derivative(chart, x, h)
    # lower[l, i, j] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    lower = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    return np.einsum("kl,lij->kij", ginv, lower)


def orthonormal_frame(chart: ChartModel, x) -> np.ndarray:
    """Declared frame if any, else rows of the inverse Cholesky factor."""
    if chart.frame is not None:
        return np.asarray(chart.frame(np.asarray(x, dtype=float)), dtype=float)
    g = _metric(chart, x)
    _inverse_metric(g)
    return np.linalg.inv(np.linalg.cholesky(g))


def ricci_fd(chart: ChartModel, x, h: float = CURVATURE_STEP, frame: bool = True) -> np.ndarray:
    """Ricci tensor from differentiated Christoffels; in an orthonormal frame by default."""
    x = np.asarray(x, dtype=float)
    G = christoffel_fd(chart, x, h)
    dG = np.empty((3, 3, 3, 3))  # dG[m, k, i, j] = d_m Gamma^k_ij
    for m in range(3):
        e = np.zeros(3)
        e[m] = h
        dG[m] = (christoffel_fd(chart, x + e, h) - christoffel_fd(chart, x - e, h)) / (2 * h)
    ric = (np.einsum("kkij->ij", dG) - np.einsum("jkik->ij", dG)
           + np.einsum("kkl,lij->ij", G, G) - np.einsum("kjl,lik->ij", G, G))
    ric = 0.5 * (ric + ric.T)
    if not frame:
        return ric
    E = orthonormal_frame(chart, x)
    return E @ ric @ E.T


def _field_at(chart: ChartModel, V, x):
    v = np.asarray(V(np.asarray(x, dtype=float)), dtype=float)
    if not np.all(np.isfinite(v)):
        raise ChartError(f"field is not finite at {x}")
    return v


def covariant_acceleration(chart: ChartModel, V, x, h: float = LOCAL_STEP) -> np.ndarray:
    """``nabla_V V`` at ``x`` in coordinates."""
    v = _field_at(chart, V, x)
    dv = (_field_at(chart, V, x + h * v) - _field_at(chart, V, x - h * v)) / (2 * h)
    G = christoffel_fd(chart, x, h)
    return dv + np.einsum("kij,i,j->k", G, v, v)


@dataclass
class CurveResult:
    times: np.ndarray
    points: np.ndarray
    geodesic_residual: float
    speed_defect: float


def integral_curve(chart: ChartModel, V=None, x0=(0.0, 0.0, 0.0), T: float = 1.0, dt: float = 0.01,
                   h: float = LOCAL_STEP, unit_tol: float = 1e-8) -> CurveResult:
    """RK4 integral curve of ``V`` with the max of |nabla_{g'} g'| along it."""
    V = V or chart.field
    if V is None:
        raise ChartError(f"chart {chart.name} has no field")
    if not dt > 0:
        raise ChartError("time step must be positive")
    if dt < 1e-12:
        raise ChartError("time step underflow")
    x = np.asarray(x0, dtype=float)
    v0 = _field_at(chart, V, x)
    speed0 = math.sqrt(v0 @ _metric(chart, x) @ v0)
    if abs(speed0 - 1) > unit_tol:
        raise ChartError(f"field is not unit at x0: |V| = {speed0!r}")
    n = int(round(T / dt))
    times = np.arange(n + 1) * dt
    pts = np.empty((n + 1, 3))
    pts[0] = x
    worst_acc = worst_speed = 0.0
    for i in range(n + 1):
        if i > 0:
            k1 = _field_at(chart, V, x)
            k2 = _field_at(chart, V, x + 0.5 * dt * k1)
            k3 = _field_at(chart, V, x + 0.5 * dt * k2)
            k4 = _field_at(chart, V, x + dt * k3)
            x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise ChartError("integral curve left the validity region")
            pts[i] = x
        g = _metric(chart, x)
        acc = covariant_acceleration(chart, V, x, h)
        worst_acc = max(worst_acc, math.sqrt(max(acc @ g @ acc, 0.0)))
        v = _field_at(chart, V, x)
        worst_speed = max(worst_speed, abs(math.sqrt(v @ g @ v) - 1))
    return CurveResult(times, np.array([chart.wrap(p) for p in pts]), worst_acc, worst_speed)


def structure_functions_fd(chart: ChartModel, x, h: float = LOCAL_STEP) -> np.ndarray:
    """``c[a, b, k] = <[E_a, E_b], E_k>`` for the declared frame."""
    if chart.frame is None:
        raise ChartError(f"chart {chart.name} declares no frame")
    x = np.asarray(x, dtype=float)
    E = orthonormal_frame(chart, x)
    dE = np.empty((3, 3, 3))  # dE[m, a, mu] = d_m E_a^mu
    for m in range(3):
        e = np.zeros(3)
        e[m] = h
        dE[m] = (orthonormal_frame(chart, x + e) - orthonormal_frame(chart, x - e)) / (2 * h)
    # [E_a, E_b]^mu = E_a^m d_m E_b^mu - E_b^m d_m E_a^mu
    D = np.einsum("am,mbu->abu", E, dE)
    br = D - np.einsum("bau->abu", D)
    g = _metric(chart, x)
    return np.einsum("abu,uv,kv->abk", br, g, E)


def phi_fd(chart: ChartModel, x, h: float = LOCAL_STEP) -> np.ndarray:
    """Matrix of phi(X) = -nabla_X zeta in the declared frame."""
    if chart.frame is None or chart.field is None:
        raise ChartError(f"chart {chart.name} needs a frame and a field")
    x = np.asarray(x, dtype=float)
    E = orthonormal_frame(chart, x)
    z = _field_at(chart, chart.field, x)
    G = christoffel_fd(chart, x, h)
    g = _metric(chart, x)
    out = np.empty((3, 3))
    for a in range(3):
        ea = E[a]
        dz = (_field_at(chart, chart.field, x + h * ea) - _field_at(chart, chart.field, x - h * ea)) / (2 * h)
        nab = dz + np.einsum("kij,i,j->k", G, ea, z)
        out[:, a] = -(E @ g @ nab)
    return out


@dataclass
class CrossValidation:
    points: int
    max_structure: float
    max_ricci: float
    max_phi: float | None
    tol: float

    @property
    def passed(self) -> bool:
        devs = [self.max_structure, self.max_ricci] + ([self.max_phi] if self.max_phi is not None else [])
        return all(d <= self.tol for d in devs)


def grid(lo, hi, n: int = 3) -> list:
    axes = [np.linspace(lo[i], hi[i], n) for i in range(3)]
    return [np.array([a, b, c]) for a in axes[0] for b in axes[1] for c in axes[2]]


def cross_validate(chart: ChartModel, frame_model: FrameModel | None = None, sample_points=None,
                   h: float = CURVATURE_STEP, tol: float = 1e-5) -> CrossValidation:
    if chart.frame is None:
        raise ChartError(f"chart {chart.name} declares no frame")
    fm = frame_model or chart.frame_model
    if fm is None:
        raise ChartError("no frame model to compare against")
    fm = fm.to_float() if fm.kernel == "exact" else fm
    pts = sample_points if sample_points is not None else grid((-1, -1, -1), (1, 1, 1))
    phi_ref = None
    if chart.field is not None and chart.field_frame is not None:
        phi_ref = FieldAnalysis(fm, np.asarray(chart.field_frame, dtype=float)).phi
    s = r = 0.0
    p = None if phi_ref is None else 0.0
    for x in pts:
        s = max(s, float(np.max(np.abs(structure_functions_fd(chart, x) - fm.c))))
        r = max(r, float(np.max(np.abs(ricci_fd(chart, x, h) - fm.ricci))))
        if phi_ref is not None:
            p = max(p, float(np.max(np.abs(phi_fd(chart, x) - phi_ref))))
    return CrossValidation(len(pts), s, r, p, tol)


# --- built-in charts ---------------------------------------------------------

def anosov_beta(A) -> float:
    """Largest eigenvalue of a hyperbolic matrix in SL(2, Z)."""
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2) or round(float(np.linalg.det(A))) != 1:
        raise ChartError("A must be a 2x2 matrix of determinant 1")
    ev = np.linalg.eigvals(A)
    if np.any(np.abs(ev.imag) > 0):
        raise ChartError("A is not hyperbolic")
    beta = float(np.max(ev.real))
    if not beta > 1:
        raise ChartError("A is not hyperbolic: largest eigenvalue must exceed 1")
    return beta


def hyperbolic_torus_constants(beta: float) -> np.ndarray:
    lb = math.log(beta)
    c = np.zeros((3, 3, 3))
    c[0, 2, 0], c[2, 0, 0] = lb, -lb
    c[1, 2, 1], c[2, 1, 1] = -lb, lb
    return c


_FRAME_FIELDS = {"e1": 0, "e2": 1, "e3": 2}


def _frame_field(frame, index):
    return lambda x: frame(x)[index]


def hyperbolic_torus_chart(A=((2, 1), (1, 1)), field: str = "e3") -> ChartModel:
    """Coordinates (x, s, t) with g = beta^(-2t) dx^2 + beta^(2t) ds^2 + dt^2."""
    beta = anosov_beta(A)
    lb = math.log(beta)

    def metric(p):
        t = p[2]
        return np.diag([math.exp(-2 * t * lb), math.exp(2 * t * lb), 1.0])

    def frame(p):
        t = p[2]
        return np.array([[0.0, math.exp(-t * lb), 0.0], [math.exp(t * lb), 0.0, 0.0], [0.0, 0.0, 1.0]])

    k = _FRAME_FIELDS[field]
    return ChartModel(
        name="hyperbolic-torus", metric=metric, frame=frame, field=_frame_field(frame, k),
        periods=(1.0, 1.0, None), params={"A": [list(r) for r in A], "beta": beta},
        frame_model=FrameModel(hyperbolic_torus_constants(beta), name="hyperbolic-torus"),
        field_frame=np.eye(3)[k],
    )


def flat_torus_chart(a: float = 1.0, field: str = "e3") -> ChartModel:
    """Identity metric with the rotating frame e2 = sin(ax) d_y + cos(ax) d_z."""
    if a == 0:
        raise ChartError("rotation rate a must be nonzero")
    a = float(a)

    def frame(p):
        x = p[0]
        return np.array([[1.0, 0.0, 0.0],
                         [0.0, math.sin(a * x), math.cos(a * x)],
                         [0.0, math.cos(a * x), -math.sin(a * x)]])

    k = _FRAME_FIELDS[field]
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = a, -a
    c[0, 2, 1], c[2, 0, 1] = -a, a
    period = 2 * math.pi / abs(a)
    return ChartModel(
        name="flat-torus", metric=lambda p: np.eye(3), frame=frame, field=_frame_field(frame, k),
        periods=(period, period, period), params={"a": a},
        frame_model=FrameModel(c, name="flat-torus"), field_frame=np.eye(3)[k],
    )


def round_sphere_chart() -> ChartModel:
    """Stereographic chart of the unit sphere, g = 4 / (1 + |x|^2)^2 Id; no frame."""
    return ChartModel(name="round-sphere", metric=lambda p: 4.0 / (1 + p @ p) ** 2 * np.eye(3))


def euclidean_chart(scale: float = 1.0) -> ChartModel:
    s = float(scale)
    if not s > 0:
        raise ChartError("scale must be positive")
    frame = lambda p: np.eye(3) / math.sqrt(s)
    return ChartModel(
        name="euclidean", metric=lambda p: s * np.eye(3), frame=frame, field=_frame_field(frame, 2),
        params={"scale": s}, frame_model=FrameModel(np.zeros((3, 3, 3)), name="euclidean"),
        field_frame=np.eye(3)[2],
    )
