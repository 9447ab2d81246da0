"""Numerical search for left-invariant harmonic unit directions.

A constant-component unit field is harmonic when its rough Laplacian is
parallel to it, so the finder minimizes

    F(zeta) = |P_perp (nabla* nabla zeta)|^2

over the unit sphere.  Gradients are central differences in the tangent
plane; they never use the closed-form variation of F.  Converged seeds are
polished with Newton steps on a 2-parameter chart, deduplicated modulo
zeta -> -zeta and re-verified through ``FieldAnalysis``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .field import FieldAnalysis
from .frame import FrameModel

FLAG_TOL = 1e-8


@dataclass(frozen=True)
class FinderConfig:
    n_starts: int = 64
    max_iters: int = 500
    step: float = 0.1
    converge_tol: float = 1e-12
    dedupe_tol: float = 1e-6
    newton_polish: bool = True
    fd_step: float = 1e-6

    def __post_init__(self):
        for name in ("n_starts", "max_iters", "step", "converge_tol", "dedupe_tol", "fd_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"FinderConfig.{name} must be positive")


@dataclass(frozen=True)
class CriticalDirection:
    direction: np.ndarray
    residual: float
    flags: dict
    basin_count: int
    unit_harmonic: float
    note: str


@dataclass
class FinderResult:
    directions: list
    dropped: int
    symmetry: str | None = None
    symmetry_axis: np.ndarray | None = None
    n_seeds: int = 0
    scale: float = 1.0
    unverified: list = field(default_factory=list)


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    r = np.sqrt(1 - z * z)
    theta = math.pi * (1 + math.sqrt(5)) * i
    return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)


def laplacian_operator(model: FrameModel) -> np.ndarray:
    """Matrix A with nabla* nabla zeta = A zeta for constant-component zeta."""
    fm = model if model.kernel != "exact" else model.to_float()
    cols = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1.0
        cols.append(FieldAnalysis(fm, e).rough_laplacian)
    return np.array(cols, dtype=float).T


def residual_objective(model: FrameModel, zeta) -> float:
    """F(zeta) by direct frame algebra."""
    fa = FieldAnalysis(model.to_float() if model.kernel == "exact" else model, np.asarray(zeta, dtype=float))
    lap = fa.rough_laplacian
    z = fa.zeta
    t = lap - (z @ lap) * z
    return float(t @ t)


def tangent_basis(z: np.ndarray):
    k = int(np.argmin(np.abs(z)))
    e = np.zeros(3)
    e[k] = 1.0
    v1 = e - z[k] * z
    v1 /= math.sqrt(v1 @ v1)
    return v1, _cross(z, v1)


def _cross(a, b):
    return np.array([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])


def energy_density(model: FrameModel, zeta) -> float:
    """Energy density 3/2 + |nabla zeta|^2 / 2 of a constant-component unit field."""
    fm = model.to_float() if model.kernel == "exact" else model
    dz = np.einsum("j,ijk->ik", np.asarray(zeta, dtype=float), fm.gamma)
    return 1.5 + 0.5 * float(np.sum(dz * dz))


def objective_from_energy(model: FrameModel, zeta, h: float = 1e-5) -> float:
    """F(zeta) as the squared sphere-gradient of the energy, by central differences.

    Along the great circle cos(t) zeta + sin(t) v the energy changes at rate
    <nabla* nabla zeta, v> after integrating by parts, which needs the
    divergence of left-invariant fields to vanish (unimodular models).
    """
    z = np.asarray(zeta, dtype=float)
    z = z / np.linalg.norm(z)
    total = 0.0
    for v in tangent_basis(z):
        ep = energy_density(model, math.cos(h) * z + math.sin(h) * v)
        em = energy_density(model, math.cos(h) * z - math.sin(h) * v)
        g = (ep - em) / (2 * h)
        total += g * g
    return total


class _Objective:
    def __init__(self, A: np.ndarray):
        self.A = A

    def tangent_residual(self, z):
        lap = self.A @ z
        return lap - (z @ lap) * z

    def F(self, z) -> float:
        t = self.tangent_residual(z)
        return float(t @ t)


def _normalize(v):
    return v / math.sqrt(v @ v)


def _fd_gradient(obj: _Objective, z, h):
    v1, v2 = tangent_basis(z)
    g = np.zeros(3)
    for v in (v1, v2):
        fp = obj.F(_normalize(z + h * v))
        fm = obj.F(_normalize(z - h * v))
        g += (fp - fm) / (2 * h) * v
    return g


def _descend(obj: _Objective, z, cfg: FinderConfig, switch: float, iters: int):
    step = cfg.step
    f = obj.F(z)
    for _ in range(iters):
        if math.sqrt(f) <= switch:
            break
        g = _fd_gradient(obj, z, cfg.fd_step)
        gn = float(np.linalg.norm(g))
        if gn == 0.0:
            break
        t = step
        while t > 1e-14:
            cand = _normalize(z - t * g / gn)
            fc = obj.F(cand)
            if fc < f - 1e-4 * t * gn:
                z, f = cand, fc
                step = min(2 * t, 1.0)
                break
            t *= 0.5
        else:
            break
    return z, f


def _newton(obj: _Objective, z, cfg: FinderConfig, target: float):
    h = cfg.fd_step
    for _ in range(50):
        r = math.sqrt(obj.F(z))
        if r <= target:
            break
        v1, v2 = tangent_basis(z)
        res0 = obj.tangent_residual(z)
        b = np.array([res0 @ v1, res0 @ v2])

        def comp(s, t):
            w = _normalize(z + s * v1 + t * v2)
            rv = obj.tangent_residual(w)
            return np.array([rv @ v1, rv @ v2])

        J = np.column_stack([
            (comp(h, 0) - comp(-h, 0)) / (2 * h),
            (comp(0, h) - comp(0, -h)) / (2 * h),
        ])
        delta = np.linalg.lstsq(J, -b, rcond=None)[0]
        cand = _normalize(z + delta[0] * v1 + delta[1] * v2)
        if obj.F(cand) >= obj.F(z):
            break
        z = cand
    return z


def _solve_seed(obj, z, cfg, target, scale):
    """Descent until Newton is likely to take over; retry closer in if it stalls."""
    switch = 0.1 * scale
    budget = cfg.max_iters
    chunk = max(1, cfg.max_iters // 5)
    while True:
        z, f = _descend(obj, z, cfg, switch if cfg.newton_polish else target, min(chunk, budget))
        budget -= chunk
        if cfg.newton_polish:
            z = _newton(obj, z, cfg, target)
        if math.sqrt(obj.F(z)) <= target or budget <= 0:
            return z
        switch *= 0.01


def _canonical_sign(z):
    for x in z:
        if abs(x) > 1e-9:
            return z if x > 0 else -z
    return z


def _angle(a, b) -> float:
    """Angle between the lines spanned by unit vectors a and b."""
    return float(np.arccos(np.clip(abs(a @ b), -1.0, 1.0)))


def _nearest_axis(z, tol):
    for k in range(3):
        if _angle(z, np.eye(3)[k]) <= tol:
            return k
    return None


def find_all(model: FrameModel, config: FinderConfig | None = None) -> FinderResult:
    cfg = config or FinderConfig()
    A = laplacian_operator(model)
    obj = _Objective(A)
    scale = max(1.0, float(np.max(np.abs(A))))
    target = cfg.converge_tol * scale

    ends = []
    dropped = 0
    for seed in fibonacci_sphere(cfg.n_starts):
        z = _solve_seed(obj, seed, cfg, target, scale)
        r = math.sqrt(obj.F(z))
        if r <= target:
            ends.append((_canonical_sign(z), r))
        else:
            dropped += 1

    classes = []  # [representative, residual, count]
    for z, r in ends:
        for cl in classes:
            if _angle(z, cl[0]) <= cfg.dedupe_tol:
                cl[2] += 1
                if r < cl[1]:
                    cl[0], cl[1] = z, r
                break
        else:
            classes.append([z, r, 1])

    result = FinderResult(directions=[], dropped=dropped, n_seeds=cfg.n_starts, scale=scale)
    reps = [(c[0], c[1], c[2]) for c in classes]
    if len(classes) > 3:
        reps = _resolve_symmetry(obj, classes, cfg, result, target)

    for z, r, count in reps:
        fa = FieldAnalysis(model.to_float() if model.kernel == "exact" else model, z, tol=FLAG_TOL)
        uh = float(fa.unit_harmonic)
        flags = {
            "harmonic": uh <= 10 * target,
            "totally_geodesic": fa.totally_geodesic,
            "killing": float(np.max(np.abs(fa.S))) <= FLAG_TOL,
            "divergence_free": fa.divergence_free,
        }
        k = _nearest_axis(z, cfg.dedupe_tol)
        note = f"frame axis e{k + 1}" if k is not None else "extra root (no reference value)"
        cd = CriticalDirection(z, r, flags, count, uh, note)
        if flags["harmonic"]:
            result.directions.append(cd)
        else:
            result.unverified.append(cd)
    return result


def _resolve_symmetry(obj, classes, cfg, result, target):
    """Collapse a continuum of roots to representatives and set the symmetry flag."""
    singles = np.array([c[0] for c in classes if c[2] == 1])
    distinct_fraction = len(classes) / cfg.n_starts
    if len(singles) >= 3:
        _, sv, vt = np.linalg.svd(singles)
        normal = vt[-1]
        coplanar = float(np.max(np.abs(singles @ normal))) <= 1e-6
    else:
        normal, coplanar = None, False

    if coplanar:
        result.symmetry = "circle"
        result.symmetry_axis = _canonical_sign(normal)
        reps = [(c[0], c[1], c[2]) for c in classes
                if c[2] > 1 and abs(c[0] @ normal) > 1e-6]
        in_plane = []
        for k in range(3):
            p = np.eye(3)[k] - normal[k] * normal
            if np.linalg.norm(p) > 1e-6:
                p = _canonical_sign(_normalize(p))
                if math.sqrt(obj.F(p)) <= target and all(_angle(p, q) > cfg.dedupe_tol for q in in_plane):
                    in_plane.append(p)
        if not in_plane:
            in_plane.append(_canonical_sign(singles[0]))
        count = sum(c[2] for c in classes if abs(c[0] @ normal) <= 1e-6)
        for p in in_plane:
            reps.append((p, math.sqrt(obj.F(p)), count))
        if math.sqrt(obj.F(result.symmetry_axis)) <= target and not any(
                _angle(result.symmetry_axis, q[0]) <= cfg.dedupe_tol for q in reps):
            reps.append((result.symmetry_axis, math.sqrt(obj.F(result.symmetry_axis)), 0))
        return reps
    if distinct_fraction >= 0.9:
        result.symmetry = "sphere"
        return [(np.eye(3)[k], math.sqrt(obj.F(np.eye(3)[k])), len(classes)) for k in range(3)]
    result.symmetry = "continuum"
    return [(c[0], c[1], c[2]) for c in classes]
