"""Case analysis for harmonic unit fields with geodesic flow lines in dimension 3.

Given a frame model and a unit field that is harmonic, has totally geodesic
integral curves, is divergence-free and is a Ricci eigenvector, the
invariants

    lambda1^2 = |phi|^2 - lambda,      b^2 = (|phi|^2 + lambda) / 4

decide the case.  When both lambda1 and b are nonzero the field determines a
unimodular bracket algebra; the emitted constants are rebuilt into a frame
model and checked against the predicted Ricci matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import scalar
from .field import FieldAnalysis, cross_matrix
from .frame import FrameModel, ModelError, frame_defect, jacobi_residual, killing_form
from .scalar import EXACT

PARALLEL = "Parallel"
KILLING_SASAKIAN = "KillingSasakianRescale"
B_ZERO = "NonKilling_b_zero"
B_NONZERO = "NonKilling_b_nonzero"
FAILED = "HypothesisFailed"

LAMBDA1_DEAD_BAND = 1e-8

MILNOR_LABELS = {
    (3, 0, 0): "SU2",
    (2, 1, 0): "SL2R",
    (2, 0, 1): "E2",
    (1, 1, 1): "Sol",
    (1, 0, 2): "Nil",
    (0, 0, 3): "Abelian",
}


@dataclass(frozen=True)
class NotEigenvector:
    defect: object


def ricci_alignment(ricci, zeta, tol: float = 1e-10):
    """Eigenvalue of Ric on ``zeta``, or ``NotEigenvector`` carrying the defect."""
    ricci = np.asarray(ricci)
    zeta = np.asarray(zeta)
    rz = ricci @ zeta
    lam = zeta @ rz
    defect = scalar.max_abs(rz - lam * zeta)
    if scalar.is_zero(defect, tol):
        return lam
    return NotEigenvector(defect)


# --- group type -------------------------------------------------------------

def _det3(M):
    return (M[0, 0] * (M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
            - M[0, 1] * (M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0])
            + M[0, 2] * (M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0]))


def _sign_changes(coeffs) -> int:
    signs = [1 if c > 0 else -1 for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def signature(M, tol: float = 1e-10) -> tuple:
    """(positive, negative, zero) eigenvalue counts of a symmetric 3x3 matrix.

    Exact input uses Descartes' rule on the characteristic polynomial, which
    is exact because every root is real.
    """
    M = np.asarray(M)
    if scalar.kernel_of(M) == EXACT:
        tr = np.trace(M)
        e2 = (tr * tr - np.trace(M @ M)) / 2
        det = _det3(M)
        coeffs = [1, -tr, e2, -det]
        zeros = 0
        for c in reversed(coeffs):
            if c != 0:
                break
            zeros += 1
        pos = _sign_changes(coeffs)
        return pos, 3 - pos - zeros, zeros
    M = scalar.float_array(M)
    ev = np.linalg.eigvalsh((M + M.T) / 2)
    cut = tol * max(1.0, float(np.max(np.abs(M))))
    pos = int(np.sum(ev > cut))
    neg = int(np.sum(ev < -cut))
    return pos, neg, 3 - pos - neg


def structure_map(c) -> np.ndarray:
    """L with [u, v] = L(u x v); columns L e1 = [e2,e3], L e2 = [e3,e1], L e3 = [e1,e2]."""
    c = np.asarray(c)
    return np.stack([c[1, 2, :], c[2, 0, :], c[0, 1, :]], axis=1)


@dataclass(frozen=True)
class MilnorType:
    label: str
    eigen_signs: tuple | None = None
    killing_signature: tuple | None = None
    killing_consistent: bool | None = None
    reason: str | None = None


def milnor_type(c, tol: float = 1e-10) -> MilnorType:
    """Group type of a unimodular 3-dimensional Lie algebra.

    The structure map L is self-adjoint exactly when the algebra is
    unimodular; its eigenvalue signs, up to a global flip, give the type.
    The Killing form signature is reported as an independent check.
    """
    c = np.asarray(c)
    if not scalar.is_zero(jacobi_residual(c, tol), tol):
        return MilnorType("NotLie", reason="Jacobi identity fails")
    L = structure_map(c)
    if not scalar.is_zero(scalar.max_abs(L - L.T), tol):
        return MilnorType("NotLie", reason="not unimodular")
    pos, neg, zero = signature(L, tol)
    if neg > pos:
        pos, neg = neg, pos
    label = MILNOR_LABELS[(pos, neg, zero)]
    ksig = signature(killing_form(c, tol), tol)
    neg_def = ksig == (0, 3, 0)
    nondeg = ksig[2] == 0
    consistent = (label == "SU2") == neg_def and (label == "SL2R") == (nondeg and not neg_def)
    return MilnorType(label, (pos, neg, zero), ksig, consistent)


# --- classification ---------------------------------------------------------

@dataclass
class ClassificationResult:
    case: str
    reason: str | None = None
    lam: object = None
    lambda1: object = None
    b: object = None
    norm2_phi: object = None
    trace_phi: object = None
    scal: object = None
    emitted_brackets: tuple | None = None
    reconstructed_ricci: np.ndarray | None = None
    expected_ricci: np.ndarray | None = None
    milnor_type: str | None = None
    emitted_milnor_type: str | None = None
    theorem_family: str | None = None
    compact_obstruction: bool = False
    checks: dict = field(default_factory=dict)
    frame: dict | None = None
    alternate: dict | None = None
    warnings: list = field(default_factory=list)

    def failed_checks(self, tol: float) -> list:
        return [k for k, v in self.checks.items() if not scalar.is_zero(v, tol)]

    def verdict(self, tol: float) -> bool:
        return not self.failed_checks(tol)


def emitted_constants(lam, lambda1, b, scal) -> tuple:
    """(a123, a132, a231) of the bracket algebra attached to a b != 0 field."""
    k = (scal - lam) / (4 * b)
    half_l1 = lambda1 / 2
    return (-k + half_l1 - b, k + half_l1 + b, -2 * b)


def predicted_ricci(lam, lambda1, b, scal, kernel: str) -> np.ndarray:
    one = Fraction(1) if kernel == EXACT else 1.0
    r = (scal - lam) / 2
    t = lambda1 / (2 * b)
    out = scalar.zeros((3, 3), kernel)
    out[0, 0] = lam * one
    out[1, 1] = r * (1 + t)
    out[2, 2] = r * (1 - t)
    return scalar.simplify(out)


def _family_label(case: str, lam, brackets=None) -> str:
    if lam is not None and lam < 0:
        return "lambda < 0: outside the global classification (label only)"
    if case == PARALLEL:
        return "Parallel (locally R x N)"
    if case == KILLING_SASAKIAN:
        return "Killing, Sasakian after homothety (quotients of S3, Nil or the cover of SL2R)"
    if case == B_NONZERO:
        return "Non-Killing: unimodular Lie group with brackets " + ", ".join(scalar.fmt(x) for x in brackets)
    return "none"


def _adjugate_column(A):
    """Largest column of adj(A); for a rank-2 symmetric A it spans the kernel."""
    rows = [A[0], A[1], A[2]]
    cols = [cross_matrix(rows[(i + 1) % 3]) @ rows[(i + 2) % 3] for i in range(3)]
    return max(cols, key=lambda v: float(v @ v))


def _eigenframe(fa: FieldAnalysis, lambda1, b):
    """Orthonormal-up-to-scale (u1, u2) with S u1 = lambda1 u1 and <phi u2, u1> = b |u1|^2."""
    S, phi, z = fa.S, fa.phi, fa.zeta
    if scalar.is_exact_scalar(lambda1) and fa.kernel == EXACT:
        eye = scalar.identity(3, EXACT)
    else:
        S, phi, z = (scalar.float_array(x) for x in (S, phi, z))
        eye = np.eye(3)
    v = _adjugate_column(S - lambda1 * eye)
    n2 = v @ v
    n = scalar.exact_sqrt(n2)
    if scalar.is_exact_scalar(n) and v.dtype == object:
        v, n2 = v / n, n2 / n2
    w = cross_matrix(z) @ v
    proj = (phi @ w) @ v / n2
    s = 1 if (proj > 0) == (b > 0) else -1
    return v, s * w, n2, z


def classify(model: FrameModel, zeta, tol: float = 1e-10) -> ClassificationResult:
    fa = FieldAnalysis(model, zeta, tol)
    kernel = fa.kernel
    norm2, tr = fa.norm2_phi, fa.trace_phi
    scal = fa.model.scal
    harmonic, tg = fa.harmonic, fa.totally_geodesic
    candidate = harmonic and tg
    obstruction = candidate and not fa.divergence_free
    mt = milnor_type(fa.model.c, tol).label

    def failed(reason, lam=None):
        return ClassificationResult(
            case=FAILED, reason=reason, lam=lam, norm2_phi=norm2, trace_phi=tr, scal=scal,
            milnor_type=mt, compact_obstruction=obstruction,
            theorem_family=_family_label(FAILED, lam),
        )

    if not harmonic:
        return failed(f"not harmonic (unit_harmonic residual {scalar.fmt(fa.unit_harmonic)})")
    if not tg:
        return failed("integral curves not totally geodesic")
    lam = ricci_alignment(fa.ricci, fa.zeta, tol)
    if isinstance(lam, NotEigenvector):
        return failed(f"not a Ricci eigenvector (defect {scalar.fmt(lam.defect)})")
    if not fa.divergence_free:
        return failed(f"not divergence-free (trace phi = {scalar.fmt(tr)})", lam)

    scale = max(1.0, abs(float(norm2)), abs(float(lam)))
    exact = kernel == EXACT

    def zero(x, band=tol):
        return x == 0 if scalar.is_exact_scalar(x) and exact else abs(float(x)) <= band * scale

    b2 = (norm2 + lam) / 4
    l1sq = norm2 - lam
    if not zero(b2) and b2 < 0:
        return failed("lambda < -|phi|^2, so b^2 < 0", lam)
    lambda1 = fa.lambda1
    warnings = []
    checks = {"lambda1_identity": abs(lambda1 * lambda1 - l1sq)}
    if zero(b2):
        b2 = b2 * 0
    if not exact and 0 < abs(float(lambda1)) <= LAMBDA1_DEAD_BAND:
        warnings.append(f"lambda1 = {scalar.fmt(lambda1)} lies in the dead band and is treated as 0")
    l1_zero = lambda1 == 0 if exact and scalar.is_exact_scalar(lambda1) else abs(float(lambda1)) <= LAMBDA1_DEAD_BAND
    if l1_zero:
        lambda1 = lambda1 * 0
        checks["lambda1_identity"] = abs(l1sq)
    b = scalar.exact_sqrt(b2)

    res = ClassificationResult(
        case=FAILED, lam=lam, lambda1=lambda1, b=b, norm2_phi=norm2, trace_phi=tr, scal=scal,
        milnor_type=mt, compact_obstruction=False, checks=checks, warnings=warnings,
    )
    if l1_zero:
        # Killing on the horizontal plane
        if zero(lam):
            res.case = PARALLEL
        else:
            res.case = KILLING_SASAKIAN
            resc = conformal_rescale(fa.model, fa.zeta, b)
            res.checks["sasakian_after_rescale"] = resc.sasakian_residual
        res.checks["lemma_kill"] = abs(lam - norm2)
        res.theorem_family = _family_label(res.case, lam)
        return res
    if b2 == 0:
        res.case = B_ZERO
        res.checks["scal_equals_lambda"] = abs(scal - lam)
        res.theorem_family = _family_label(res.case, lam)
        return res

    res.case = B_NONZERO
    if zero(lam):
        # normal form b = -lambda1/2 for the flat case
        b = -lambda1 / 2
        res.b = b
    _verify_nonzero_b(fa, res, lam, lambda1, b, scal)
    alt_b = -b
    res.alternate = {
        "b": alt_b,
        "emitted_brackets": emitted_constants(lam, lambda1, alt_b, scal),
    }
    res.theorem_family = _family_label(res.case, lam, res.emitted_brackets)
    return res


def _verify_nonzero_b(fa, res, lam, lambda1, b, scal):
    u1, u2, n2, z = _eigenframe(fa, lambda1, b)
    zero = n2 * 0
    W = np.array([u1, u2, z])
    norms = [n2, n2, n2 / n2]
    half_l1 = lambda1 / 2
    k = (scal - lam) / (4 * b)

    phi_expected = np.array([[half_l1, b, zero], [-b, -half_l1, zero], [zero, zero, zero]], dtype=object)
    res.checks["matrixphi"] = frame_defect(fa.phi, W, norms, phi_expected)

    g = fa.model.gamma
    zrow = [zero, zero, zero]
    g_exp = np.array([
        [[zero, zero, half_l1], [zero, zero, -b], [-half_l1, b, zero]],
        [[zero, zero, b], [zero, zero, -half_l1], [-b, half_l1, zero]],
        [[zero, -k, zero], [k, zero, zero], zrow],
    ], dtype=object)
    idx3 = [(i, j, k) for i in range(3) for j in range(3) for k in range(3)]
    groups = {
        "christoffel1": [t for t in idx3 if t[0] in (0, 1) and t[1] in (0, 1)],
        "christoffel2": [t for t in idx3 if t[0] == 2],
        "christoffel3": [t for t in idx3 if t[0] in (0, 1) and t[1] == 2],
    }
    for name, entries in groups.items():
        res.checks[name] = _entries_defect(g, W, norms, g_exp, entries)

    ric_exp = np.array([[lam, -lambda1 * k, zero], [-lambda1 * k, zero, zero], [zero, zero, zero]], dtype=object)
    res.checks["ric12"] = _entries_defect(fa.ricci, W, norms, ric_exp, [(0, 1), (1, 0)])
    res.checks["scalb"] = abs(2 * b * (-k) + (scal - lam) / 2)

    brackets = emitted_constants(lam, lambda1, b, scal)
    res.emitted_brackets = brackets
    emitted = FrameModel.unimodular(*brackets, name="emitted") if all(
        scalar.is_exact_scalar(x) for x in brackets) else FrameModel.unimodular(*[float(x) for x in brackets], name="emitted")
    W2 = np.array([z, u1 - u2, u1 + u2])
    res.checks["brackets_in_frame"] = frame_defect(fa.model.c, W2, [norms[2], 2 * n2, 2 * n2], emitted.c)
    res.reconstructed_ricci = emitted.ricci
    kernel = EXACT if all(scalar.is_exact_scalar(x) for x in (lam, lambda1, b, scal)) else scalar.FLOAT
    res.expected_ricci = predicted_ricci(lam, lambda1, b, scal, kernel)
    res.checks["riccifinal"] = scalar.max_abs(scalar.simplify(res.reconstructed_ricci - res.expected_ricci))
    res.emitted_milnor_type = milnor_type(emitted.c).label
    res.checks["milnor_type_preserved"] = 0 if res.emitted_milnor_type == res.milnor_type else 1
    res.frame = {"u1": u1, "u2": u2, "norm2": n2}


def _entries_defect(T, W, norms, expected, entries):
    worst = 0
    for idx in entries:
        d = _entry_defect(T, W, norms, idx, expected[idx])
        if d != 0:
            worst = max(float(worst), float(d))
    return worst


def _entry_defect(T, W, norms, idx, expected):
    vecs = [W[a] for a in idx]
    raw = np.asarray(T)
    for v in vecs:
        raw = np.tensordot(raw, v, axes=([0], [0]))
    raw = raw.item() if hasattr(raw, "item") and np.ndim(raw) == 0 else raw
    prod = 1
    for a in idx:
        prod = prod * norms[a]
    if all(scalar.is_exact_scalar(x) for x in (raw, expected, prod)):
        if (raw > 0) == (expected > 0) and (raw < 0) == (expected < 0) and raw * raw == expected * expected * prod:
            return 0
    return abs(float(raw) / float(scalar.exact_sqrt(prod)) - float(expected))


@dataclass(frozen=True)
class RescaleResult:
    model: FrameModel
    zeta: np.ndarray
    b: object
    sasakian_residual: object
    phi_horizontal: np.ndarray


def conformal_rescale(model: FrameModel, zeta, b, tol: float = 1e-10) -> RescaleResult:
    """Homothety g -> b^2 g re-expressed in the rescaled orthonormal frame e_i / b."""
    if scalar.is_zero(b, 0.0):
        raise ModelError("conformal rescale needs b != 0")
    c = model.c / b
    if c.dtype == object:
        c = scalar.simplify(c)
    rescaled = FrameModel(c, name=f"{model.name}/b", tol=model.tol)
    fa = FieldAnalysis(rescaled, zeta, tol)
    return RescaleResult(rescaled, fa.zeta, b, fa.sasakian_residual(), fa.phi_horizontal)
