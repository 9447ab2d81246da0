"""Analysis of a unit field with constant frame components on a frame model.

Everything here is frame algebra: phi(X) = -nabla_X zeta, its derivatives,
the Laplacians, and each Weitzenboeck-type identity as a named residual.
Identities that only hold under hypotheses (harmonic, totally geodesic,
divergence-free, Ricci eigenvector) are always evaluated but only asserted
when their hypotheses hold.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import scalar
from .frame import FrameModel, ModelError, covariant_derivative, in_frame, nabla_endomorphism
from .scalar import EXACT

DEFAULT_TOL = 1e-10


class FieldError(ValueError):
    pass


def unit_field(z, kernel: str | None = None) -> np.ndarray:
    """Normalize ``z``; exact if it is rational with a rational length."""
    arr = np.asarray(z, dtype=object).ravel()
    if arr.shape != (3,):
        raise FieldError(f"a field needs 3 components, got {arr.shape[0]}")
    exact_in = all(scalar.is_exact_scalar(v) or isinstance(v, str) for v in arr)
    if exact_in and kernel != scalar.FLOAT:
        q = scalar.exact_array(arr)
        n2 = sum(v * v for v in q)
        if n2 == 0:
            raise FieldError("zero vector cannot be normalized")
        n = scalar.exact_sqrt(n2)
        if scalar.is_exact_scalar(n):
            return np.array([v / n for v in q], dtype=object)
        return scalar.float_array(q) / n
    f = scalar.float_array(arr)
    n = float(np.linalg.norm(f))
    if n == 0.0:
        raise FieldError("zero vector cannot be normalized")
    return f / n


def axis(k: int, kernel: str = EXACT) -> np.ndarray:
    v = scalar.zeros(3, kernel)
    v[k] = Fraction(1) if kernel == EXACT else 1.0
    return v


def cross_matrix(z) -> np.ndarray:
    """Matrix of X -> z x X in the oriented frame."""
    z = np.asarray(z)
    zero = z[0] * 0
    return np.array(
        [[zero, -z[2], z[1]], [z[2], zero, -z[0]], [-z[1], z[0], zero]],
        dtype=z.dtype,
    )


def adapted_pair(z):
    """Unnormalized horizontal pair (w1, w2) with (w1, w2, zeta) right-handed.

    w1 comes from Gram-Schmidt on the frame vector least aligned with zeta
    (lowest index on ties); w2 = zeta x w1.  Both have squared length
    ``1 - zeta_k**2``.
    """
    z = np.asarray(z)
    mags = [abs(v) for v in z]
    k = min(range(3), key=lambda i: (mags[i], i))
    one = Fraction(1) if z.dtype == object else 1.0
    ek = np.array([one if i == k else one * 0 for i in range(3)], dtype=z.dtype)
    w1 = ek - z[k] * z
    w2 = cross_matrix(z) @ w1
    n2 = one - z[k] * z[k]
    return w1, w2, n2


def _inner(A, B):
    return np.sum(np.asarray(A) * np.asarray(B))


@dataclass(frozen=True)
class ShapeOperator:
    phi: np.ndarray
    zeta: np.ndarray
    totally_geodesic: bool
    divergence: object
    horizontal: np.ndarray


@dataclass(frozen=True)
class HorizontalStructure:
    J: np.ndarray
    orientation: int


@dataclass(frozen=True)
class Residual:
    name: str
    value: object
    asserted: bool
    anchor: str
    requires: tuple = ()

    def passes(self, tol: float) -> bool:
        return (not self.asserted) or scalar.is_zero(self.value, tol)


@dataclass
class ResidualMap:
    entries: dict = field(default_factory=dict)

    def add(self, name, value, asserted, anchor, requires=()):
        self.entries[name] = Residual(name, value, bool(asserted), anchor, tuple(requires))

    def __getitem__(self, name) -> Residual:
        return self.entries[name]

    def __iter__(self):
        return iter(self.entries.values())

    def failures(self, tol: float) -> list:
        return [r.name for r in self if not r.passes(tol)]


class FieldAnalysis:
    """Lazy bundle of every quantity derived from (model, zeta).

    ``orientation`` picks the sign of J: +1 means (e1, J e1, zeta) is
    right-handed.
    """

    def __init__(self, model: FrameModel, zeta, tol: float = DEFAULT_TOL, orientation: int = 1):
        if orientation not in (1, -1):
            raise FieldError("orientation must be +1 or -1")
        z = np.asarray(zeta)
        if z.dtype == object and not all(scalar.is_exact_scalar(v) for v in z):
            z = scalar.float_array(z)
        if model.kernel == EXACT and z.dtype == object:
            self.model = model
        else:
            self.model = model if model.kernel != EXACT else model.to_float()
            z = scalar.float_array(z)
        n2 = np.sum(z * z)
        if not scalar.is_zero(n2 - 1, tol):
            raise FieldError(f"zeta is not unit: |zeta|^2 = {float(n2)!r}")
        self.zeta = z
        self.tol = tol
        self.orientation = orientation

    # --- first order -------------------------------------------------------
    @property
    def kernel(self) -> str:
        return self.model.kernel

    @cached_property
    def nabla_zeta(self) -> np.ndarray:
        """``Dz[i] = nabla_{e_i} zeta`` as frame components."""
        return np.einsum("j,ijk->ik", self.zeta, self.model.gamma)

    @cached_property
    def phi(self) -> np.ndarray:
        return -self.nabla_zeta.T

    @cached_property
    def J(self) -> np.ndarray:
        return self.orientation * cross_matrix(self.zeta)

    @cached_property
    def P(self) -> np.ndarray:
        return scalar.identity(3, self.kernel) - np.outer(self.zeta, self.zeta)

    @cached_property
    def S(self) -> np.ndarray:
        return self.phi + self.phi.T

    @cached_property
    def S_tilde(self) -> np.ndarray:
        return self.phi - self.phi.T

    @cached_property
    def norm2_phi(self):
        return _inner(self.phi, self.phi)

    @cached_property
    def trace_phi(self):
        return np.trace(self.phi)

    @cached_property
    def trace_phiJ(self):
        return np.trace(self.phi @ self.J)

    @cached_property
    def phi_zeta(self) -> np.ndarray:
        return self.phi @ self.zeta

    @property
    def totally_geodesic(self) -> bool:
        return scalar.is_zero(scalar.max_abs(self.phi_zeta), self.tol)

    @property
    def divergence_free(self) -> bool:
        return scalar.is_zero(self.trace_phi, self.tol)

    @cached_property
    def det_h(self):
        """Determinant of phi on the horizontal plane (second invariant of P phi P)."""
        A = self.P @ self.phi @ self.P
        return (np.trace(A) ** 2 - np.trace(A @ A)) / 2

    @cached_property
    def lambda1(self):
        """Largest eigenvalue of S restricted to the horizontal plane."""
        A = self.P @ self.S @ self.P
        t = np.trace(A)
        e2 = (t * t - np.trace(A @ A)) / 2
        disc = t * t / 4 - e2
        if not scalar.is_exact_scalar(disc):
            disc = max(float(disc), 0.0)
        return t / 2 + scalar.exact_sqrt(disc)

    @cached_property
    def horizontal_frame(self):
        w1, w2, n2 = adapted_pair(self.zeta)
        return np.array([w1, w2]), [n2, n2]

    @cached_property
    def phi_horizontal(self) -> np.ndarray:
        """2x2 block of phi in the adapted frame (e1, e2); column j is phi(e_j)."""
        W, n2 = self.horizontal_frame
        return in_frame(self.phi, W, n2)

    def shape_operator(self) -> ShapeOperator:
        return ShapeOperator(
            phi=self.phi,
            zeta=self.zeta,
            totally_geodesic=self.totally_geodesic,
            divergence=self.trace_phi,
            horizontal=self.phi_horizontal,
        )

    def horizontal_structure(self) -> HorizontalStructure:
        return HorizontalStructure(J=self.J, orientation=self.orientation)

    def invariants(self) -> dict:
        half = Fraction(1, 2) if self.kernel == EXACT else 0.5
        return {
            "trace_phi": self.trace_phi,
            "det_H": self.det_h,
            "norm2_phi": self.norm2_phi,
            "S": self.S,
            "S_tilde": self.S_tilde,
            "lambda1": self.lambda1,
            "trace_phiJ": self.trace_phiJ,
            "energy_density": 3 * half + half * self.norm2_phi,
        }

    # --- curvature ---------------------------------------------------------
    @property
    def ricci(self) -> np.ndarray:
        return self.model.ricci

    @cached_property
    def ric_zeta(self) -> np.ndarray:
        return self.ricci @ self.zeta

    @cached_property
    def ric_zz(self):
        return self.zeta @ self.ric_zeta

    @cached_property
    def ricci_defect(self):
        return scalar.max_abs(self.ric_zeta - self.ric_zz * self.zeta)

    @property
    def ricci_eigen(self) -> bool:
        return scalar.is_zero(self.ricci_defect, self.tol)

    @cached_property
    def jacobi_operator(self) -> np.ndarray:
        """L(X) = R(X, zeta) zeta as a matrix."""
        return np.einsum("xabl,a,b->lx", self.model.riemann, self.zeta, self.zeta)

    @cached_property
    def R_zeta(self) -> np.ndarray:
        """``Rz[x, y, :] = R(e_x, e_y) zeta``."""
        return np.einsum("xykl,k->xyl", self.model.riemann, self.zeta)

    # --- second order ------------------------------------------------------
    @cached_property
    def hess_zeta(self) -> np.ndarray:
        """``H[i, j, :] = nabla^2_{e_i, e_j} zeta``."""
        g = self.model.gamma
        return covariant_derivative(covariant_derivative(self.zeta, g), g)

    @cached_property
    def rough_laplacian(self) -> np.ndarray:
        return -np.einsum("iia->a", self.hess_zeta)

    @cached_property
    def dphi(self) -> np.ndarray:
        """``dphi[i]`` is the matrix of nabla_{e_i} phi."""
        return nabla_endomorphism(self.phi, self.model.gamma)

    @cached_property
    def dJ(self) -> np.ndarray:
        return nabla_endomorphism(self.J, self.model.gamma)

    def _rough_laplacian_endo(self, M) -> np.ndarray:
        g = self.model.gamma
        form = np.asarray(M).T
        second = covariant_derivative(covariant_derivative(form, g), g)
        return -np.einsum("iixy->yx", second)

    @cached_property
    def laplacian_phi(self) -> np.ndarray:
        return self._rough_laplacian_endo(self.phi)

    @cached_property
    def laplacian_J(self) -> np.ndarray:
        return self._rough_laplacian_endo(self.J)

    @cached_property
    def nabla_zeta_phi(self) -> np.ndarray:
        return np.einsum("i,ikj->kj", self.zeta, self.dphi)

    # --- residual groups ---------------------------------------------------
    @cached_property
    def unit_harmonic(self):
        return scalar.max_abs(self.rough_laplacian - self.norm2_phi * self.zeta)

    @property
    def harmonic(self) -> bool:
        return scalar.is_zero(self.unit_harmonic, self.tol)

    @cached_property
    def harmonic_map(self):
        v = np.einsum("ia,b,abil->l", self.nabla_zeta, self.zeta, self.model.riemann)
        return scalar.max_abs(v)

    def harmonic_residuals(self) -> dict:
        return {"unit_harmonic": self.unit_harmonic, "harmonic_map": self.harmonic_map}

    def killing_and_kostant(self) -> dict:
        killing = scalar.max_abs(self.S)
        r_x_zeta_y = np.einsum("iajl,a->ijl", self.model.riemann, self.zeta)
        kostant = scalar.max_abs(self.hess_zeta - r_x_zeta_y)
        is_killing = scalar.is_zero(killing, self.tol)
        kill_value = abs(self.ric_zz - self.norm2_phi)
        applicable = is_killing and self.ricci_eigen
        return {
            "killing_residual": killing,
            "kostant_residual": kostant,
            "lemma_kill_check": {
                "applicable": applicable,
                "ric_zz": self.ric_zz,
                "norm2_phi": self.norm2_phi,
                "residual": kill_value,
                "holds": (not applicable) or scalar.is_zero(kill_value, self.tol),
            },
        }

    def sasakian_residual(self):
        square = self.phi @ self.phi + scalar.identity(3, self.kernel) - np.outer(self.zeta, self.zeta)
        eye = scalar.identity(3, self.kernel)
        # (nabla_x phi)(e_y) - <e_x, e_y> zeta + <e_y, zeta> e_x, indexed [x, :, y]
        target = np.einsum("xy,l->xly", eye, self.zeta) - np.einsum("y,xl->xly", self.zeta, eye)
        return max(scalar.max_abs(square), scalar.max_abs(self.dphi - target))

    def contact_check(self) -> dict:
        """trace(phi J) against an independent evaluation of (eta ^ d eta)(zeta, e1, e2)."""
        c = self.model.c
        z = self.zeta
        # d eta(e_b, e_c) = -<[e_b, e_c], zeta> for constant-component fields
        d_eta = -np.einsum("bck,k->bc", c, z)
        wedge = z[0] * d_eta[1, 2] + z[1] * d_eta[2, 0] + z[2] * d_eta[0, 1]
        wedge = self.orientation * wedge
        return {
            "trace_phiJ": self.trace_phiJ,
            "wedge_value": wedge,
            "agreement": abs(wedge - self.trace_phiJ),
            "is_contact": not scalar.is_zero(self.trace_phiJ, self.tol),
        }

    def identity_suite(self) -> ResidualMap:
        rm = ResidualMap()
        phi, J, L, ric = self.phi, self.J, self.jacobi_operator, self.ricci
        z = self.zeta
        norm2 = self.norm2_phi
        dphi = self.dphi
        tg, harm, eig = self.totally_geodesic, self.harmonic, self.ricci_eigen
        divfree = self.divergence_free
        lie = self.model.is_lie()
        zero = norm2 * 0

        rm.add("riccati", scalar.max_abs(self.nabla_zeta_phi - phi @ phi - L), tg,
               "(nabla_zeta phi)(X) = phi^2(X) + R(X,zeta)zeta", ["totally_geodesic"])

        codazzi = np.einsum("xly->xyl", dphi) - np.einsum("ylx->xyl", dphi) + self.R_zeta
        rm.add("codazzi", scalar.max_abs(codazzi), True,
               "(nabla_X phi)(Y) - (nabla_Y phi)(X) = -R(X,Y)zeta")

        div_phi = np.einsum("iki->k", dphi)
        rm.add("div_phi", scalar.max_abs(div_phi - norm2 * z), harm,
               "-delta phi = sum_i (nabla_{e_i} phi)(e_i) = |phi|^2 zeta", ["harmonic"])

        delta_phi_T = -np.einsum("iik->k", dphi)
        # d(trace phi) vanishes: trace phi is constant on a homogeneous model
        rm.add("div_phi_T", scalar.max_abs(delta_phi_T - self.ric_zeta), True,
               "delta phi^T = Ric(zeta) - d(trace phi)")

        rm.add("riccati_T", scalar.max_abs(self.nabla_zeta_phi.T - phi.T @ phi.T - L), tg,
               "nabla_zeta phi^T = (phi^T)^2 + L", ["totally_geodesic"])

        dS = dphi + np.einsum("ikj->ijk", dphi)
        dSt = dphi - np.einsum("ikj->ijk", dphi)
        lhs = np.einsum("xzy->xyz", dS) - np.einsum("yzx->xyz", dS)
        rhs = np.einsum("zyx->xyz", dSt) - 2 * self.R_zeta
        rm.add("codazzi_S", scalar.max_abs(lhs - rhs), lie,
               "<(nabla_X S)Y - (nabla_Y S)X, Z> = <(nabla_Z S~)X, Y> - 2R(X,Y,zeta,Z)",
               ["lie_algebra"])

        jphi = J @ phi
        target = -np.einsum("yx,l->xly", jphi, z) + np.einsum("y,lx->xly", z, jphi)
        rm.add("nabla_J", scalar.max_abs(self.dJ - target), True,
               "(nabla_X J)(Y) = -<J phi(X), Y> zeta + <Y, zeta> J phi(X)")

        rm.add("laplacian_J", scalar.max_abs(self.laplacian_J - norm2 * J), harm,
               "nabla* nabla J = |phi|^2 J", ["harmonic"])

        phi_dot_J = _inner(phi, J)
        grad = _inner(dphi, self.dJ)
        rm.add("grad_fj", abs(grad - norm2 * phi_dot_J), tg,
               "<nabla phi, nabla J> = |phi|^2 <phi, J>", ["totally_geodesic"])

        lap_phi_J = _inner(self.laplacian_phi, J)
        rm.add("laplacian_phi_J", abs(lap_phi_J - norm2 * phi_dot_J), harm and tg and eig and lie,
               "<nabla* nabla phi, J> = |phi|^2 <phi, J>",
               ["harmonic", "totally_geodesic", "ricci_eigenvector", "lie_algebra"])

        dR = covariant_derivative(self.model.riemann, self.model.gamma)
        div_R = np.einsum("ixikl,k->lx", dR, z)
        r_phi = np.einsum("ximl,mi->lx", self.model.riemann, phi)
        # grad |phi|^2 vanishes on a homogeneous model
        rhs_full = norm2 * phi - phi @ ric - div_R + 2 * r_phi
        rm.add("laplacian_phi_full", scalar.max_abs(self.laplacian_phi - rhs_full), harm and tg and lie,
               "(nabla* nabla phi)(X) + <X, grad|phi|^2> zeta = |phi|^2 phi(X) - phi(Ric X)"
               " - sum_i (nabla_{e_i} R)(X, e_i, zeta) + 2 sum_i R(X, e_i) phi(e_i)",
               ["harmonic", "totally_geodesic", "lie_algebra"])

        # left sides are zeta-derivatives of constant functions, computed as traces
        # of covariant derivatives so they are evaluated rather than assumed
        tr_phi, tr_phiJ = self.trace_phi, self.trace_phiJ
        d_phiJ = nabla_endomorphism(phi @ J, self.model.gamma)
        ode1_lhs = np.trace(np.einsum("i,ikj->kj", z, d_phiJ))
        rm.add("leaf_ode_1", abs(ode1_lhs - tr_phi * tr_phiJ), tg,
               "zeta(trace(phi J)) = trace(phi) trace(phi J)", ["totally_geodesic"])

        ode2_lhs = np.trace(self.nabla_zeta_phi)
        ode2_a = np.trace(phi @ phi) + self.ric_zz
        ode2_b = tr_phi * tr_phi - 2 * self.det_h + self.ric_zz
        rm.add("leaf_ode_2", max(abs(ode2_lhs - ode2_a), abs(ode2_a - ode2_b)), tg,
               "zeta(trace phi) = trace(phi^2) + Ric(zeta,zeta) = (trace phi)^2 - 2 det(phi) + Ric(zeta,zeta)",
               ["totally_geodesic"])

        ode3_lhs = 2 * _inner(phi, self.nabla_zeta_phi)
        ode3_stated = 2 * np.trace(phi @ phi @ phi.T + phi.T @ L)
        ode3_proof = 2 * np.trace(phi.T @ self.nabla_zeta_phi)
        rm.add("leaf_ode_3", abs(ode3_lhs - ode3_stated), tg,
               "zeta(|phi|^2) = 2 trace(phi^2 phi^T + phi^T L)", ["totally_geodesic"])
        rm.add("leaf_ode_3_alt", abs(ode3_stated - ode3_proof), tg,
               "2 trace(phi^T nabla_zeta phi) = 2 trace(phi^2 phi^T + L phi^T)", ["totally_geodesic"])

        half_zeta_scal = zero  # zeta(Scal) = 0 on a homogeneous model
        lap_trace_rhs = (norm2 * tr_phi - 2 * np.trace(phi @ phi @ phi.T)
                         + np.trace(phi.T @ (ric - 2 * L)) - half_zeta_scal)
        rm.add("laplacian_trace", abs(lap_trace_rhs), harm and tg and lie,
               "Delta trace(phi) = |phi|^2 trace(phi) - 2 trace(phi^2 phi^T) + trace(phi^T(Ric - 2L)) - zeta(Scal)/2",
               ["harmonic", "totally_geodesic", "lie_algebra"])

        lam = self.ric_zz
        l36_rhs = tr_phi * (2 * self.det_h - norm2 + self.model.scal - 3 * lam)
        rm.add("laplacian_trace_eigen", abs(l36_rhs), harm and tg and eig and lie,
               "Delta trace(phi) = trace(phi)(2 det phi - |phi|^2 + Scal - 3 lambda) - zeta(Scal)",
               ["harmonic", "totally_geodesic", "ricci_eigenvector", "lie_algebra"])

        tr_phi2 = np.trace(phi @ phi)
        s2, st2 = _inner(self.S, self.S), _inner(self.S_tilde, self.S_tilde)
        rm.add("norm_identity",
               max(abs(s2 - 2 * norm2 - 2 * tr_phi2), abs(st2 - 2 * norm2 + 2 * tr_phi2)), True,
               "|S|^2 = 2|phi|^2 + 2 trace(phi^2), |S~|^2 = 2|phi|^2 - 2 trace(phi^2)")

        rm.add("trace_phi2", abs(tr_phi2 + lam), divfree and harm and tg and eig,
               "trace(phi^2) = -Ric(zeta,zeta) = -lambda",
               ["divergence_free", "harmonic", "totally_geodesic", "ricci_eigenvector"])
        return rm

    def flags(self) -> dict:
        kk = self.killing_and_kostant()
        return {
            "harmonic": self.harmonic,
            "totally_geodesic": self.totally_geodesic,
            "divergence_free": self.divergence_free,
            "ricci_eigenvector": self.ricci_eigen,
            "lie_algebra": self.model.is_lie(),
            "killing": scalar.is_zero(kk["killing_residual"], self.tol),
        }


# Operation-level entry points -------------------------------------------

def shape_operator(model: FrameModel, zeta, tol: float = DEFAULT_TOL) -> ShapeOperator:
    return FieldAnalysis(model, zeta, tol).shape_operator()


def field_invariants(model: FrameModel, zeta, tol: float = DEFAULT_TOL, orientation: int = 1) -> dict:
    return FieldAnalysis(model, zeta, tol, orientation).invariants()


def rough_laplacian_field(model: FrameModel, zeta, tol: float = DEFAULT_TOL) -> np.ndarray:
    return FieldAnalysis(model, zeta, tol).rough_laplacian


def harmonic_residuals(model: FrameModel, zeta, tol: float = DEFAULT_TOL) -> dict:
    return FieldAnalysis(model, zeta, tol).harmonic_residuals()


def killing_and_kostant(model: FrameModel, zeta, tol: float = DEFAULT_TOL) -> dict:
    return FieldAnalysis(model, zeta, tol).killing_and_kostant()


def sasakian_residual(model: FrameModel, zeta, tol: float = DEFAULT_TOL):
    return FieldAnalysis(model, zeta, tol).sasakian_residual()


def identity_suite(model: FrameModel, zeta, tol: float = DEFAULT_TOL) -> ResidualMap:
    return FieldAnalysis(model, zeta, tol).identity_suite()


def contact_check(model: FrameModel, zeta, tol: float = DEFAULT_TOL, orientation: int = 1) -> dict:
    return FieldAnalysis(model, zeta, tol, orientation).contact_check()
