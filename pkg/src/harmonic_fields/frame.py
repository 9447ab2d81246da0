"""Tensor calculus on homogeneous 3-frame models.

A frame model is an orthonormal frame (e1, e2, e3) whose brackets have
constant coefficients, ``[e_i, e_j] = sum_k c[i, j, k] e_k``.  All tensors
handled here have constant frame components, so covariant derivatives reduce
to contractions with the connection table.

Index conventions (0-based internally, 1-based in reports):

* ``gamma[i, j, k] = <nabla_{e_i} e_j, e_k>``
* ``R[i, j, k, l] = <R(e_i, e_j) e_k, e_l>`` with
  ``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``
* ``ricci[a, b] = sum_i R[i, a, b, i]``, positive on the round sphere.

Endomorphisms (phi, J, the Jacobi operator) are stored as ordinary matrices,
``M @ x``, so column ``j`` holds the image of ``e_j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import scalar
from .scalar import EXACT, FLOAT


class ModelError(ValueError):
    """Malformed structure constants or a model outside an operation's domain."""


def _half(kernel: str):
    return Fraction(1, 2) if kernel == EXACT else 0.5


def _check_shape(c: np.ndarray) -> None:
    if c.shape != (3, 3, 3):
        raise ModelError(f"structure constants must have shape (3, 3, 3), got {c.shape}")


def antisymmetry_defect(c) -> float | Fraction:
    c = np.asarray(c)
    return scalar.max_abs(c + np.einsum("jik->ijk", c))


def check_antisymmetric(c, tol: float = 1e-12) -> None:
    c = np.asarray(c)
    _check_shape(c)
    defect = antisymmetry_defect(c)
    if not scalar.is_zero(defect, tol):
        raise ModelError(f"structure constants are not antisymmetric in (i, j): defect {float(defect):.3g}")


def jacobi_tensor(c) -> np.ndarray:
    """``J[i, j, k, l]``: e_l-component of the cyclic sum [[e_i,e_j],e_k] + ..."""
    c = np.asarray(c)
    a = np.einsum("ijm,mkl->ijkl", c, c)
    return a + np.einsum("jkil->ijkl", a) + np.einsum("kijl->ijkl", a)


def jacobi_residual(c, tol: float = 1e-12):
    check_antisymmetric(c, tol)
    return scalar.max_abs(jacobi_tensor(c))


def levi_civita(c) -> np.ndarray:
    """Koszul formula for an orthonormal frame with constant brackets."""
    c = np.asarray(c)
    kernel = scalar.kernel_of(c)
    return _half(kernel) * (c - np.einsum("jki->ijk", c) + np.einsum("kij->ijk", c))


def torsion_defect(gamma, c):
    return scalar.max_abs(gamma - np.einsum("jik->ijk", gamma) - c)


def metric_defect(gamma):
    return scalar.max_abs(gamma + np.einsum("ikj->ijk", gamma))


@dataclass(frozen=True)
class CurvatureBundle:
    riemann: np.ndarray
    ricci: np.ndarray
    scal: object


def riemann_tensor(gamma, c) -> np.ndarray:
    gamma = np.asarray(gamma)
    c = np.asarray(c)
    return (
        np.einsum("jkm,iml->ijkl", gamma, gamma)
        - np.einsum("ikm,jml->ijkl", gamma, gamma)
        - np.einsum("ijm,mkl->ijkl", c, gamma)
    )


def curvature(gamma, c) -> CurvatureBundle:
    riem = riemann_tensor(gamma, c)
    ric = np.einsum("iabi->ab", riem)
    return CurvatureBundle(riemann=riem, ricci=ric, scal=np.trace(ric))


def riemann_symmetry_defects(riem) -> dict:
    """Max-norm defects of the algebraic curvature identities."""
    return {
        "antisym_12": scalar.max_abs(riem + np.einsum("jikl->ijkl", riem)),
        "antisym_34": scalar.max_abs(riem + np.einsum("ijlk->ijkl", riem)),
        "pair_sym": scalar.max_abs(riem - np.einsum("klij->ijkl", riem)),
        "bianchi_1": scalar.max_abs(
            riem + np.einsum("jkil->ijkl", riem) + np.einsum("kijl->ijkl", riem)
        ),
    }


def covariant_derivative(T, gamma) -> np.ndarray:
    """Covariant derivative of a covariant tensor with constant frame components.

    The new derivative slot comes first: ``out[i, a1, ..., ar] =
    (nabla_{e_i} T)(e_a1, ..., e_ar)``.  Applying this twice gives the second
    covariant derivative with ``out[i, j, ...] = nabla^2_{e_i, e_j} T``.
    """
    T = np.asarray(T)
    gamma = np.asarray(gamma)
    rank = T.ndim
    if rank > 4:
        raise ModelError(f"tensor rank {rank} exceeds the supported maximum of 4")
    kernel = EXACT if (scalar.kernel_of(T) == EXACT and scalar.kernel_of(gamma) == EXACT) else FLOAT
    out = scalar.zeros((3,) + T.shape, kernel)
    for slot in range(rank):
        term = np.tensordot(gamma, T, axes=([2], [slot]))
        out = out - np.moveaxis(term, 1, slot + 1)
    return out


def connection_matrices(gamma) -> np.ndarray:
    """``G[i]`` is the matrix of ``Y -> nabla_{e_i} Y`` on constant-component fields."""
    return np.einsum("imk->ikm", np.asarray(gamma))


def nabla_endomorphism(M, gamma) -> np.ndarray:
    """``D[i] = nabla_{e_i} M`` for an endomorphism matrix, i.e. ``[G_i, M]``."""
    G = connection_matrices(gamma)
    M = np.asarray(M)
    return np.einsum("ikm,mj->ikj", G, M) - np.einsum("km,imj->ikj", M, G)


def killing_form(c, tol: float = 1e-12) -> np.ndarray:
    """``B(e_i, e_j) = trace(ad e_i o ad e_j)``; only defined for Lie algebras."""
    c = np.asarray(c)
    defect = jacobi_residual(c, tol)
    if not scalar.is_zero(defect, tol):
        raise ModelError(f"Killing form needs a Lie algebra: Jacobi defect {float(defect):.3g}")
    return np.einsum("iab,jba->ij", c, c)


def in_frame(T, W, norms2) -> np.ndarray:
    """Evaluate a multilinear form on normalized versions of the rows of ``W``.

    ``W`` holds mutually orthogonal vectors whose squared lengths ``norms2``
    need not be 1.  The normalization is applied once per entry through the
    product of squared lengths, so exact inputs stay exact whenever that
    product is a rational square.
    """
    T = np.asarray(T)
    W = np.asarray(W)
    raw = T
    for _ in range(T.ndim):
        # contract the leading axis of raw against W, appending the new axis last
        raw = np.tensordot(raw, W, axes=([0], [1]))
    out = np.empty(raw.shape, dtype=object)
    for idx in np.ndindex(raw.shape):
        prod = 1
        for a in idx:
            prod = prod * norms2[a]
        out[idx] = raw[idx] / scalar.exact_sqrt(prod)
    return scalar.simplify(out)


def frame_defect(T, W, norms2, expected):
    """Max deviation of ``in_frame(T, W, norms2)`` from ``expected``.

    Entries are compared through squares (value^2 * prod == raw^2 with equal
    signs) so an exact identity reports an exact zero even when the
    normalization is irrational.
    """
    T = np.asarray(T)
    W = np.asarray(W)
    expected = np.asarray(expected)
    raw = T
    for _ in range(T.ndim):
        raw = np.tensordot(raw, W, axes=([0], [1]))
    worst = 0
    for idx in np.ndindex(raw.shape):
        prod = 1
        for a in idx:
            prod = prod * norms2[a]
        r, e = raw[idx], expected[idx]
        if scalar.is_exact_scalar(r) and scalar.is_exact_scalar(e) and scalar.is_exact_scalar(prod):
            if (r > 0) == (e > 0) and (r < 0) == (e < 0) and r * r == e * e * prod:
                continue
        d = abs(float(r) / scalar.exact_sqrt(prod) - float(e))
        worst = max(worst, d)
    return worst


def unimodular_constants(alpha, beta, gamma) -> np.ndarray:
    """Brackets [e1,e2] = alpha e3, [e1,e3] = beta e2, [e2,e3] = gamma e1."""
    vals = (alpha, beta, gamma)
    kernel = EXACT if all(_is_rational_input(v) for v in vals) else FLOAT
    a, b, g = (scalar.to_fraction(v) if kernel == EXACT else float(v) for v in vals)
    c = scalar.zeros((3, 3, 3), kernel)
    c[0, 1, 2], c[1, 0, 2] = a, -a
    c[0, 2, 1], c[2, 0, 1] = b, -b
    c[1, 2, 0], c[2, 1, 0] = g, -g
    return c


def _is_rational_input(v) -> bool:
    if scalar.is_exact_scalar(v):
        return True
    if isinstance(v, str):
        try:
            Fraction(v.strip())
            return True
        except ValueError:
            return False
    return False


class FrameModel:
    """A homogeneous orthonormal frame model given by its structure constants."""

    def __init__(self, c, name: str | None = None, tol: float = 1e-12):
        c = np.asarray(c)
        if c.dtype.kind in "iu":
            c = scalar.exact_array(c)
        elif c.dtype != object:
            c = np.asarray(c, dtype=float)
        _check_shape(c)
        check_antisymmetric(c, tol)
        self.c = c
        self.name = name or "frame"
        self.tol = tol

    @classmethod
    def unimodular(cls, alpha, beta, gamma, name: str | None = None) -> "FrameModel":
        c = unimodular_constants(alpha, beta, gamma)
        return cls(c, name=name or "unimodular")

    @property
    def kernel(self) -> str:
        return scalar.kernel_of(self.c)

    def to_float(self) -> "FrameModel":
        return FrameModel(scalar.float_array(self.c), name=self.name, tol=self.tol)

    @cached_property
    def gamma(self) -> np.ndarray:
        return levi_civita(self.c)

    @cached_property
    def curv(self) -> CurvatureBundle:
        return curvature(self.gamma, self.c)

    @property
    def riemann(self) -> np.ndarray:
        return self.curv.riemann

    @property
    def ricci(self) -> np.ndarray:
        return self.curv.ricci

    @property
    def scal(self):
        return self.curv.scal

    @cached_property
    def jacobi(self):
        return jacobi_residual(self.c, self.tol)

    def is_lie(self) -> bool:
        return scalar.is_zero(self.jacobi, self.tol)

    def unimodular_params(self):
        """(alpha, beta, gamma) if the brackets have the diagonal form, else None."""
        c = self.c
        mask = np.zeros((3, 3, 3), dtype=bool)
        for i, j, k in ((0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 0, 1), (1, 2, 0), (2, 1, 0)):
            mask[i, j, k] = True
        if not scalar.is_zero(scalar.max_abs(np.where(mask, 0, c)), self.tol):
            return None
        return c[0, 1, 2], c[0, 2, 1], c[1, 2, 0]

    def __repr__(self) -> str:
        return f"FrameModel(name={self.name!r}, kernel={self.kernel})"
