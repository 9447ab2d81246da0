"""Scalar kernels.

Two kernels are supported: exact rationals (``fractions.Fraction`` held in
numpy ``object`` arrays) and IEEE doubles (``float64`` arrays).  Every tensor
routine in the package is written once against numpy and works for both.
Which kernel an array belongs to is read off its dtype.

Float comparisons always take an explicit tolerance from the caller.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np

EXACT = "exact"
FLOAT = "float"


def is_exact_scalar(x) -> bool:
    return isinstance(x, (int, Rational)) and not isinstance(x, bool)


def kernel_of(arr) -> str:
    arr = np.asarray(arr)
    if arr.dtype == object:
        if all(is_exact_scalar(v) for v in arr.flat):
            return EXACT
        return FLOAT
    return FLOAT


def to_fraction(x) -> Fraction:
    """Parse ints, Fractions, ``"p/q"`` strings and decimal strings exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact scalar")


def exact_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = to_fraction(v)
    return out


def float_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=object)
    return np.array([float(v) for v in arr.flat], dtype=float).reshape(arr.shape)


def as_kernel(values, kernel: str) -> np.ndarray:
    return exact_array(values) if kernel == EXACT else float_array(values)


def zeros(shape, kernel: str) -> np.ndarray:
    if kernel == EXACT:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape)


def identity(n: int, kernel: str) -> np.ndarray:
    out = zeros((n, n), kernel)
    for i in range(n):
        out[i, i] = Fraction(1) if kernel == EXACT else 1.0
    return out


def simplify(arr: np.ndarray) -> np.ndarray:
    """Collapse an object array whose entries degraded to floats into float64."""
    arr = np.asarray(arr)
    if arr.dtype == object and not all(is_exact_scalar(v) for v in arr.flat):
        return float_array(arr)
    return arr


def max_abs(arr) -> float | Fraction:
    """Max-norm; exact when the input is exact.  Empty input gives 0."""
    arr = np.asarray(arr)
    if arr.size == 0:
        return Fraction(0)
    if arr.dtype == object:
        vals = [abs(v) for v in arr.flat]
        return max(vals)
    return float(np.max(np.abs(arr)))


def is_zero(x, tol: float) -> bool:
    """Exact scalars compare exactly; floats against ``tol``."""
    if is_exact_scalar(x):
        return x == 0
    return abs(float(x)) <= tol


def exact_sqrt(q):
    """Square root, exact when ``q`` is a rational perfect square.

    Returns a ``Fraction`` in that case and a float otherwise.  Negative input
    raises ``ValueError``.
    """
    if is_exact_scalar(q):
        q = Fraction(q)
        if q < 0:
            raise ValueError(f"negative radicand {q}")
        n, d = q.numerator, q.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Fraction(rn, rd)
        return math.sqrt(float(q))
    q = float(q)
    if q < 0:
        raise ValueError(f"negative radicand {q}")
    return math.sqrt(q)


def fmt(x) -> str:
    """Serialize a scalar: ``p/q`` for rationals, 17 significant digits for floats."""
    if is_exact_scalar(x):
        f = Fraction(x)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    x = float(x)
    if x == 0.0:
        return "0.0"
    return format(x, ".17g")


def fmt_array(arr):
    arr = np.asarray(arr)
    if arr.ndim == 0:
        return fmt(arr.item())
    return [fmt_array(a) for a in arr]
