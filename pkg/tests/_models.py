"""Seeded random model generators shared by the test modules."""
import random
from fractions import Fraction

import numpy as np

from harmonic_fields import FrameModel

SEED = 20261017


def rational(rng, lo=-5, hi=5, den=4):
    return Fraction(rng.randint(lo * den, hi * den), den)


def unimodular_triples(n, seed=SEED):
    rng = random.Random(seed)
    return [tuple(rational(rng) for _ in range(3)) for _ in range(n)]


def cayley_rotation(rng):
    """Rational orthogonal matrix (I - K)(I + K)^-1 from a random skew K."""
    a, b, c = (rational(rng, -2, 2, 3) for _ in range(3))
    K = np.array([[0, -a, b], [a, 0, -c], [-b, c, 0]], dtype=object)
    eye = np.array([[Fraction(int(i == j)) for j in range(3)] for i in range(3)], dtype=object)
    M = eye + K
    # inverse by adjugate
    det = (M[0, 0] * (M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1]) - M[0, 1] * (M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0])
           + M[0, 2] * (M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0]))
    adj = np.empty((3, 3), dtype=object)
    for i in range(3):
        for j in range(3):
            r = [x for x in range(3) if x != j]
            s = [x for x in range(3) if x != i]
            minor = M[r[0], s[0]] * M[r[1], s[1]] - M[r[0], s[1]] * M[r[1], s[0]]
            adj[i, j] = (-1) ** (i + j) * minor
    return (eye - K) @ (adj / det)


def rotate(c, Q):
    """Structure constants of the frame e'_i = sum_a Q[i, a] e_a."""
    return np.einsum("ia,jb,kc,abc->ijk", Q, Q, Q, c)


def solvable_constants(rng):
    """[e3, e1] = p e1 + q e2, [e3, e2] = r e1 + s e2 (not unimodular in general)."""
    p, q, r, s = (rational(rng) for _ in range(4))
    c = np.full((3, 3, 3), Fraction(0), dtype=object)
    c[2, 0, 0], c[2, 0, 1], c[2, 1, 0], c[2, 1, 1] = p, q, r, s
    c[0, 2] = -c[2, 0]
    c[1, 2] = -c[2, 1]
    return c


def random_lie_models(n, seed=SEED):
    """Alternating unimodular and solvable algebras, each in a rotated frame."""
    rng = random.Random(seed)
    out = []
    for i in range(n):
        if i % 2 == 0:
            base = FrameModel.unimodular(*(rational(rng) for _ in range(3))).c
        else:
            base = solvable_constants(rng)
        out.append(FrameModel(rotate(base, cayley_rotation(rng)), name=f"lie-{i}"))
    return out


def random_frame_constants(rng):
    """Antisymmetric constants with no Jacobi constraint."""
    c = np.full((3, 3, 3), Fraction(0), dtype=object)
    for i in range(3):
        for j in range(i + 1, 3):
            for k in range(3):
                v = rational(rng)
                c[i, j, k], c[j, i, k] = v, -v
    return c
