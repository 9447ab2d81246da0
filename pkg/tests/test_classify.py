from fractions import Fraction

import numpy as np
import pytest

from harmonic_fields import scalar
from harmonic_fields.catalog import get
from harmonic_fields.classify import (B_NONZERO, B_ZERO, FAILED, KILLING_SASAKIAN, PARALLEL, NotEigenvector,
                                      classify, conformal_rescale, milnor_type, ricci_alignment)
from harmonic_fields.field import axis, unit_field
from harmonic_fields.frame import FrameModel, ModelError

from _models import unimodular_triples

E = scalar.EXACT


def test_ricci_alignment():
    assert ricci_alignment(FrameModel.unimodular(2, -2, 2).ricci, axis(2)) == 2
    assert ricci_alignment(FrameModel.unimodular(1, 2, 3).ricci, axis(0)) == 0
    torus = get("hyperbolic-torus")
    import math
    L = math.log(torus.params["beta"])
    assert ricci_alignment(torus.frame.ricci, axis(2, scalar.FLOAT)) == pytest.approx(-2 * L * L)


def test_ricci_alignment_not_eigen():
    ric = FrameModel.unimodular(1, 2, 3).ricci
    r = ricci_alignment(ric, unit_field([3, 0, 4]))
    assert isinstance(r, NotEigenvector) and r.defect > 0


def test_classify_123():
    r = classify(FrameModel.unimodular(1, 2, 3), axis(2))
    assert r.case == B_NONZERO
    assert (r.lam, r.lambda1, r.b) == (-12, 5, Fraction(1, 2))
    assert r.emitted_brackets == (2, 3, -1)
    assert scalar.max_abs(r.reconstructed_ricci - np.diag([-12, 0, 0])) == 0
    assert r.milnor_type == r.emitted_milnor_type == "SL2R"
    assert r.verdict(0)
    assert r.lambda1 ** 2 == r.norm2_phi - r.lam
    assert r.b ** 2 == (r.norm2_phi + r.lam) / 4


def test_classify_hopf_and_parallel():
    r = classify(FrameModel.unimodular(2, -2, 2), axis(2))
    assert r.case == KILLING_SASAKIAN and r.b == 1 and r.lambda1 == 0
    r = classify(FrameModel(np.full((3, 3, 3), Fraction(0), dtype=object)), axis(2))
    assert r.case == PARALLEL


@pytest.mark.parametrize("a", [1, 3, Fraction(5, 2), -2])
def test_flat_torus_normal_form(a):
    a = Fraction(a)
    r = classify(FrameModel.unimodular(a, -a, 0), axis(2))
    assert r.case == B_NONZERO
    assert r.lam == 0 and r.lambda1 == abs(a) and r.b == -abs(a) / 2
    assert r.emitted_brackets == (abs(a), 0, abs(a))
    assert r.milnor_type == "E2"
    assert r.verdict(0)


def test_hyperbolic_torus_b_zero():
    torus = get("hyperbolic-torus").frame
    r = classify(torus, axis(2, scalar.FLOAT))
    assert r.case == B_ZERO
    assert r.b == 0
    assert abs(r.scal - r.lam) <= 1e-12


def test_hypothesis_failures():
    torus = get("hyperbolic-torus").frame
    r = classify(torus, axis(0, scalar.FLOAT))
    assert r.case == FAILED and "totally geodesic" in r.reason
    r = classify(get("hyperbolic-space").frame, axis(2))
    assert r.case == FAILED and "divergence" in r.reason
    assert r.compact_obstruction
    r = classify(FrameModel.unimodular(1, 2, 3), unit_field([1, 2, 2]))
    assert r.case == FAILED and "harmonic" in r.reason


def test_conformal_rescale():
    hopf = FrameModel.unimodular(2, -2, 2)
    res = conformal_rescale(hopf, axis(2), 1)
    assert res.sasakian_residual == 0
    r = classify(FrameModel.unimodular(6, -6, 6), axis(2))
    assert r.b == 3
    res = conformal_rescale(FrameModel.unimodular(6, -6, 6), axis(2), r.b)
    assert scalar.max_abs(res.model.c - hopf.c) == 0 and res.sasakian_residual == 0
    with pytest.raises(ModelError):
        conformal_rescale(hopf, axis(2), 0)


def test_round_trip_and_idempotence():
    seen = 0
    for t in unimodular_triples(100):
        m = FrameModel.unimodular(*t)
        r = classify(m, axis(2))
        if r.case == FAILED:
            continue
        assert r.lambda1 ** 2 == r.norm2_phi - r.lam
        assert r.b ** 2 == (r.norm2_phi + r.lam) / 4
        if r.case != B_NONZERO:
            continue
        seen += 1
        assert r.verdict(0), r.failed_checks(0)
        assert scalar.max_abs(r.reconstructed_ricci - r.expected_ricci) == 0
        # zeta sits at e1 in the emitted algebra
        again = classify(FrameModel.unimodular(*r.emitted_brackets), axis(0))
        assert (again.lam, again.lambda1, again.norm2_phi) == (r.lam, r.lambda1, r.norm2_phi)
        assert again.emitted_brackets == r.emitted_brackets
        if r.alternate:
            alt = FrameModel.unimodular(*r.alternate["emitted_brackets"])
            assert milnor_type(alt.c).label == r.emitted_milnor_type
    assert seen > 50


def test_float_kernel_round_trip():
    for t in unimodular_triples(30):
        m = FrameModel.unimodular(*(float(x) for x in t))
        r = classify(m, axis(2, scalar.FLOAT))
        if r.case == B_NONZERO:
            assert r.verdict(1e-10), r.failed_checks(1e-10)


def test_lemma_kill_on_killing_inputs():
    for c in (1, 2, Fraction(1, 3)):
        r = classify(FrameModel.unimodular(2 * c, -2 * c, 2 * c), axis(2))
        assert r.case == KILLING_SASAKIAN and r.lam == r.norm2_phi >= 0


@pytest.mark.parametrize("args, label", [
    ((2, -2, 2), "SU2"), ((1, 2, 3), "SL2R"), ((2, 3, -1), "SL2R"), ((3, -3, 0), "E2"),
    ((1, 1, 0), "Sol"), ((1, 0, 0), "Nil"), ((0, 0, 0), "Abelian"),
])
def test_milnor_labels(args, label):
    mt = milnor_type(FrameModel.unimodular(*args).c)
    assert mt.label == label
    assert mt.killing_consistent


def test_milnor_not_lie():
    mt = milnor_type(get("hyperbolic-space").frame.c)
    assert mt.label == "NotLie" and mt.reason == "not unimodular"
