from fractions import Fraction

import pytest

from harmonic_fields import catalog
from harmonic_fields.catalog import CatalogError, check, get, names


@pytest.mark.parametrize("name", names())
def test_every_entry_reproduces_its_facts(name):
    inst = get(name)
    results = check(inst)
    assert results
    failed = [(r.fact.name, r.deviation) for r in results if not r.passed]
    assert not failed


@pytest.mark.parametrize("name, params", [
    ("unimodular", {"alpha": "1/2", "beta": -3, "gamma": "7/4"}),
    ("unimodular", {"alpha": 0.3, "beta": -1.2, "gamma": 2.5}),
    ("flat-torus", {"a": -3}),
    ("sphere-su2", {"c": 3}),
    ("hyperbolic-torus", {"A": [[3, 2], [1, 1]]}),
])
def test_parameterized_entries(name, params):
    assert all(r.passed for r in check(get(name, params)))


def test_hopf_sheet():
    inst = get("hopf")
    assert inst.frame.unimodular_params() == (2, -2, 2)
    facts = {f.name: f for f in inst.facts}
    assert facts["ricci"].basis == catalog.PUBLISHED
    assert catalog.quantity(inst, "lambda", "e3") == 2


def test_hyperbolic_space_sheet():
    inst = get("hyperbolic-space")
    assert catalog.quantity(inst, "trace_phi", "e3") == -2
    assert catalog.quantity(inst, "compact_obstruction", "e3") is True
    assert catalog.quantity(inst, "totally_geodesic", "e3") is True
    assert catalog.quantity(inst, "unit_harmonic", "e3") == 0


def test_errors():
    with pytest.raises(CatalogError):
        get("nope")
    with pytest.raises(CatalogError):
        get("hopf", {"x": 1})
    with pytest.raises(CatalogError):
        get("flat-torus", {"a": 0})
    with pytest.raises(CatalogError):
        get("hyperbolic-torus", {"A": [[1, 1], [0, 1]]})
    with pytest.raises(CatalogError):
        catalog.quantity(get("hopf"), "nonsense", "e3")


def test_flat_torus_exact_kernel():
    inst = get("flat-torus", {"a": "5/2"})
    assert catalog.quantity(inst, "b", "e3") == Fraction(-5, 4)
