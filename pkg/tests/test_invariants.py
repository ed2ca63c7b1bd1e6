from fractions import Fraction

import pytest

from hessbasis.invariants import (NotRegular, OrbitInvariant, basic_invariants, certify_regular, check_invariance,
                                  default_regular_vector, dihedral_invariants, is_regular, jacobian_at,
                                  minimal_weight, parse_point)
from hessbasis.multipoly import LinearForm, MultiPoly, hessian_sym, tensor_eval
from hessbasis.reflection_groups import ReflectionGroup, classical, dihedral, exceptional, parse_spec


def test_dihedral_invariants_explicit():
    r1, r2 = dihedral_invariants(4)
    x, y = MultiPoly.var(2, 0), MultiPoly.var(2, 1)
    assert r2.poly == x ** 4 - (x * x * y * y).scale(6) + y ** 4
    assert r1.degree == 2 and r2.degree == 4


@pytest.mark.parametrize("text", ["I2:3", "I2:5", "I2:8", "A:3", "B:3", "D:4", "A:2xB:1"])
def test_explicit_invariants_are_invariant(text):
    spec = parse_spec(text)
    g = ReflectionGroup(spec)
    invs = basic_invariants(spec)
    assert [i.degree for i in invs] == list(spec.degrees)
    assert all(check_invariance(i, g) for i in invs)


@pytest.mark.parametrize("name", ["H3", "F4"])
def test_orbit_invariants_are_invariant(name):
    spec = exceptional(name)
    g = ReflectionGroup(spec)
    assert all(check_invariance(i, g, samples=4) for i in basic_invariants(spec, g))


def test_orbit_jet_agrees_with_expansion():
    spec = exceptional("H3")
    inv = basic_invariants(spec)[1]
    p = inv.chern.expand()
    v = (Fraction(1), Fraction(-2), Fraction(5, 3))
    jet = inv.jet(v)
    assert jet.value == p.evaluate(v)
    assert jet.gradient == [p.diff(i).evaluate(v) for i in range(3)]
    assert jet.hessian == tensor_eval(hessian_sym(p), v)


def test_psi2_of_sign_orbit():
    inv = OrbitInvariant([LinearForm([1]), LinearForm([-1])], 2)
    assert inv.jet((Fraction(7),)).hessian == [[4]]


def test_minimal_weight_values():
    lam = minimal_weight(exceptional("E8").cartan)
    assert lam.w == (0,) * 7 + (1,)


def test_vandermonde_jacobian():
    invs = basic_invariants(classical("A", 3))
    ok, d = is_regular(invs, (1, 2, 3))
    assert ok and d == 2
    assert jacobian_at(invs, (1, 2, 3))[1] == [1, 2, 3]
    assert not certify_regular(invs, (1, 1, 2)).certified


@pytest.mark.parametrize("name", ["H3", "H4", "F4", "E6", "E7", "E8"])
def test_published_points_are_regular(name):
    spec = exceptional(name)
    assert default_regular_vector(spec).certified


def test_default_points_classical():
    for spec in (classical("A", 4), classical("B", 3), classical("D", 4), dihedral(7)):
        assert default_regular_vector(spec).certified


def test_singular_point_detected():
    spec = dihedral(4)
    # (1, 1) lies on the mirror x = y
    assert not certify_regular(basic_invariants(spec), (1, 1)).certified


def test_parse_point():
    assert parse_point("1, -2/3,5") == (1, Fraction(-2, 3), 5)
    with pytest.raises(ValueError):
        parse_point("1,a")


def test_default_regular_vector_raises_on_singular(monkeypatch):
    import hessbasis.invariants as mod
    monkeypatch.setattr(mod, "default_point", lambda spec, fx=None: (Fraction(1), Fraction(1)))
    with pytest.raises(NotRegular):
        mod.default_regular_vector(dihedral(4))
