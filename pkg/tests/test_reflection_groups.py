import pytest

from hessbasis.invariants import minimal_weight
from hessbasis.reflection_groups import (EnumerationError, GroupTooLarge, ReflectionGroup, charpoly_census, classical,
                                         dihedral, enumerate_group, exceptional, parse_spec, weight_orbit)
from hessbasis.exact_arith import UniPoly


@pytest.mark.parametrize("text,order", [("I2:2", 4), ("I2:5", 10), ("I2:6", 12), ("A:4", 24), ("B:3", 48),
                                        ("D:4", 192), ("H3", 120), ("F4", 1152), ("A:2xA:2", 4)])
def test_enumerated_order_matches_degree_product(text, order):
    g = enumerate_group(ReflectionGroup(parse_spec(text)))
    assert g.order == order == g.spec.order


def test_larger_orders():
    assert enumerate_group(ReflectionGroup(exceptional("H4"))).order == 14400
    assert enumerate_group(ReflectionGroup(exceptional("E6"))).order == 51840


def test_e8_refuses_enumeration():
    with pytest.raises(GroupTooLarge):
        enumerate_group(ReflectionGroup(exceptional("E8")))
    assert exceptional("E8").order == 696729600


def test_wrong_generators_are_caught():
    spec = dihedral(3)
    bogus = ReflectionGroup(spec, ReflectionGroup(dihedral(6)).generators)
    with pytest.raises(EnumerationError):
        enumerate_group(bogus)


def test_klein_census():
    census = charpoly_census(enumerate_group(ReflectionGroup(dihedral(2)))).as_dict()
    assert census == {UniPoly([-1, 0, 1]): 2, UniPoly([1, -2, 1]): 1, UniPoly([1, 2, 1]): 1}


def test_census_total_is_order():
    g = enumerate_group(ReflectionGroup(classical("B", 3)))
    assert g.census().total == 48


@pytest.mark.parametrize("name,size", [("H3", 12), ("F4", 24), ("E6", 27), ("E7", 56), ("E8", 240)])
def test_minimal_weight_orbits(name, size):
    spec = exceptional(name)
    assert len(weight_orbit(ReflectionGroup(spec), minimal_weight(spec.cartan))) == size


def test_h4_minimal_orbit_is_a_full_h3_coset():
    # every nonzero H4 orbit has at least |W(H4)| / |W(H3)| = 120 elements
    spec = exceptional("H4")
    assert len(weight_orbit(ReflectionGroup(spec), minimal_weight(spec.cartan))) == 120


def test_parse_spec_forms():
    assert parse_spec("B(2)").name == "B:2"
    assert parse_spec("sign").name == "B:1"
    assert parse_spec("I2:3 x sign").name == "I2:3xB:1"
    with pytest.raises(ValueError):
        parse_spec("Q7")
    with pytest.raises(ValueError):
        dihedral(1)


def test_group_json_round_trip():
    g = ReflectionGroup(exceptional("H3"))
    h = ReflectionGroup.from_json(g.to_json())
    assert h.generators == g.generators and h.spec.name == "H3"
