import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hessbasis.hessian_basis import CandidateSet, default_basis, dihedral_basis
from hessbasis.invariants import basic_invariants
from hessbasis.multipoly import MultiPoly, SymTensorPoly, hessian_sym, upper_positions
from hessbasis.reflection_groups import GroupTooLarge, ReflectionGroup, dihedral, exceptional, parse_spec
from hessbasis.tensor_decompose import (Decomposition, NotEquivariant, check_equivariance, decompose,
                                        invariant_monomial_basis, reconstruct, symmetrize)

IDENT = SymTensorPoly.constant([[1, 0], [0, 1]])
DX2 = SymTensorPoly.constant([[1, 0], [0, 0]])


def test_monomial_basis():
    assert invariant_monomial_basis([2, 4], 8) == [(4, 0), (2, 1), (0, 2)]
    assert invariant_monomial_basis([1, 2, 3], 3) == [(3, 0, 0), (1, 1, 0), (0, 0, 1)]
    assert invariant_monomial_basis([2, 6, 10], 0) == [(0, 0, 0)]
    assert invariant_monomial_basis([2, 4], -2) == []


def test_equivariance_examples():
    g = ReflectionGroup(dihedral(4))
    assert check_equivariance(IDENT, g)
    assert not check_equivariance(DX2, g)
    rho2 = basic_invariants(dihedral(4))[1].poly
    assert check_equivariance(hessian_sym(rho2), g)
    assert check_equivariance(hessian_sym(basic_invariants(dihedral(5))[1].poly), ReflectionGroup(dihedral(5)))


def test_symmetrize_examples():
    assert symmetrize(DX2, ReflectionGroup(dihedral(2))) == DX2
    assert symmetrize(DX2, ReflectionGroup(dihedral(4))) == IDENT * Fraction(1, 2)
    with pytest.raises(GroupTooLarge):
        symmetrize(SymTensorPoly.zero(8), ReflectionGroup(exceptional("E8")))


def test_decompose_identity_and_basis_element():
    for n in (3, 4, 7):
        spec = dihedral(n)
        dec = decompose(IDENT, dihedral_basis(), basic_invariants(spec), ReflectionGroup(spec))
        assert [str(a) for a in dec.coeffs] == ["1/2", "0", "0"] and not dec.residual
    invs = basic_invariants(dihedral(4))
    dec = decompose(hessian_sym(invs[1].poly), dihedral_basis(), invs)
    assert [str(a) for a in dec.coeffs] == ["0", "0", "1"]


def test_decompose_constructed_i23():
    spec = dihedral(3)
    invs = basic_invariants(spec)
    r1, r2 = (i.poly for i in invs)
    sigma = hessian_sym(r1 * r1) * r1 + hessian_sym(r2) * 7
    dec = decompose(sigma, dihedral_basis(), invs, ReflectionGroup(spec))
    assert [a.pretty("y") for a in dec.coeffs] == ["0", "y1", "7"]
    assert reconstruct(dec, invs) == sigma
    assert Decomposition.from_json(dec.to_json()).coeffs == dec.coeffs


def test_rejects_non_equivariant():
    spec = dihedral(4)
    with pytest.raises(NotEquivariant):
        decompose(DX2, dihedral_basis(), basic_invariants(spec), ReflectionGroup(spec))


def test_residual_flag_with_incomplete_basis():
    spec = dihedral(4)
    invs = basic_invariants(spec)
    # drop Hess(rho2); its own Hessian can then not be reached
    dec = decompose(hessian_sym(invs[1].poly), CandidateSet.parse("r1,r1*r1"), invs)
    assert dec.residual


def test_orbit_invariants_refused():
    spec = exceptional("H3")
    with pytest.raises(ValueError):
        decompose(SymTensorPoly.zero(3), default_basis(spec), basic_invariants(spec))


GROUPS = ["I2:3", "I2:4", "I2:5", "I2:6", "A:2", "A:3", "B:2", "B:3"]


def random_coeffs(rng, degrees, hdeg, top=8):
    out = []
    for h in hdeg:
        terms = {}
        for d in range(0, top - h + 1):
            for e in invariant_monomial_basis(degrees, d):
                if rng.random() < 0.3:
                    terms[e] = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        out.append(MultiPoly(len(degrees), terms))
    return out


@settings(max_examples=25)
@given(st.sampled_from(GROUPS), st.integers(0, 10**9))
def test_round_trip(text, seed):
    spec = parse_spec(text)
    invs = basic_invariants(spec)
    cset = default_basis(spec)
    coeffs = random_coeffs(random.Random(seed), spec.degrees, cset.hessian_degrees(spec.degrees))
    sigma = reconstruct(Decomposition(cset, coeffs), invs)
    dec = decompose(sigma, cset, invs)
    assert not dec.residual
    assert dec.coeffs == coeffs


@settings(max_examples=10)
@given(st.sampled_from(GROUPS + ["D:3"]), st.integers(0, 10**9))
def test_symmetrized_tensors_decompose(text, seed):
    rng = random.Random(seed)
    spec = parse_spec(text)
    n = spec.rank
    entries = {}
    for pos in upper_positions(n):
        terms = {}
        for _ in range(3):
            exp = [0] * n
            for _ in range(rng.randint(0, 6)):
                exp[rng.randrange(n)] += 1
            terms[tuple(exp)] = rng.randint(-5, 5)
        entries[pos] = MultiPoly(n, terms)
    g = ReflectionGroup(spec)
    sigma = symmetrize(SymTensorPoly(n, entries), g)
    assert check_equivariance(sigma, g)
    assert symmetrize(sigma, g) == sigma
    invs = basic_invariants(spec)
    dec = decompose(sigma, default_basis(spec), invs, g)
    assert not dec.residual
    assert reconstruct(dec, invs) == sigma
