import json
from fractions import Fraction
from itertools import product

import pytest

from hessbasis.hessian_basis import (CandidateSet, Certificate, Pair, Single, certify, certify_many, classical_T,
                                     default_basis, dihedral_basis, enumerate_candidate_sets, point_hessian,
                                     product_basis, t0_options)
from hessbasis.invariants import NotRegular, RegularVector, basic_invariants, certify_regular, default_regular_vector
from hessbasis.molien import RatioPolynomial, closed_form_ratio, fixture_ratio, reference_ratio
from hessbasis.multipoly import hessian_sym, tensor_eval
from hessbasis.reflection_groups import classical, dihedral, exceptional, parse_spec

I24 = dihedral(4)


def test_i24_has_exactly_one_set():
    sets = enumerate_candidate_sets(I24.degrees, closed_form_ratio("I2", 4))
    assert [str(s) for s in sets] == ["r1,r2,r1*r1"]


def test_h3_two_sets_both_certify():
    spec = exceptional("H3")
    sets = enumerate_candidate_sets(spec.degrees, fixture_ratio("H3"))
    assert len(sets) == 2
    invs = basic_invariants(spec)
    certs = certify_many(sets, invs, (1, 2, 3))
    assert all(c.certified for c in certs)


def test_set_sizes_and_degrees():
    spec = exceptional("E6")
    for s in enumerate_candidate_sets(spec.degrees, fixture_ratio("E6")):
        assert len(s) == 21
        assert s.matches(spec.degrees, fixture_ratio("E6"))


def test_point_hessian_examples():
    invs = basic_invariants(I24)
    assert point_hessian(Single(1), invs, (Fraction(3), Fraction(-1))) == [[2, 0], [0, 2]]
    assert point_hessian(Pair(1, 1), invs, (1, 2)) == [[28, 16], [16, 52]]


@pytest.mark.parametrize("text", ["I2:5", "A:3", "B:2", "D:3"])
def test_point_hessian_matches_symbolic(text):
    spec = parse_spec(text)
    invs = basic_invariants(spec)
    v = tuple(Fraction(k + 2, k + 1) for k in range(spec.rank))
    for i in range(len(invs)):
        for j in range(i, len(invs)):
            if invs[i].degree + invs[j].degree > 12:
                continue
            expected = tensor_eval(hessian_sym(invs[i].poly * invs[j].poly), v)
            assert point_hessian(Pair(i + 1, j + 1), invs, v) == expected


def test_certify_verdicts():
    invs = basic_invariants(I24)
    good = certify(CandidateSet.parse("r1,r2,r1*r1"), invs, (1, 2))
    assert good.verdict == "certified"
    bad = certify(CandidateSet.parse("r1,r1*r1,r1*r1"), invs, (1, 2))
    assert bad.verdict == "degenerate" and bad.determinant == 0


def test_certify_requires_regular_point():
    invs = basic_invariants(I24)
    with pytest.raises(NotRegular):
        certify(dihedral_basis(), invs, (1, 1))
    with pytest.raises(NotRegular):
        certify(dihedral_basis(), invs, RegularVector((Fraction(1), Fraction(2)), False, Fraction(0)))
    with pytest.raises(ValueError):
        certify(CandidateSet.parse("r1,r2"), invs, (1, 2))


def test_certificate_round_trip_and_reverify():
    spec = exceptional("H3")
    invs = basic_invariants(spec)
    cert = certify(default_basis(spec), invs, (1, 2, 3), group="H3", keep_matrix=True)
    obj = json.loads(json.dumps(cert.to_json(include_matrix=True)))
    again = Certificate.from_json(obj)
    assert again.determinant == cert.determinant
    assert again.reverify(invs)
    obj["determinant"] = "1"
    assert not Certificate.from_json(obj).reverify(invs)


def test_classical_T_examples():
    assert str(classical_T("B", 2)) == "r1,r2,r1*r1"
    assert str(classical_T("A", 3)) == "r2,r3,r1*r1,r1*r2,r1*r3,r2*r2"
    assert str(classical_T("D", 3)) == "r1,r2,r3,r1*r1,r1*r3,r3*r3"


def test_classical_T_choices_validated():
    opts = t0_options("B", 4)
    assert set(opts) == {5, 6, 7, 8}
    with pytest.raises(ValueError):
        classical_T("B", 4, {5: (1, 3)})
    with pytest.raises(ValueError):
        classical_T("B", 4, {9: (4, 5)})
    alt = classical_T("B", 4, {5: (2, 3), 6: (3, 3)})
    assert alt != classical_T("B", 4)


@pytest.mark.parametrize("kind,n", [("A", 4), ("B", 3), ("B", 4), ("D", 4), ("D", 5)])
def test_every_T0_choice_is_a_valid_candidate_and_certifies(kind, n):
    spec = classical(kind, n)
    opts = t0_options(kind, n)
    ratio = closed_form_ratio(kind, n)
    valid = {str(s) for s in enumerate_candidate_sets(spec.degrees, ratio, require_all_singles=False)}
    invs = basic_invariants(spec)
    rv = default_regular_vector(spec, invs)
    for picks in product(*opts.values()):
        t = classical_T(kind, n, dict(zip(opts, picks)))
        assert str(t.sorted()) in valid
        assert certify(t, invs, rv).certified


def test_dihedral_basis_degrees():
    for n in range(2, 13):
        assert dihedral_basis().ratio((2, n)) == closed_form_ratio("I2", n)


def test_product_bases():
    assert str(product_basis(CandidateSet.parse("r1"), CandidateSet.parse("r1"), 1, 1)) == "r1,r2,r1*r2"
    spec = parse_spec("I2:3xsign")
    t = default_basis(spec)
    assert len(t) == 6 and t.ratio(spec.degrees) == reference_ratio(spec)
    invs = basic_invariants(spec)
    assert certify(t, invs, (1, 2, 1)).certified
    spec = parse_spec("A:2xA:2")
    t = default_basis(spec)
    assert len(t) == 10 and t.ratio(spec.degrees) == RatioPolynomial((5, 4, 1))


def test_point_robustness():
    spec = exceptional("F4")
    invs = basic_invariants(spec)
    sets = enumerate_candidate_sets(spec.degrees, fixture_ratio("F4"))
    sets.append(CandidateSet.parse("r1,r2,r3,r4,r1*r1,r1*r1,r1*r2,r1*r3,r1*r4,r2*r2"))
    verdicts = []
    for v in [(2, -3, 5, 7), (1, 4, -2, 9), (Fraction(1, 3), 5, 11, -6)]:
        rv = certify_regular(invs, v)
        assert rv.certified
        verdicts.append([certify(s, invs, rv).verdict for s in sets])
    assert verdicts[0] == verdicts[1] == verdicts[2]
    assert verdicts[0] == ["certified", "certified", "degenerate"]


def test_parallel_matches_serial():
    spec = exceptional("E6")
    invs = basic_invariants(spec)
    sets = enumerate_candidate_sets(spec.degrees, fixture_ratio("E6"))[:4]
    rv = default_regular_vector(spec, invs)
    a = [c.determinant for c in certify_many(sets, invs, rv, threads=1)]
    b = [c.determinant for c in certify_many(sets, invs, rv, threads=2)]
    assert a == b
