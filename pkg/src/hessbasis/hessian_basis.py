"""Candidate Hessian bases: enumeration, point certification and explicit constructions.

A candidate set is a list of invariants drawn from the basic invariants
rho_i and their pairwise products rho_i rho_j.  It is certified at a regular
vector v by stacking the upper-triangular entries of each Hessian at v into
a square matrix and checking that its exact determinant is nonzero.
"""
from __future__ import annotations

import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

from . import __version__
from .exact_arith import Scalar, demote, scalar_from_json, scalar_to_json
from .reflection_groups import EXCEPTIONAL, GroupSpec, load_fixtures
from .invariants import (BasicInvariant, Jet, NotRegular, RegularVector, basic_invariants, certify_regular,
                         default_regular_vector)
from .linalg import determinant
from .molien import RatioPolynomial, closed_form_ratio, fixture_ratio

CERT_SCHEMA = "hessbasis.certificate/1"


@dataclass(frozen=True, order=True)
class Entry:
    """rho_i (``j is None``) or the product rho_i rho_j with i <= j; indices are 1-based."""

    i: int
    j: int | None = None

    def __post_init__(self):
        if self.i < 1 or (self.j is not None and self.j < self.i):
            raise ValueError(f"bad entry indices ({self.i}, {self.j})")

    @property
    def is_pair(self) -> bool:
        return self.j is not None

    def degree(self, degrees: Sequence[int]) -> int:
        d = degrees[self.i - 1]
        return d + degrees[self.j - 1] if self.j is not None else d

    def hessian_degree(self, degrees: Sequence[int]) -> int:
        return self.degree(degrees) - 2

    def shifted(self, k: int) -> "Entry":
        return Entry(self.i + k, None if self.j is None else self.j + k)

    def sort_key(self):
        return (0, self.i, 0) if self.j is None else (1, self.i, self.j)

    def __str__(self):
        return f"r{self.i}" if self.j is None else f"r{self.i}*r{self.j}"


def Single(i: int) -> Entry:
    return Entry(i)


def Pair(i: int, j: int) -> Entry:
    return Entry(min(i, j), max(i, j))


_TOKEN = re.compile(r"^r(\d+)(?:\s*\*\s*r(\d+))?$")


def parse_entry(text: str) -> Entry:
    m = _TOKEN.match(text.strip())
    if not m:
        raise ValueError(f"cannot parse entry {text!r}; expected r<i> or r<i>*r<j>")
    i = int(m.group(1))
    return Single(i) if m.group(2) is None else Pair(i, int(m.group(2)))


@dataclass(frozen=True)
class CandidateSet:
    entries: tuple[Entry, ...]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def hessian_degrees(self, degrees: Sequence[int]) -> list[int]:
        return [e.hessian_degree(degrees) for e in self.entries]

    def ratio(self, degrees: Sequence[int]) -> RatioPolynomial:
        return RatioPolynomial.from_exponents(self.hessian_degrees(degrees))

    def matches(self, degrees: Sequence[int], ratio: RatioPolynomial) -> bool:
        n = len(degrees)
        if len(self) != n * (n + 1) // 2:
            return False
        if any(max(e.i, e.j or 0) > n for e in self.entries):
            return False
        hd = self.hessian_degrees(degrees)
        return min(hd, default=0) >= 0 and RatioPolynomial.from_exponents(hd) == ratio

    def sorted(self) -> "CandidateSet":
        return CandidateSet(tuple(sorted(self.entries, key=Entry.sort_key)))

    def __str__(self):
        return ",".join(str(e) for e in self.entries)

    @classmethod
    def parse(cls, text: str) -> "CandidateSet":
        return cls(tuple(parse_entry(t) for t in text.split(",") if t.strip()))


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def candidate_pool(degrees: Sequence[int]) -> list[Entry]:
    """All rho_i and rho_i rho_j with nonzero Hessian, in a fixed order."""
    n = len(degrees)
    pool = [Single(i) for i in range(1, n + 1) if degrees[i - 1] >= 2]
    pool += [Pair(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    return pool


def enumerate_candidate_sets(degrees: Sequence[int], ratio: RatioPolynomial,
                             require_all_singles: bool = True) -> list[CandidateSet]:
    """Every subset of the pool whose Hessian degrees give ``ratio``.

    Sets are produced degree by degree: for each exponent e with multiplicity
    c, choose c of the pool entries of Hessian degree e.  An empty list means
    no such set exists.
    """
    n = len(degrees)
    if ratio.total() != n * (n + 1) // 2:
        raise ValueError(f"ratio {ratio} does not sum to {n * (n + 1) // 2}")
    forced: list[Entry] = []
    if require_all_singles:
        if any(d < 2 for d in degrees):
            raise ValueError("a linear invariant has zero Hessian; use require_all_singles=False")
        forced = [Single(i) for i in range(1, n + 1)]
    by_degree: dict[int, list[Entry]] = {}
    for e in candidate_pool(degrees):
        if e in forced:
            continue
        by_degree.setdefault(e.hessian_degree(degrees), []).append(e)
    need = dict(enumerate(ratio.coeffs))
    for e in forced:
        k = e.hessian_degree(degrees)
        need[k] = need.get(k, 0) - 1
        if need[k] < 0:
            return []
    choices = []
    for k in sorted(need):
        c = need[k]
        if c == 0:
            continue
        options = by_degree.get(k, [])
        if len(options) < c:
            return []
        choices.append(list(combinations(options, c)))
    out = []
    for combo in product(*choices):
        entries = list(forced)
        for part in combo:
            entries.extend(part)
        out.append(CandidateSet(tuple(entries)).sorted())
    return out


# ---------------------------------------------------------------------------
# Point Hessians and certification
# ---------------------------------------------------------------------------

def _pair_hessian(a: Jet, b: Jet) -> list[list[Scalar]]:
    n = len(a.gradient)
    ga, gb = a.gradient, b.gradient
    out = []
    for r in range(n):
        row = []
        for c in range(n):
            x = ga[r] * gb[c] + gb[r] * ga[c] + a.value * b.hessian[r][c] + b.value * a.hessian[r][c]
            row.append(demote(x) if not isinstance(x, Fraction) else x)
        out.append(row)
    return out


def _hessian_from_jets(entry: Entry, jets: Sequence[Jet]) -> list[list[Scalar]]:
    if entry.j is None:
        return [list(row) for row in jets[entry.i - 1].hessian]
    return _pair_hessian(jets[entry.i - 1], jets[entry.j - 1])


def point_hessian(entry: Entry, invs: Sequence[BasicInvariant], v: Sequence[Scalar]) -> list[list[Scalar]]:
    """Hessian of rho_i or rho_i rho_j at v, via the product rule for pairs."""
    if len(v) != invs[0].n:
        raise ValueError(f"point has {len(v)} coordinates, invariants have {invs[0].n} variables")
    idx = {entry.i} | ({entry.j} if entry.j is not None else set())
    if max(idx) > len(invs):
        raise ValueError(f"entry {entry} refers to a missing invariant")
    jets = {k: invs[k - 1].jet(v) for k in idx}
    if entry.j is None:
        return [list(row) for row in jets[entry.i].hessian]
    return _pair_hessian(jets[entry.i], jets[entry.j])


def hessian_matrix(cset: CandidateSet, invs: Sequence[BasicInvariant], v: Sequence[Scalar],
                   jets: Sequence[Jet] | None = None) -> list[list[Scalar]]:
    """Rows are the upper-triangular Hessian entries of each candidate at v."""
    jets = jets if jets is not None else [inv.jet(v) for inv in invs]
    n = len(v)
    rows = []
    for e in cset:
        h = _hessian_from_jets(e, jets)
        rows.append([h[a][b] for a in range(n) for b in range(a, n)])
    return rows


@dataclass
class Certificate:
    group: str
    cset: CandidateSet
    point: tuple[Scalar, ...]
    determinant: Scalar
    matrix: list[list[Scalar]] | None = None
    engine: str = field(default=__version__)

    @property
    def verdict(self) -> str:
        return "certified" if self.determinant != 0 else "degenerate"

    @property
    def certified(self) -> bool:
        return self.determinant != 0

    def to_json(self, include_matrix: bool = False) -> dict:
        out = {
            "schema": CERT_SCHEMA,
            "group": self.group,
            "set": str(self.cset),
            "point": [scalar_to_json(x) for x in self.point],
            "determinant": scalar_to_json(self.determinant),
            "verdict": self.verdict,
            "engine": self.engine,
        }
        if include_matrix and self.matrix is not None:
            out["matrix"] = [[scalar_to_json(x) for x in row] for row in self.matrix]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        if obj.get("schema") != CERT_SCHEMA:
            raise ValueError(f"unsupported certificate schema {obj.get('schema')!r}")
        mat = obj.get("matrix")
        return cls(obj["group"], CandidateSet.parse(obj["set"]),
                   tuple(scalar_from_json(x) for x in obj["point"]),
                   scalar_from_json(obj["determinant"]),
                   [[scalar_from_json(x) for x in row] for row in mat] if mat is not None else None,
                   obj.get("engine", ""))

    def reverify(self, invs: Sequence[BasicInvariant]) -> bool:
        """Recompute the determinant from scratch and compare exactly."""
        fresh = certify(self.cset, invs, self.point, group=self.group)
        return fresh.determinant == self.determinant and fresh.verdict == self.verdict


def _as_regular(invs: Sequence[BasicInvariant], v) -> RegularVector:
    rv = v if isinstance(v, RegularVector) else certify_regular(invs, tuple(v))
    if not rv.certified:
        raise NotRegular(f"point {rv.point} is not a certified regular vector")
    return rv


def _check_size(cset: CandidateSet, n: int, n_invs: int):
    if len(cset) != n * (n + 1) // 2:
        raise ValueError(f"candidate set has {len(cset)} entries, need {n * (n + 1) // 2}")
    for e in cset:
        if max(e.i, e.j or 0) > n_invs:
            raise ValueError(f"entry {e} refers to a missing invariant")


def certify(cset: CandidateSet, invs: Sequence[BasicInvariant], v, group: str = "",
            keep_matrix: bool = False) -> Certificate:
    rv = _as_regular(invs, v)
    n = len(rv.point)
    _check_size(cset, n, len(invs))
    mat = hessian_matrix(cset, invs, rv.point)
    return Certificate(group, cset, rv.point, determinant(mat), mat if keep_matrix else None)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("HESSBASIS_THREADS", "1")))
    except ValueError:
        return 1


def certify_many(csets: Sequence[CandidateSet], invs: Sequence[BasicInvariant], v, group: str = "",
                 threads: int | None = None) -> list[Certificate]:
    """Certify several sets against one point, sharing the invariant jets.

    Determinants run in a process pool when ``threads`` (default from
    HESSBASIS_THREADS) exceeds 1; results keep input order either way.
    """
    rv = _as_regular(invs, v)
    n = len(rv.point)
    for c in csets:
        _check_size(c, n, len(invs))
    jets = [inv.jet(rv.point) for inv in invs]
    mats = [hessian_matrix(c, invs, rv.point, jets) for c in csets]
    threads = thread_count() if threads is None else threads
    if threads > 1 and len(mats) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            dets = list(pool.map(determinant, mats))
    else:
        dets = [determinant(m) for m in mats]
    return [Certificate(group, c, rv.point, d) for c, d in zip(csets, dets)]


# ---------------------------------------------------------------------------
# Explicit constructions
# ---------------------------------------------------------------------------

def _t0_ranges(kind: str, n: int) -> tuple[list[Entry], range, int]:
    """Fixed part of T0, the k-range needing one pair each, and the index cap."""
    if kind == "A":
        return [Single(1)], range(n + 2, 2 * n + 1), n
    if kind == "B":
        return [], range(n + 1, 2 * n + 1), n
    if kind == "D":
        if n < 2:
            raise ValueError("type D needs n >= 2")
        return [Pair(n - 1, n)], range(n, 2 * n - 1), n - 1
    raise ValueError(f"unknown classical type {kind!r}")


def t0_options(kind: str, n: int) -> dict[int, list[tuple[int, int]]]:
    """For each required k, the pairs (i, j) with i <= j, i + j = k allowed in T0."""
    _, ks, cap = _t0_ranges(kind, n)
    return {k: [(i, k - i) for i in range(1, k // 2 + 1) if k - i <= cap] for k in ks}


def classical_T(kind: str, n: int, t0_choice: dict[int, tuple[int, int]] | None = None) -> CandidateSet:
    """All rho_i and rho_i rho_j minus a T0 of n elements.

    ``t0_choice`` maps each required k to the pair removed for it; missing
    choices default to the lexicographically smallest pair.
    """
    fixed, ks, cap = _t0_ranges(kind, n)
    options = t0_options(kind, n)
    choice = dict(t0_choice or {})
    extra = set(choice) - set(ks)
    if extra:
        raise ValueError(f"t0_choice has keys {sorted(extra)} outside the required range {list(ks)}")
    t0 = list(fixed)
    for k in ks:
        pick = tuple(sorted(choice.get(k, options[k][0])))
        if pick not in options[k]:
            raise ValueError(f"pair {pick} is not valid for k={k}; options are {options[k]}")
        t0.append(Pair(*pick))
    if len(set(t0)) != n:
        raise ValueError("T0 must have n distinct elements")
    degrees = (list(range(1, n + 1)) if kind == "A" else [2 * j for j in range(1, n + 1)] if kind == "B"
               else [2 * j for j in range(1, n)] + [n])
    pool = [Single(i) for i in range(1, n + 1)] + [Pair(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    cset = CandidateSet(tuple(e for e in pool if e not in t0))
    if not cset.matches(degrees, closed_form_ratio(kind, n)):
        raise ValueError(f"T for {kind}:{n} does not match the closed-form ratio")
    return cset


def dihedral_basis() -> CandidateSet:
    return CandidateSet((Single(1), Pair(1, 1), Single(2)))


def product_basis(ta: CandidateSet, tb: CandidateSet, basics_a: Sequence | int,
                  basics_b: Sequence | int) -> CandidateSet:
    """Ta, Tb shifted past the first factor's invariants, and every rho_i psi_j."""
    na = basics_a if isinstance(basics_a, int) else len(basics_a)
    nb = basics_b if isinstance(basics_b, int) else len(basics_b)
    cross = [Pair(i, na + j) for i in range(1, na + 1) for j in range(1, nb + 1)]
    return CandidateSet(tuple(ta.entries) + tuple(e.shifted(na) for e in tb.entries) + tuple(cross))


def default_basis(spec: GroupSpec, fixtures: dict | None = None) -> CandidateSet:
    """The canonical basis for ``spec``: closed forms, or the first enumerated set."""
    if spec.kind == "I2":
        return dihedral_basis()
    if spec.kind in ("A", "B", "D"):
        return classical_T(spec.kind, spec.param)
    if spec.kind in EXCEPTIONAL:
        sets = enumerate_candidate_sets(spec.degrees, fixture_ratio(spec.kind, fixtures or load_fixtures()))
        if not sets:
            raise ValueError(f"no candidate set for {spec.name}")
        return sets[0]
    if spec.kind == "product":
        out = default_basis(spec.factors[0], fixtures)
        n = spec.factors[0].rank
        for f in spec.factors[1:]:
            out = product_basis(out, default_basis(f, fixtures), n, f.rank)
            n += f.rank
        return out
    raise ValueError(f"unknown group kind {spec.kind!r}")


def certify_default(spec: GroupSpec, fixtures: dict | None = None) -> Certificate:
    invs = basic_invariants(spec)
    rv = default_regular_vector(spec, invs, fixtures)
    return certify(default_basis(spec, fixtures), invs, rv, group=spec.name)


def sets_from_text(lines: Iterable[str]) -> list[CandidateSet]:
    return [CandidateSet.parse(s) for s in lines if s.strip()]
