"""Equivariant symmetric 2-tensors and their coefficients in a Hessian basis.

Given sigma with g^T sigma(g x) g = sigma(x) for all g, and a certified set
{Q_i}, we solve sigma = sum a_i Hess(Q_i) with a_i invariant.  Each a_i is a
polynomial in abstract variables y_1..y_n standing for the basic invariants.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_arith import Scalar
from .hessian_basis import CandidateSet, Entry
from .invariants import BasicInvariant
from .linalg import InconsistentSystem, solve_unique
from .multipoly import MultiPoly, SymTensorPoly, hessian_sym, upper_positions
from .reflection_groups import ReflectionGroup, enumerate_group

DECOMP_SCHEMA = "hessbasis.decomposition/1"


class NotEquivariant(ValueError):
    pass


def check_equivariance(sigma: SymTensorPoly, g: ReflectionGroup) -> bool:
    """Exact identity g^T sigma(g x) g == sigma(x) for every generator."""
    if sigma.n != g.rank:
        raise ValueError(f"tensor dimension {sigma.n} differs from group rank {g.rank}")
    base = sigma.demoted()
    return all(sigma.transform(m).demoted() == base for m in g.generators)


def invariant_monomial_basis(degrees: Sequence[int], d: int) -> list[tuple[int, ...]]:
    """Exponents e with sum e_i * degrees[i] == d, in lexicographically descending order."""
    if d < 0:
        return []
    n = len(degrees)
    out: list[tuple[int, ...]] = []

    def rec(i: int, left: int, acc: list[int]):
        if i == n:
            if left == 0:
                out.append(tuple(acc))
            return
        for e in range(left // degrees[i], -1, -1):
            acc.append(e)
            rec(i + 1, left - e * degrees[i], acc)
            acc.pop()

    rec(0, d, [])
    return out


@dataclass
class Decomposition:
    cset: CandidateSet
    coeffs: list[MultiPoly]
    residual: bool = False

    def to_json(self) -> dict:
        return {
            "schema": DECOMP_SCHEMA,
            "set": str(self.cset),
            "coefficients": [a.to_json() for a in self.coeffs],
            "pretty": [a.pretty("y") for a in self.coeffs],
            "residual": self.residual,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Decomposition":
        if obj.get("schema") != DECOMP_SCHEMA:
            raise ValueError(f"unsupported decomposition schema {obj.get('schema')!r}")
        return cls(CandidateSet.parse(obj["set"]), [MultiPoly.from_json(a) for a in obj["coefficients"]],
                   bool(obj["residual"]))


def _explicit(invs: Sequence[BasicInvariant]) -> list[MultiPoly]:
    for inv in invs:
        if not inv.is_explicit:
            raise ValueError("decomposition needs explicit invariants; orbit-backed invariants are not expanded")
    return [inv.poly for inv in invs]


def entry_poly(entry: Entry, rhos: Sequence[MultiPoly]) -> MultiPoly:
    p = rhos[entry.i - 1]
    return p * rhos[entry.j - 1] if entry.j is not None else p


class _Powers:
    """Cache of rho^e for exponent vectors e."""

    def __init__(self, rhos: Sequence[MultiPoly]):
        self.rhos = list(rhos)
        self.cache: dict[tuple[int, ...], MultiPoly] = {}

    def __call__(self, e: tuple[int, ...]) -> MultiPoly:
        if e not in self.cache:
            k = next((i for i, x in enumerate(e) if x), None)
            if k is None:
                self.cache[e] = MultiPoly.const(self.rhos[0].n, 1)
            else:
                lower = e[:k] + (e[k] - 1,) + e[k + 1:]
                self.cache[e] = self(lower) * self.rhos[k]
        return self.cache[e]


def decompose(sigma: SymTensorPoly, cset: CandidateSet, invs: Sequence[BasicInvariant],
              group: ReflectionGroup | None = None) -> Decomposition:
    """Solve sigma = sum a_i Hess(Q_i) one homogeneous degree at a time.

    In degree d the slot i contributes invariant monomials of weighted degree
    d - (deg Q_i - 2); slots with a negative remainder contribute nothing.
    The linear systems must have unique solutions, which holds whenever
    ``cset`` is a certified basis.
    """
    if group is not None and not check_equivariance(sigma, group):
        raise NotEquivariant("tensor is not equivariant under the group generators")
    rhos = _explicit(invs)
    n = sigma.n
    if rhos[0].n != n:
        raise ValueError(f"tensor dimension {n} differs from invariant variable count {rhos[0].n}")
    degrees = [inv.degree for inv in invs]
    qs = [entry_poly(e, rhos) for e in cset]
    hess = [hessian_sym(q) for q in qs]
    hdeg = [e.hessian_degree(degrees) for e in cset]
    powers = _Powers(rhos)
    coeff_terms: list[dict[tuple[int, ...], Scalar]] = [{} for _ in qs]
    residual = False
    for d in sigma.degrees():
        part = sigma.homogeneous_part(d)
        unknowns = [(i, e) for i in range(len(qs)) for e in invariant_monomial_basis(degrees, d - hdeg[i])]
        rows: dict[tuple, int] = {}
        cols: list[dict[int, Scalar]] = []
        for i, e in unknowns:
            col: dict[int, Scalar] = {}
            term = hess[i] * powers(e)
            for pos in upper_positions(n):
                for exp, c in term[pos].terms.items():
                    r = rows.setdefault((pos, exp), len(rows))
                    col[r] = c
            cols.append(col)
        rhs_items = []
        for pos in upper_positions(n):
            for exp, c in part[pos].terms.items():
                rhs_items.append((rows.setdefault((pos, exp), len(rows)), c))
        if not unknowns:
            residual = True
            continue
        mat = [[Fraction(0)] * len(unknowns) for _ in range(len(rows))]
        for k, col in enumerate(cols):
            for r, c in col.items():
                mat[r][k] = c
        rhs: list[Scalar] = [Fraction(0)] * len(rows)
        for r, c in rhs_items:
            rhs[r] = c
        try:
            sol = solve_unique(mat, rhs)
        except InconsistentSystem:
            residual = True
            continue
        for (i, e), c in zip(unknowns, sol):
            if c != 0:
                coeff_terms[i][e] = c
    coeffs = [MultiPoly(len(invs), t) for t in coeff_terms]
    return Decomposition(cset, coeffs, residual)


def reconstruct(dec: Decomposition, invs: Sequence[BasicInvariant]) -> SymTensorPoly:
    """sum a_i(rho) Hess(Q_i), expanded in x."""
    rhos = _explicit(invs)
    n = rhos[0].n
    out = SymTensorPoly.zero(n)
    for e, a in zip(dec.cset, dec.coeffs):
        if a.is_zero():
            continue
        out = out + hessian_sym(entry_poly(e, rhos)) * a.compose(rhos)
    return out


def symmetrize(sigma: SymTensorPoly, g: ReflectionGroup, element_bound: int = 10**5) -> SymTensorPoly:
    """Group average (1/|W|) sum_g g^T sigma(g x) g."""
    enumerate_group(g, element_bound)
    elems = g.elements()
    acc = SymTensorPoly.zero(sigma.n)
    for m in elems:
        acc = acc + sigma.transform(m)
    return (acc * Fraction(1, len(elems))).demoted()
