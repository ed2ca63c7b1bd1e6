"""Poincare series of invariants and of equivariant symmetric 2-tensors.

Three independent routes are provided: Molien summation over a charpoly census,
summation over (signed) cycle types for the classical groups, and the closed
rational expressions for dihedral and classical types.  ``ratio_polynomial``
divides the Sym^2 series by the invariant series and checks the result.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, prod
from typing import Iterator, Sequence

from .exact_arith import CycloScalar, Scalar, TruncSeries, UniPoly, demote, series_reciprocal
from .reflection_groups import DEFAULT_ELEMENT_BOUND, Census, GroupSpec, ReflectionGroup, enumerate_group, load_fixtures

CHARACTERS = ("trivial", "sym2")


class SeriesInconsistency(ValueError):
    """The Sym^2 series does not yield a valid ratio polynomial."""


def default_truncation(degrees: Sequence[int]) -> int:
    return sum(d - 1 for d in degrees) + 2


def _check_character(character: str):
    if character not in CHARACTERS:
        raise ValueError(f"character must be one of {CHARACTERS}, got {character!r}")


def _rationalize(s: TruncSeries) -> TruncSeries:
    out = []
    for k, c in enumerate(s.coeffs):
        d = demote(c)
        if isinstance(d, CycloScalar):
            raise SeriesInconsistency(f"coefficient of t^{k} is not rational: {d}")
        out.append(d)
    return TruncSeries(s.N, out)


# ---------------------------------------------------------------------------
# Census route
# ---------------------------------------------------------------------------

def class_data(charpoly: UniPoly) -> tuple[UniPoly, Scalar, Scalar]:
    """det(1 - t g), tr g and tr g^2 from the characteristic polynomial of g."""
    n = charpoly.degree
    det = charpoly.reversed_poly(n)
    tr1 = -charpoly[n - 1]
    tr2 = tr1 * tr1 - 2 * charpoly[n - 2] if n >= 2 else tr1 * tr1
    return det, tr1, tr2


def sym2_character(tr1: Scalar, tr2: Scalar) -> Scalar:
    return (tr2 + tr1 * tr1) / 2


def molien_series(census: Census, character: str, N: int) -> TruncSeries:
    """(1/|G|) sum_g chi(g) / det(1 - t g), truncated at t^N."""
    _check_character(character)
    if not census.entries:
        raise ValueError("empty census")
    if N < 1:
        raise ValueError("truncation order must be at least 1")
    acc = TruncSeries(N)
    for charpoly, mult in census.entries:
        det, tr1, tr2 = class_data(charpoly)
        chi = Fraction(1) if character == "trivial" else sym2_character(tr1, tr2)
        term = series_reciprocal(TruncSeries.from_poly(det, N))
        acc = acc + term.scale(chi * mult)
    return _rationalize(acc.scale(Fraction(1, census.total)))


def group_series(g: ReflectionGroup, character: str, N: int | None = None,
                 element_bound: int = DEFAULT_ELEMENT_BOUND) -> TruncSeries:
    enumerate_group(g, element_bound)
    return molien_series(g.census(), character, N or default_truncation(g.spec.degrees))


# ---------------------------------------------------------------------------
# Dihedral direct route
# ---------------------------------------------------------------------------

def molien_dihedral_census(n: int, character: str, N: int) -> TruncSeries:
    """Molien sum for I2(n) from the eigenvalues of a^j (xi^j, xi^-j) and of the n reflections."""
    _check_character(character)
    if n < 2:
        raise ValueError("dihedral groups need n >= 2")
    acc = TruncSeries(N)
    for j in range(n):
        xj = CycloScalar.zeta(n, j)
        xmj = CycloScalar.zeta(n, -j)
        det = UniPoly([1, -(xj + xmj), 1])
        chi = Fraction(1) if character == "trivial" else 1 + CycloScalar.zeta(n, 2 * j) + CycloScalar.zeta(n, -2 * j)
        acc = acc + series_reciprocal(TruncSeries.from_poly(det, N)).scale(chi)
    refl = series_reciprocal(TruncSeries(N, [1, 0, -1]))
    acc = acc + refl.scale(n)
    try:
        return _rationalize(acc.scale(Fraction(1, 2 * n)))
    except SeriesInconsistency as exc:
        raise SeriesInconsistency(f"dihedral Molien sum failed to demote to Q: {exc}") from exc


# ---------------------------------------------------------------------------
# Cycle-type route
# ---------------------------------------------------------------------------

def partitions(n: int, max_part: int | None = None) -> Iterator[dict[int, int]]:
    """Partitions of n as {part length: multiplicity}."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield {}
        return
    for part in range(min(n, max_part), 0, -1):
        for rest in partitions(n - part, part):
            out = dict(rest)
            out[part] = out.get(part, 0) + 1
            yield out


def _series_of_product(factors: Sequence[tuple[UniPoly, int]], N: int) -> TruncSeries:
    s = TruncSeries(N, [1])
    for poly, e in factors:
        if e:
            s = s * series_reciprocal(TruncSeries.from_poly(poly ** e, N))
    return s


def _one_minus(i: int, sign: int = -1) -> UniPoly:
    # 1 - t^i (sign=-1) or 1 + t^i (sign=+1)
    return UniPoly([1] + [0] * (i - 1) + [sign])


def cycle_index_molien(kind: str, n: int, character: str, N: int) -> TruncSeries:
    """Molien series for A/B/D by summing over (signed) cycle types."""
    _check_character(character)
    if kind not in ("A", "B", "D"):
        raise ValueError(f"cycle-index route covers types A, B, D, not {kind!r}")
    if n < 1 or (kind == "D" and n < 2):
        raise ValueError(f"invalid rank {n} for type {kind}")
    acc = TruncSeries(N)
    if kind == "A":
        order = factorial(n)
        for k in partitions(n):
            weight = Fraction(factorial(n), prod(i ** ki * factorial(ki) for i, ki in k.items()))
            k1, k2 = k.get(1, 0), k.get(2, 0)
            chi = Fraction(1) if character == "trivial" else Fraction(k1 * k1 + k1, 2) + k2
            den = _series_of_product([(_one_minus(i), ki) for i, ki in k.items()], N)
            acc = acc + den.scale(weight * chi)
        return acc.scale(Fraction(1, order))
    order = 2 ** n * factorial(n) if kind == "B" else 2 ** (n - 1) * factorial(n)
    for k, kp, km in signed_cycle_types(n):
        if kind == "D" and sum(km.values()) % 2:
            continue
        weight = Fraction(2 ** (n - sum(k.values())) * factorial(n),
                          prod(i ** k[i] * factorial(kp[i]) * factorial(km[i]) for i in k))
        if character == "trivial":
            chi = Fraction(1)
        else:
            p1, m1, p2, m2 = kp.get(1, 0), km.get(1, 0), kp.get(2, 0), km.get(2, 0)
            chi = Fraction(p1 + m1 + comb(p1, 2) + comb(m1, 2) + p2 - p1 * m1 - m2)
        factors = [(_one_minus(i), kp[i]) for i in k] + [(_one_minus(i, 1), km[i]) for i in k]
        acc = acc + _series_of_product(factors, N).scale(weight * chi)
    return acc.scale(Fraction(1, order))


def signed_cycle_types(n: int) -> Iterator[tuple[dict[int, int], dict[int, int], dict[int, int]]]:
    """(k, k+, k-) with k_i = k+_i + k-_i over all partitions of n."""
    for k in partitions(n):
        lengths = sorted(k)

        def split(idx):
            if idx == len(lengths):
                yield {}, {}
                return
            i = lengths[idx]
            for p in range(k[i] + 1):
                for kp, km in split(idx + 1):
                    yield {i: p, **kp}, {i: k[i] - p, **km}

        for kp, km in split(0):
            yield k, kp, km


# ---------------------------------------------------------------------------
# Ratio polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatioPolynomial:
    """P_t(Sym^2 tensors) / P_t(invariants) with nonnegative integer coefficients."""

    coeffs: tuple[int, ...]
    group: str = ""

    @classmethod
    def from_poly(cls, p: UniPoly, group: str = "") -> "RatioPolynomial":
        out = []
        for c in p.coeffs:
            q = demote(c)
            if isinstance(q, CycloScalar) or q.denominator != 1 or q < 0:
                raise SeriesInconsistency(f"ratio coefficient {q} is not a nonnegative integer")
            out.append(int(q))
        return cls(tuple(out), group)

    @classmethod
    def from_exponents(cls, exps: Sequence[int], group: str = "") -> "RatioPolynomial":
        if not exps:
            return cls((), group)
        c = [0] * (max(exps) + 1)
        for e in exps:
            c[e] += 1
        return cls(tuple(c), group)

    @classmethod
    def from_dict(cls, d: dict, group: str = "") -> "RatioPolynomial":
        d = {int(k): int(v) for k, v in d.items()}
        c = [0] * (max(d) + 1)
        for k, v in d.items():
            c[k] = v
        return cls(tuple(c), group)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def exponents(self) -> list[int]:
        return [k for k, c in enumerate(self.coeffs) for _ in range(c)]

    def total(self) -> int:
        return sum(self.coeffs)

    def __add__(self, other: "RatioPolynomial") -> "RatioPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return RatioPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __eq__(self, other):
        if not isinstance(other, RatioPolynomial):
            return NotImplemented
        return _strip(self.coeffs) == _strip(other.coeffs)

    def __hash__(self):
        return hash(_strip(self.coeffs))

    def as_unipoly(self) -> UniPoly:
        return UniPoly(self.coeffs)

    def __str__(self):
        """Ascending order, e.g. ``1 + t^2 + 2*t^6``."""
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "1" if k == 0 else ("t" if k == 1 else f"t^{k}")
            parts.append(mono if c == 1 else (str(c) if k == 0 else f"{c}*{mono}"))
        return " + ".join(parts) or "0"

    def to_json(self):
        return list(self.coeffs)


def _strip(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def invariant_denominator(degrees: Sequence[int]) -> UniPoly:
    p = UniPoly([1])
    for d in degrees:
        p = p * _one_minus(d)
    return p


def ratio_polynomial(sym2_series: TruncSeries, degrees: Sequence[int], group: str = "") -> RatioPolynomial:
    """Multiply the Sym^2 series by prod(1 - t^d_i) and validate the resulting polynomial."""
    n = len(degrees)
    N = sym2_series.N
    need = default_truncation(degrees)
    if N < need:
        raise ValueError(f"truncation order {N} is below the required {need}")
    prodser = sym2_series * TruncSeries.from_poly(invariant_denominator(degrees), N)
    cutoff = min(2 * max(degrees) - 2, sum(d - 1 for d in degrees))
    for k in range(cutoff + 1, N + 1):
        if prodser.coeffs[k] != 0:
            raise SeriesInconsistency(f"guard coefficient of t^{k} is {prodser.coeffs[k]}, expected 0")
    ratio = RatioPolynomial.from_poly(UniPoly(prodser.coeffs[:cutoff + 1]), group)
    if ratio.total() != n * (n + 1) // 2:
        raise SeriesInconsistency(f"ratio coefficients sum to {ratio.total()}, expected {n * (n + 1) // 2}")
    if not ratio.coeffs or ratio.coeffs[0] < 1:
        raise SeriesInconsistency("ratio has zero constant term")
    return ratio


def closed_form_ratio(kind: str, n: int) -> RatioPolynomial:
    """Closed rational expressions for I2(n), A, B, D, reduced to polynomials."""
    one = UniPoly([1])
    t = lambda k: UniPoly.monomial(k)  # noqa: E731
    om = _one_minus
    if kind == "I2":
        if n < 2:
            raise ValueError("dihedral groups need n >= 2")
        p = one + t(2) + t(n - 2)
    elif kind == "A":
        if n < 1:
            raise ValueError("type A needs n >= 1")
        p = om(n).exact_div(om(1)) + (om(n - 1) * om(n)).exact_div(om(1) * om(2)) if n > 1 else \
            om(n).exact_div(om(1))
    elif kind == "B":
        if n < 1:
            raise ValueError("type B needs n >= 1")
        p = om(2 * n).exact_div(om(2))
        if n > 1:
            p = p + (om(2 * n - 2) * om(2 * n) * t(2)).exact_div(om(2) * om(4))
    elif kind == "D":
        if n < 2:
            raise ValueError("type D needs n >= 2")
        second = (t(2) + t(n - 2)) * om(2 * n - 2) * om(n)
        p = om(2 * n).exact_div(om(2)) + second.exact_div(om(2) * om(4))
    else:
        raise ValueError(f"no closed form for type {kind!r}")
    return RatioPolynomial.from_poly(p, f"{kind}:{n}")


def product_ratio(ra: RatioPolynomial, da: Sequence[int], rb: RatioPolynomial, db: Sequence[int]) -> RatioPolynomial:
    """ratio(W1 x W2) = ratio(W1) + ratio(W2) + (sum t^(d_i-1)) (sum t^(e_j-1))."""
    cross = RatioPolynomial.from_exponents([a + b - 2 for a in da for b in db])
    return ra + rb + cross


def fixture_ratio(name: str, fixtures: dict | None = None) -> RatioPolynomial:
    """Published ratio row for an exceptional group (the only source for E8)."""
    row = (fixtures or load_fixtures())["exceptional"][name]
    return RatioPolynomial.from_dict(row["ratio"], name)


def census_ratio(g: ReflectionGroup, N: int | None = None,
                 element_bound: int = DEFAULT_ELEMENT_BOUND) -> RatioPolynomial:
    N = N or default_truncation(g.spec.degrees)
    return ratio_polynomial(group_series(g, "sym2", N, element_bound), g.spec.degrees, g.spec.name)


def ratio_for(spec: GroupSpec, method: str = "census", N: int | None = None) -> RatioPolynomial:
    N = N or default_truncation(spec.degrees)
    if method == "census":
        return census_ratio(ReflectionGroup(spec), N)
    if method == "cycle-index":
        if spec.kind not in ("A", "B", "D"):
            raise ValueError("cycle-index route covers types A, B, D only")
        return ratio_polynomial(cycle_index_molien(spec.kind, spec.param, "sym2", N), spec.degrees, spec.name)
    if method == "closed-form":
        if spec.kind not in ("I2", "A", "B", "D"):
            raise ValueError("closed forms exist for I2, A, B, D only")
        return closed_form_ratio(spec.kind, spec.param)
    if method == "dihedral":
        if spec.kind != "I2":
            raise ValueError("dihedral route needs an I2 group")
        return ratio_polynomial(molien_dihedral_census(spec.param, "sym2", N), spec.degrees, spec.name)
    if method == "fixture":
        return fixture_ratio(spec.kind)
    raise ValueError(f"unknown method {method!r}")


def reference_ratio(spec: GroupSpec, fixtures: dict | None = None) -> RatioPolynomial:
    """Ratio without enumerating: closed forms, the fixture table, or the product identity."""
    if spec.kind in ("I2", "A", "B", "D"):
        return closed_form_ratio(spec.kind, spec.param)
    if spec.kind == "product":
        out, degs = reference_ratio(spec.factors[0], fixtures), list(spec.factors[0].degrees)
        for f in spec.factors[1:]:
            out = product_ratio(out, degs, reference_ratio(f, fixtures), f.degrees)
            degs += list(f.degrees)
        return RatioPolynomial(out.coeffs, spec.name)
    return fixture_ratio(spec.kind, fixtures)
