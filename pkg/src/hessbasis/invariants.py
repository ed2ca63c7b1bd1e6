"""Basic invariants, Jacobians at points and regular-vector certification."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .exact_arith import CycloScalar, Scalar, demote
from .reflection_groups import (EXCEPTIONAL, GroupSpec, Matrix, ReflectionGroup, WeightOrbit, load_fixtures, weight_orbit)
from .linalg import determinant, inverse_matrix
from .multipoly import LinearForm, MultiPoly

Point = tuple[Scalar, ...]


class NotRegular(ValueError):
    pass


def parse_point(text: str) -> Point:
    """Comma-separated rationals, e.g. ``"1,-2/3,5"``."""
    try:
        return tuple(Fraction(p.strip()) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ValueError(f"cannot parse point {text!r}: {exc}") from None


def _matvec(g: Matrix, v: Sequence[Scalar]) -> Point:
    out = []
    for row in g:
        acc: Scalar = Fraction(0)
        for x, y in zip(row, v):
            if x != 0 and y != 0:
                acc = acc + x * y
        out.append(demote(acc) if isinstance(acc, CycloScalar) else acc)
    return tuple(out)


def _clean(x: Scalar) -> Scalar:
    return demote(x) if isinstance(x, CycloScalar) else x


@dataclass
class Jet:
    """Value, gradient and Hessian of an invariant at a point."""

    value: Scalar
    gradient: list[Scalar]
    hessian: list[list[Scalar]]


class OrbitInvariant:
    """psi_m = sum over the orbit of lambda^m, evaluated pointwise and never expanded."""

    def __init__(self, orbit: WeightOrbit | Sequence[LinearForm], m: int):
        self.forms = list(orbit)
        self.m = m
        self.n = len(self.forms[0])

    def jet(self, v: Sequence[Scalar]) -> Jet:
        n, m = self.n, self.m
        val: Scalar = Fraction(0)
        grad: list[Scalar] = [Fraction(0)] * n
        hess: list[list[Scalar]] = [[Fraction(0)] * n for _ in range(n)]
        if m < 1:
            raise ValueError("orbit invariants need m >= 1")
        for lam in self.forms:
            x = lam(v)
            pm2 = x ** (m - 2) if m >= 2 else Fraction(0)
            pm1 = pm2 * x if m >= 2 else Fraction(1)
            val = val + pm1 * x
            w = lam.w
            for a in range(n):
                if w[a] == 0:
                    continue
                grad[a] = grad[a] + pm1 * w[a]
                if m >= 2:
                    wa = pm2 * w[a]
                    for b in range(a, n):
                        if w[b] != 0:
                            hess[a][b] = hess[a][b] + wa * w[b]
        mm1 = m * (m - 1)
        grad = [_clean(g * m) for g in grad]
        for a in range(n):
            for b in range(a, n):
                hess[a][b] = _clean(hess[a][b] * mm1)
                hess[b][a] = hess[a][b]
        return Jet(_clean(val), grad, hess)

    def value(self, v) -> Scalar:
        total: Scalar = Fraction(0)
        for lam in self.forms:
            total = total + lam(v) ** self.m
        return _clean(total)

    def expand(self) -> MultiPoly:
        """Explicit polynomial; only sensible for small orbits and degrees."""
        out = MultiPoly.zero(self.n)
        for lam in self.forms:
            out = out + lam.as_poly() ** self.m
        return out.demoted()

    def padded(self, n_total: int, offset: int) -> "OrbitInvariant":
        forms = [LinearForm((Fraction(0),) * offset + lam.w + (Fraction(0),) * (n_total - offset - self.n))
                 for lam in self.forms]
        return OrbitInvariant(forms, self.m)


class BasicInvariant:
    """A homogeneous invariant given explicitly or as an orbit Chern class."""

    def __init__(self, degree: int, poly: MultiPoly | None = None, chern: OrbitInvariant | None = None,
                 label: str = ""):
        if (poly is None) == (chern is None):
            raise ValueError("give exactly one of poly / chern")
        self.degree = degree
        self.poly = poly
        self.chern = chern
        self.label = label
        self._grad = None
        self._hess = None

    @property
    def n(self) -> int:
        return self.poly.n if self.poly is not None else self.chern.n

    @property
    def is_explicit(self) -> bool:
        return self.poly is not None

    def __repr__(self):
        kind = "explicit" if self.is_explicit else f"chern(|O|={len(self.chern.forms)})"
        return f"BasicInvariant(deg={self.degree}, {kind}{', ' + self.label if self.label else ''})"

    def value(self, v) -> Scalar:
        return self.poly.evaluate(v) if self.poly is not None else self.chern.value(v)

    def jet(self, v: Sequence[Scalar]) -> Jet:
        if self.chern is not None:
            return self.chern.jet(v)
        if self._grad is None:
            self._grad = self.poly.gradient()
            self._hess = [[g.diff(b) for b in range(self.n)] for g in self._grad]
        return Jet(self.poly.evaluate(v), [g.evaluate(v) for g in self._grad],
                   [[h.evaluate(v) for h in row] for row in self._hess])

    def embed(self, n_total: int, offset: int) -> "BasicInvariant":
        if self.poly is not None:
            return BasicInvariant(self.degree, poly=self.poly.embed(n_total, offset), label=self.label)
        return BasicInvariant(self.degree, chern=self.chern.padded(n_total, offset), label=self.label)


# ---------------------------------------------------------------------------
# Constructions per type
# ---------------------------------------------------------------------------

def power_sum(n: int, j: int) -> MultiPoly:
    return MultiPoly(n, ((tuple(j if k == i else 0 for k in range(n)), 1) for i in range(n)))


def dihedral_invariants(n: int) -> list[BasicInvariant]:
    rho1 = MultiPoly(2, {(2, 0): 1, (0, 2): 1})
    # Re((x + i y)^n)
    terms = {(n - k, k): Fraction(comb(n, k) * (-1) ** (k // 2)) for k in range(0, n + 1, 2)}
    return [BasicInvariant(2, poly=rho1, label="x^2+y^2"), BasicInvariant(n, poly=MultiPoly(2, terms), label="Re(z^n)")]


def classical_invariants(kind: str, n: int) -> list[BasicInvariant]:
    if kind == "A":
        return [BasicInvariant(j, poly=power_sum(n, j).scale(Fraction(1, j))) for j in range(1, n + 1)]
    if kind == "B":
        return [BasicInvariant(2 * j, poly=power_sum(n, 2 * j).scale(Fraction(1, 2 * j))) for j in range(1, n + 1)]
    if kind == "D":
        out = [BasicInvariant(2 * j, poly=power_sum(n, 2 * j).scale(Fraction(1, 2 * j))) for j in range(1, n)]
        out.append(BasicInvariant(n, poly=MultiPoly(n, {(1,) * n: 1})))
        return out
    raise ValueError(f"unknown classical type {kind!r}")


def minimal_weight(cartan: Matrix) -> LinearForm:
    """lambda = (0,...,0,1) C^-1 in the coroot basis, returned as its values on the simple roots."""
    n = len(cartan)
    try:
        cinv = inverse_matrix(cartan)
    except ZeroDivisionError:
        raise ValueError("Cartan matrix is singular") from None
    coroot = cinv[n - 1]
    values = []
    for j in range(n):
        acc: Scalar = Fraction(0)
        for k in range(n):
            acc = acc + coroot[k] * cartan[k][j]
        values.append(_clean(acc))
    return LinearForm(values)


def exceptional_invariants(spec: GroupSpec, group: ReflectionGroup | None = None) -> list[BasicInvariant]:
    g = group or ReflectionGroup(spec)
    # an orbit never outgrows the group, so a larger one means a malformed Cartan matrix
    orbit = weight_orbit(g, minimal_weight(spec.cartan), bound=spec.order)
    return [BasicInvariant(d, chern=OrbitInvariant(orbit, d), label=f"psi_{d}") for d in spec.degrees]


def basic_invariants(spec: GroupSpec, group: ReflectionGroup | None = None) -> list[BasicInvariant]:
    """Basic invariants with degrees exactly ``spec.degrees``."""
    if spec.kind == "I2":
        return dihedral_invariants(spec.param)
    if spec.kind in ("A", "B", "D"):
        return classical_invariants(spec.kind, spec.param)
    if spec.kind in EXCEPTIONAL:
        return exceptional_invariants(spec, group)
    if spec.kind == "product":
        out = []
        offset = 0
        for f in spec.factors:
            out.extend(inv.embed(spec.rank, offset) for inv in basic_invariants(f))
            offset += f.rank
        return out
    raise ValueError(f"unknown group kind {spec.kind!r}")


def check_invariance(inv: BasicInvariant, group: ReflectionGroup, samples: int = 20, seed: int = 0) -> bool:
    """rho o g == rho for every generator g.

    Explicit invariants are compared as polynomials.  Orbit invariants are
    compared at ``samples`` random rational points with numerators drawn from
    a range of size 2*10**6 + 1; a nonzero polynomial of degree d vanishes at
    such a point with probability at most d / (2*10**6 + 1) (Schwartz-Zippel),
    so 20 points leave a false-pass probability below (30 / 2e6)**20.
    """
    if inv.is_explicit:
        return all(inv.poly.substitute_linear(g) == inv.poly for g in group.generators)
    rng = random.Random(seed)
    n = inv.n
    for _ in range(samples):
        v = tuple(Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 97)) for _ in range(n))
        base = inv.value(v)
        for g in group.generators:
            if inv.value(_matvec(g, v)) != base:
                return False
    return True


# ---------------------------------------------------------------------------
# Jacobians and regular vectors
# ---------------------------------------------------------------------------

def jacobian_at(invs: Sequence[BasicInvariant], v: Sequence[Scalar]) -> list[list[Scalar]]:
    """J[i][j] = d rho_i / d x_j at v."""
    for inv in invs:
        if inv.n != len(v):
            raise ValueError(f"point has {len(v)} coordinates, invariants have {inv.n} variables")
    out = []
    for inv in invs:
        if inv.is_explicit:
            out.append([inv.poly.diff(j).evaluate(v) for j in range(len(v))])
        else:
            out.append(inv.chern.jet(v).gradient)
    return out


def is_regular(invs: Sequence[BasicInvariant], v: Sequence[Scalar]) -> tuple[bool, Scalar]:
    if len(invs) != len(v):
        raise ValueError("need as many invariants as coordinates")
    d = determinant(jacobian_at(invs, v))
    return d != 0, d


@dataclass
class RegularVector:
    point: Point
    certified: bool
    jacobian_det: Scalar

    def __iter__(self):
        return iter(self.point)

    def __len__(self):
        return len(self.point)


def default_point(spec: GroupSpec, fixtures: dict | None = None) -> Point:
    if spec.kind in EXCEPTIONAL:
        row = (fixtures or load_fixtures())["exceptional"][spec.kind]
        return tuple(Fraction(x) for x in row["v"])
    if spec.kind == "I2":
        return (Fraction(1), Fraction(2))
    if spec.kind in ("A", "B", "D"):
        return tuple(Fraction(i) for i in range(1, spec.rank + 1))
    if spec.kind == "product":
        out: tuple = ()
        for f in spec.factors:
            out += default_point(f, fixtures)
        return out
    raise ValueError(f"unknown group kind {spec.kind!r}")


def certify_regular(invs: Sequence[BasicInvariant], v: Sequence[Scalar]) -> RegularVector:
    ok, d = is_regular(invs, v)
    return RegularVector(tuple(v), ok, d)


def default_regular_vector(spec: GroupSpec, invs: Sequence[BasicInvariant] | None = None,
                           fixtures: dict | None = None) -> RegularVector:
    """The default point for ``spec``, certified by a nonzero Jacobian determinant."""
    invs = invs if invs is not None else basic_invariants(spec)
    rv = certify_regular(invs, default_point(spec, fixtures))
    if not rv.certified:
        raise NotRegular(f"default point {rv.point} for {spec.name} has zero Jacobian determinant")
    return rv
