"""Finite reflection groups: construction, enumeration, orbits and charpoly census.

Classical groups act on R^n by (signed) permutation matrices, dihedral groups by
rotation/reflection matrices in Cartesian coordinates, and exceptional groups by
simple reflections in simple-root coordinates built from their Cartan matrices.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import gcd, prod
from typing import Sequence

import numpy as np

from .exact_arith import CycloScalar, Scalar, UniPoly, conductor_of, demote, euler_phi, scalar_from_json, scalar_to_json
from .multipoly import LinearForm

Matrix = tuple[tuple[Scalar, ...], ...]

EXCEPTIONAL = ("H3", "H4", "F4", "E6", "E7", "E8")
DEFAULT_ELEMENT_BOUND = 10**6
DEFAULT_ORBIT_BOUND = 10**6


class GroupTooLarge(ValueError):
    def __init__(self, name: str, order: int, bound: int):
        super().__init__(f"{name} has {order} elements (product of degrees), "
                         f"above the enumeration bound {bound}; too large to enumerate")
        self.order = order
        self.bound = bound


class EnumerationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _default_fixtures_text() -> str:
    return resources.files("hessbasis").joinpath("data/fixtures.json").read_text()


def load_fixtures(path: str | None = None) -> dict:
    """Published tables (Cartan matrices, degrees, v vectors, orbit sizes, ratios, counts)."""
    if path is None:
        return json.loads(_default_fixtures_text())
    with open(path) as fh:
        return json.load(fh)


def _parse_matrix(rows) -> Matrix:
    return tuple(tuple(scalar_from_json(x) for x in row) for row in rows)


def matrix_to_json(mat: Sequence[Sequence[Scalar]]):
    return [[scalar_to_json(x) for x in row] for row in mat]


# ---------------------------------------------------------------------------
# Group specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupSpec:
    kind: str
    rank: int
    degrees: tuple[int, ...]
    conductor: int = 1
    param: int | None = None
    cartan: Matrix | None = None
    factors: tuple["GroupSpec", ...] = field(default=())

    @property
    def name(self) -> str:
        if self.kind == "product":
            return "x".join(f.name for f in self.factors)
        if self.param is not None:
            return f"{self.kind}:{self.param}"
        return self.kind

    @property
    def order(self) -> int:
        return prod(self.degrees)

    @property
    def coordinates(self) -> str:
        if self.kind == "product":
            return "mixed"
        return "root" if self.kind in EXCEPTIONAL else "cartesian"

    def __str__(self):
        return self.name


def dihedral(n: int) -> GroupSpec:
    if n < 2:
        raise ValueError("dihedral groups need n >= 2")
    cond = 1 if n in (2, 4) else n * 4 // gcd(n, 4)
    return GroupSpec("I2", 2, (2, n), cond, n)


def classical(kind: str, n: int) -> GroupSpec:
    if kind == "A":
        if n < 1:
            raise ValueError("type A needs n >= 1")
        return GroupSpec("A", n, tuple(range(1, n + 1)), 1, n)
    if kind == "B":
        if n < 1:
            raise ValueError("type B needs n >= 1")
        return GroupSpec("B", n, tuple(2 * j for j in range(1, n + 1)), 1, n)
    if kind == "D":
        if n < 2:
            raise ValueError("type D needs n >= 2")
        return GroupSpec("D", n, tuple(2 * j for j in range(1, n)) + (n,), 1, n)
    raise ValueError(f"unknown classical type {kind!r}")


def exceptional(name: str, fixtures: dict | None = None) -> GroupSpec:
    fx = (fixtures or load_fixtures())["exceptional"]
    if name not in fx:
        raise ValueError(f"unknown exceptional type {name!r}")
    row = fx[name]
    cartan = _parse_matrix(row["cartan"])
    n = len(cartan)
    for i in range(n):
        if cartan[i][i] != 2:
            raise ValueError(f"malformed Cartan matrix for {name}: diagonal entry {i} is {cartan[i][i]}")
    return GroupSpec(name, n, tuple(row["degrees"]), int(row["conductor"]), None, cartan)


def product_group(a: GroupSpec, b: GroupSpec) -> GroupSpec:
    """Direct product acting block-diagonally on V_a x V_b."""
    fa = a.factors if a.kind == "product" else (a,)
    fb = b.factors if b.kind == "product" else (b,)
    factors = fa + fb
    cond = 1
    for f in factors:
        cond = cond * f.conductor // gcd(cond, f.conductor)
    return GroupSpec("product", a.rank + b.rank, a.degrees + b.degrees, cond, None, None, factors)


_ATOM = re.compile(r"^(I2|A|B|D)\s*[:(]?\s*(\d+)\s*\)?$")


def parse_spec(text: str, fixtures: dict | None = None) -> GroupSpec:
    """Parse ``I2:5``, ``A:3``, ``B(2)``, ``H3``, ``A1sign`` or products ``A:2xA:2``."""
    parts = [p.strip() for p in re.split(r"[x×*]", text.strip()) if p.strip()]
    if not parts:
        raise ValueError(f"empty group spec {text!r}")
    specs = [_parse_atom(p, fixtures) for p in parts]
    out = specs[0]
    for s in specs[1:]:
        out = product_group(out, s)
    return out


def _parse_atom(text: str, fixtures) -> GroupSpec:
    if text.upper() in EXCEPTIONAL:
        return exceptional(text.upper(), fixtures)
    if text in ("A1sign", "sign"):
        return classical("B", 1)
    m = _ATOM.match(text)
    if not m:
        raise ValueError(f"cannot parse group spec {text!r}")
    kind, n = m.group(1), int(m.group(2))
    return dihedral(n) if kind == "I2" else classical(kind, n)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def _ident(n: int) -> list[list[Scalar]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _freeze(m) -> Matrix:
    return tuple(tuple(demote(x) for x in row) for row in m)


def _perm_matrix(n: int, perm: Sequence[int], signs: Sequence[int] | None = None) -> Matrix:
    # column j has entry signs[j] in row perm[j]: e_j -> signs[j] e_perm[j]
    m = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        m[perm[j]][j] = Fraction(signs[j] if signs else 1)
    return _freeze(m)


def _cartan_reflection(cartan: Matrix, i: int) -> Matrix:
    # R_i(a) = a - (sum_j C_ij a_j) e_i acting on root coordinate columns
    n = len(cartan)
    m = _ident(n)
    for j in range(n):
        m[i][j] = m[i][j] - cartan[i][j]
    return _freeze(m)


def _rotation(n: int, cond: int) -> Matrix:
    if n == 2:
        return _freeze([[-1, 0], [0, -1]])
    if n == 4:
        return _freeze([[0, -1], [1, 0]])
    step = cond // n
    z = CycloScalar.zeta(cond, step)
    zi = CycloScalar.zeta(cond, -step)
    i_unit = CycloScalar.zeta(cond, cond // 4)
    cos = (z + zi) / 2
    sin = (z - zi) * (-i_unit) / 2
    return _freeze([[cos, -sin], [sin, cos]])


def block_diag(blocks: Sequence[Matrix]) -> Matrix:
    n = sum(len(b) for b in blocks)
    m = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                m[off + i][off + j] = b[i][j]
        off += k
    return _freeze(m)


def spec_generators(spec: GroupSpec) -> list[Matrix]:
    n = spec.rank
    if spec.kind == "I2":
        return [_rotation(spec.param, spec.conductor), _freeze([[1, 0], [0, -1]])]
    if spec.kind in ("A", "B", "D"):
        gens = []
        for i in range(n - 1):
            p = list(range(n))
            p[i], p[i + 1] = p[i + 1], p[i]
            gens.append(_perm_matrix(n, p))
        if spec.kind == "B":
            gens.append(_perm_matrix(n, list(range(n)), [1] * (n - 1) + [-1]))
        elif spec.kind == "D":
            p = list(range(n))
            p[n - 2], p[n - 1] = n - 1, n - 2
            gens.append(_perm_matrix(n, p, [1] * (n - 2) + [-1, -1]))
        return gens
    if spec.kind in EXCEPTIONAL:
        return [_cartan_reflection(spec.cartan, i) for i in range(n)]
    if spec.kind == "product":
        gens = []
        sizes = [f.rank for f in spec.factors]
        for idx, f in enumerate(spec.factors):
            for g in spec_generators(f):
                blocks = [g if k == idx else _freeze(_ident(sizes[k])) for k in range(len(sizes))]
                gens.append(block_diag(blocks))
        return gens
    raise ValueError(f"unknown group kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------

@dataclass
class Census:
    """Multiset of characteristic polynomials over a finite matrix group."""

    rank: int
    entries: list[tuple[UniPoly, int]]

    @property
    def total(self) -> int:
        return sum(k for _, k in self.entries)

    def __len__(self):
        return len(self.entries)

    def as_dict(self) -> dict[UniPoly, int]:
        return dict(self.entries)

    def to_json(self):
        return [{"charpoly": [scalar_to_json(c) for c in p.coeffs], "mult": k} for p, k in self.entries]

    @classmethod
    def from_json(cls, rank: int, obj) -> "Census":
        return cls(rank, [(UniPoly(scalar_from_json(c) for c in e["charpoly"]), int(e["mult"])) for e in obj])


def charpoly_from_power_traces(traces: Sequence[Scalar]) -> UniPoly:
    """Monic characteristic polynomial (ascending coefficients) from tr(g^k), k = 1..n."""
    n = len(traces)
    e: list[Scalar] = [Fraction(1)]
    for k in range(1, n + 1):
        acc: Scalar = Fraction(0)
        for i in range(1, k + 1):
            term = e[k - i] * traces[i - 1]
            acc = acc + term if i % 2 else acc - term
        e.append(demote(acc / k) if isinstance(acc, CycloScalar) else acc / k)
    return UniPoly([e[n - j] * (-1) ** (n - j) for j in range(n + 1)])


def _census_sort_key(item):
    p, k = item
    return json.dumps([scalar_to_json(c) for c in p.coeffs])


# ---------------------------------------------------------------------------
# Reflection groups
# ---------------------------------------------------------------------------

class ReflectionGroup:
    """Generators of a finite reflection group plus (optionally) its elements and census."""

    def __init__(self, spec: GroupSpec, generators: Sequence[Matrix] | None = None):
        self.spec = spec
        self.generators: list[Matrix] = list(generators) if generators is not None else spec_generators(spec)
        self.rank = spec.rank
        self._lifted: np.ndarray | None = None
        self._elements: list[Matrix] | None = None
        self._census: Census | None = None

    def __repr__(self):
        return f"ReflectionGroup({self.spec.name}, {len(self.generators)} generators)"

    @property
    def conductor(self) -> int:
        c = 1
        for g in self.generators:
            for row in g:
                for x in row:
                    m = conductor_of(x)
                    c = c * m // gcd(c, m)
        return c

    @property
    def is_enumerated(self) -> bool:
        return self._lifted is not None or self._elements is not None

    @property
    def order(self) -> int:
        if self._lifted is not None:
            return len(self._lifted)
        if self._elements is not None:
            return len(self._elements)
        return self.spec.order

    def elements(self) -> list[Matrix]:
        if self._elements is None:
            if self._lifted is None:
                raise EnumerationError("group has not been enumerated")
            self._elements = [_unlift(M, self.rank, self._lift_conductor) for M in self._lifted]
        return self._elements

    def census(self) -> Census:
        if self._census is None:
            self._census = charpoly_census(self)
        return self._census

    def to_json(self, include_census: bool = False) -> dict:
        s = self.spec
        out = {"schema": "hessbasis.group/1", "spec": s.name, "rank": s.rank, "degrees": list(s.degrees),
               "conductor": s.conductor,
               "generators": [matrix_to_json(g) for g in self.generators]}
        if s.cartan is not None:
            out["cartan"] = matrix_to_json(s.cartan)
        if include_census:
            out["census"] = self.census().to_json()
        return out

    @classmethod
    def from_json(cls, obj) -> "ReflectionGroup":
        spec = parse_spec(obj["spec"])
        if obj.get("cartan") is not None and spec.kind in EXCEPTIONAL:
            spec = GroupSpec(spec.kind, spec.rank, spec.degrees, spec.conductor, None, _parse_matrix(obj["cartan"]))
        g = cls(spec, [_parse_matrix(m) for m in obj["generators"]])
        if "census" in obj:
            g._census = Census.from_json(spec.rank, obj["census"])
        return g


def build_generators(spec: GroupSpec) -> ReflectionGroup:
    return ReflectionGroup(spec)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc: Scalar = Fraction(0)
            for k in range(n):
                x, y = a[i][k], b[k][j]
                if x != 0 and y != 0:
                    acc = acc + x * y
            row.append(demote(acc) if isinstance(acc, CycloScalar) else acc)
        out.append(tuple(row))
    return tuple(out)


def mat_key(m: Matrix):
    return tuple(tuple((x.m, x.c) if isinstance(x, CycloScalar) else x for x in row) for row in m)


def is_identity(m: Matrix) -> bool:
    return all(m[i][j] == (1 if i == j else 0) for i in range(len(m)) for j in range(len(m)))


# -- integer lift: Z[zeta_L]-matrices as integer matrices of size n*phi(L) ---

def _lift_matrix(g: Matrix, L: int) -> np.ndarray | None:
    n = len(g)
    phi = euler_phi(L)
    out = np.zeros((n * phi, n * phi), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            x = g[i][j]
            if x == 0:
                continue
            cx = CycloScalar.coerce(x).lift(L)
            if not cx.is_integral():
                return None
            block = cx.mult_matrix() if phi > 1 else [[cx.c[0]]]
            out[i * phi:(i + 1) * phi, j * phi:(j + 1) * phi] = np.array(
                [[int(v) for v in r] for r in block], dtype=np.int64)
    return out


def _unlift(M: np.ndarray, n: int, L: int) -> Matrix:
    phi = euler_phi(L)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            col = M[i * phi:(i + 1) * phi, j * phi]
            if phi == 1:
                row.append(Fraction(int(col[0])))
            else:
                row.append(demote(CycloScalar(L, (int(v) for v in col))))
        rows.append(tuple(row))
    return tuple(rows)


class _Overflow(Exception):
    pass


def _bfs_lifted(gens: list[np.ndarray], limit: int, name: str) -> np.ndarray:
    for dtype in (np.int8, np.int16):
        try:
            return _bfs_lifted_as(gens, limit, name, dtype)
        except _Overflow:
            continue
    raise EnumerationError(f"{name}: matrix entries outgrew int16; group is not finite or not integral")


def _bfs_lifted_as(gens, limit, name, dtype) -> np.ndarray:
    N = gens[0].shape[0]
    cap = np.iinfo(dtype).max
    ident = np.eye(N, dtype=np.int64)
    seen = {ident.astype(dtype).tobytes()}
    chunks = [ident[None].astype(dtype)]
    frontier = ident[None]
    while len(frontier):
        new_rows = []
        for G in gens:
            prod_ = frontier @ G
            if int(np.abs(prod_).max()) > cap:
                raise _Overflow
            small = prod_.astype(dtype)
            for k in range(len(small)):
                b = small[k].tobytes()
                if b not in seen:
                    seen.add(b)
                    new_rows.append(small[k])
            if len(seen) > limit:
                raise EnumerationError(
                    f"{name}: enumeration exceeded {limit} elements; generators do not give the expected group")
        if not new_rows:
            break
        block = np.stack(new_rows)
        chunks.append(block)
        frontier = block.astype(np.int64)
    elems = np.concatenate(chunks)
    keys = elems.reshape(len(elems), -1)
    return elems[np.lexsort(keys.T[::-1])]


def _bfs_generic(gens: list[Matrix], limit: int, name: str) -> list[Matrix]:
    n = len(gens[0]) if gens else 0
    ident = _freeze(_ident(n))
    seen = {mat_key(ident): ident}
    frontier = [ident]
    while frontier:
        new = []
        for h in frontier:
            for g in gens:
                p = mat_mul(h, g)
                k = mat_key(p)
                if k not in seen:
                    seen[k] = p
                    new.append(p)
        if len(seen) > limit:
            raise EnumerationError(
                f"{name}: enumeration exceeded {limit} elements; generators do not give the expected group")
        frontier = new
    return [seen[k] for k in sorted(seen, key=repr)]


def enumerate_group(g: ReflectionGroup, element_bound: int = DEFAULT_ELEMENT_BOUND) -> ReflectionGroup:
    """Enumerate all elements by BFS closure; refuses groups with more than ``element_bound`` elements."""
    expected = g.spec.order
    if expected > element_bound:
        raise GroupTooLarge(g.spec.name, expected, element_bound)
    if g.is_enumerated:
        return g
    L = g.conductor
    if not g.generators:
        g._elements = [_freeze(_ident(g.rank))]
        return g
    lifted = [_lift_matrix(m, L) for m in g.generators]
    if all(x is not None for x in lifted):
        g._lift_conductor = L
        g._lifted = _bfs_lifted(lifted, expected, g.spec.name)
    else:
        g._elements = _bfs_generic(g.generators, expected, g.spec.name)
    if g.order != expected:
        raise EnumerationError(f"{g.spec.name}: enumerated {g.order} elements, product of degrees is {expected}")
    return g


def _traces_lifted(elems: np.ndarray, n: int, L: int, chunk: int = 20000) -> np.ndarray:
    phi = euler_phi(L)
    out = np.empty((len(elems), n * phi), dtype=np.int64)
    for s in range(0, len(elems), chunk):
        P = elems[s:s + chunk].astype(np.int64)
        Pk = P
        for k in range(n):
            if k:
                Pk = Pk @ P
            tr = np.zeros((len(P), phi), dtype=np.int64)
            for i in range(n):
                tr += Pk[:, i * phi:(i + 1) * phi, i * phi]
            out[s:s + chunk, k * phi:(k + 1) * phi] = tr
    return out


def charpoly_census(g: ReflectionGroup) -> Census:
    """Multiset {(charpoly, multiplicity)} over all elements, sorted canonically."""
    if not g.is_enumerated:
        raise EnumerationError("charpoly census needs an enumerated group")
    n = g.rank
    counts: dict[UniPoly, int] = {}
    if g._lifted is not None:
        L = g._lift_conductor
        phi = euler_phi(L)
        keys, mult = np.unique(_traces_lifted(g._lifted, n, L), axis=0, return_counts=True)
        for key, k in zip(keys, mult):
            traces = []
            for j in range(n):
                vec = [int(v) for v in key[j * phi:(j + 1) * phi]]
                traces.append(Fraction(vec[0]) if phi == 1 else demote(CycloScalar(L, vec)))
            p = charpoly_from_power_traces(traces)
            counts[p] = counts.get(p, 0) + int(k)
    else:
        for h in g.elements():
            traces = []
            hk = h
            for j in range(n):
                if j:
                    hk = mat_mul(hk, h)
                tr = Fraction(0)
                for i in range(n):
                    tr = tr + hk[i][i]
                traces.append(demote(tr))
            p = charpoly_from_power_traces(traces)
            counts[p] = counts.get(p, 0) + 1
    return Census(n, sorted(counts.items(), key=_census_sort_key))


# ---------------------------------------------------------------------------
# Orbits of linear forms
# ---------------------------------------------------------------------------

@dataclass
class WeightOrbit:
    forms: list[LinearForm]

    def __len__(self):
        return len(self.forms)

    def __iter__(self):
        return iter(self.forms)


def weight_orbit(g: ReflectionGroup, form: LinearForm, bound: int = DEFAULT_ORBIT_BOUND) -> WeightOrbit:
    """Orbit of a linear form under precomposition with the generators."""
    seen = {form: None}
    frontier = [form]
    while frontier:
        new = []
        for lam in frontier:
            for m in g.generators:
                mu = lam.act(m)
                if mu not in seen:
                    seen[mu] = None
                    new.append(mu)
        if len(seen) > bound:
            raise EnumerationError(f"orbit exceeded the safety bound {bound}")
        frontier = new
    return WeightOrbit(list(seen))
