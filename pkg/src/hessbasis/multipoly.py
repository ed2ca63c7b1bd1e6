"""Sparse multivariate polynomials with exact coefficients, Hessians and 2-tensors."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact_arith import CycloScalar, Scalar, demote, scalar_from_json, scalar_to_json

Exp = tuple[int, ...]


def _norm(c) -> Scalar:
    return c if isinstance(c, CycloScalar) else Fraction(c)


def grlex_key(exp: Exp):
    """Graded lexicographic order: total degree first, then lex."""
    return (sum(exp), exp)


class MultiPoly:
    """Polynomial in ``n`` variables stored as ``{exponent tuple: coefficient}``."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Exp, Scalar] | Iterable[tuple[Exp, Scalar]] = ()):
        self.n = n
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Exp, Scalar] = {}
        for e, c in items:
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not have {n} entries")
            if e in clean:
                clean[e] = clean[e] + c
            else:
                clean[e] = _norm(c)
        self.terms = {e: c for e, c in clean.items() if c != 0}

    @classmethod
    def _raw(cls, n, terms):
        obj = cls.__new__(cls)
        obj.n = n
        obj.terms = terms
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "MultiPoly":
        return cls._raw(n, {})

    @classmethod
    def const(cls, n: int, c: Scalar) -> "MultiPoly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n: int, i: int) -> "MultiPoly":
        e = [0] * n
        e[i] = 1
        return cls._raw(n, {tuple(e): Fraction(1)})

    @classmethod
    def linear(cls, coeffs: Sequence[Scalar]) -> "MultiPoly":
        n = len(coeffs)
        return cls(n, ((tuple(int(i == j) for j in range(n)), c) for i, c in enumerate(coeffs)))

    # -- basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        return len(degs) == 1 and (d is None or d in degs)

    def homogeneous_part(self, d: int) -> "MultiPoly":
        return MultiPoly._raw(self.n, {e: c for e, c in self.terms.items() if sum(e) == d})

    def degrees(self) -> list[int]:
        return sorted({sum(e) for e in self.terms})

    def sorted_terms(self) -> list[tuple[Exp, Scalar]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def _check(self, other: "MultiPoly"):
        if self.n != other.n:
            raise ValueError(f"variable count mismatch: {self.n} vs {other.n}")

    # -- arithmetic -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, CycloScalar)):
            other = MultiPoly.const(self.n, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if self.n != other.n or self.terms.keys() != other.terms.keys():
            return False
        return all(c == other.terms[e] for e, c in self.terms.items())

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(self.n, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = out[e] + c
                if s == 0:
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return MultiPoly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "MultiPoly":
        if c == 0:
            return MultiPoly.zero(self.n)
        c = _norm(c)
        return MultiPoly._raw(self.n, {e: x * c for e, x in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        out: dict[Exp, Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                if e in out:
                    out[e] = out[e] + v
                else:
                    out[e] = v
        return MultiPoly._raw(self.n, {e: c for e, c in out.items() if c != 0})

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def diff(self, i: int) -> "MultiPoly":
        """Partial derivative with respect to variable ``i`` (0-based)."""
        if not 0 <= i < self.n:
            raise ValueError(f"variable index {i} out of range for {self.n} variables")
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1:]
                out[e2] = c * k
        return MultiPoly._raw(self.n, out)

    def gradient(self) -> list["MultiPoly"]:
        return [self.diff(i) for i in range(self.n)]

    def __call__(self, point: Sequence[Scalar]) -> Scalar:
        return self.evaluate(point)

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        if len(point) != self.n:
            raise ValueError(f"point has {len(point)} coordinates, polynomial has {self.n} variables")
        powers: list[dict[int, Scalar]] = [{0: Fraction(1)} for _ in range(self.n)]

        def pw(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = pw(i, k - 1) * point[i]
            return cache[k]

        acc: Scalar = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            acc = acc + term
        return demote(acc) if isinstance(acc, CycloScalar) else acc

    def substitute_linear(self, mat: Sequence[Sequence[Scalar]]) -> "MultiPoly":
        """The polynomial x -> p(mat @ x)."""
        n = self.n
        images = [MultiPoly.linear(list(mat[k])) for k in range(n)]
        cache: dict[tuple[int, int], MultiPoly] = {}

        def pw(k, e):
            key = (k, e)
            if key not in cache:
                cache[key] = images[k] if e == 1 else pw(k, e - 1) * images[k]
            return cache[key]

        out = MultiPoly.zero(n)
        for e, c in self.terms.items():
            term = MultiPoly.const(n, c)
            for k, ek in enumerate(e):
                if ek:
                    term = term * pw(k, ek)
            out = out + term
        return out

    def embed(self, n_total: int, offset: int) -> "MultiPoly":
        """Same polynomial in a larger variable set, shifted by ``offset``."""
        pad_r = n_total - offset - self.n
        return MultiPoly._raw(n_total, {(0,) * offset + e + (0,) * pad_r: c for e, c in self.terms.items()})

    def compose(self, polys: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute ``polys[k]`` for variable k."""
        if len(polys) != self.n:
            raise ValueError("need one polynomial per variable")
        m = polys[0].n
        cache: dict[tuple[int, int], MultiPoly] = {}

        def pw(k, e):
            if (k, e) not in cache:
                cache[(k, e)] = polys[k] if e == 1 else pw(k, e - 1) * polys[k]
            return cache[(k, e)]

        out = MultiPoly.zero(m)
        for e, c in self.terms.items():
            term = MultiPoly.const(m, c)
            for k, ek in enumerate(e):
                if ek:
                    term = term * pw(k, ek)
            out = out + term
        return out

    def demoted(self) -> "MultiPoly":
        return MultiPoly._raw(self.n, {e: demote(c) for e, c in self.terms.items()})

    # -- text / json ----------------------------------------------------------
    def __repr__(self):
        return f"MultiPoly({self.n}, {self})"

    def __str__(self):
        return self.pretty("x")

    def pretty(self, var: str = "x") -> str:
        if not self.terms:
            return "0"
        names = [f"{var}{i + 1}" for i in range(self.n)]
        return format_terms(self.sorted_terms(), names)

    def to_json(self) -> dict:
        return {"n": self.n,
                "terms": [{"exp": list(e), "coeff": scalar_to_json(c)} for e, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, obj) -> "MultiPoly":
        return cls(int(obj["n"]), ((tuple(t["exp"]), scalar_from_json(t["coeff"])) for t in obj["terms"]))


def format_terms(terms, names: Sequence[str]) -> str:
    parts = []
    for e, c in terms:
        mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
        cs = str(c) if not isinstance(c, CycloScalar) else f"({c})"
        if not mono:
            parts.append(cs)
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{cs}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# Symmetric 2-tensors with polynomial entries
# ---------------------------------------------------------------------------

def upper_positions(n: int) -> list[tuple[int, int]]:
    """Upper-triangular positions (a, b), a <= b, in row-major order."""
    return [(a, b) for a in range(n) for b in range(a, n)]


class SymTensorPoly:
    """Symmetric n x n matrix of polynomials; only entries with a <= b are stored."""

    __slots__ = ("n", "entries")

    def __init__(self, n: int, entries: Mapping[tuple[int, int], MultiPoly] | None = None):
        self.n = n
        self.entries: dict[tuple[int, int], MultiPoly] = {}
        for (a, b), p in (entries or {}).items():
            if p.n != n:
                raise ValueError("entry variable count differs from tensor dimension")
            key = (a, b) if a <= b else (b, a)
            if key in self.entries:
                raise ValueError(f"entry {key} given twice")
            self.entries[key] = p
        for pos in upper_positions(n):
            self.entries.setdefault(pos, MultiPoly.zero(n))

    @classmethod
    def zero(cls, n: int) -> "SymTensorPoly":
        return cls(n)

    @classmethod
    def constant(cls, mat: Sequence[Sequence[Scalar]]) -> "SymTensorPoly":
        n = len(mat)
        for a in range(n):
            for b in range(n):
                if mat[a][b] != mat[b][a]:
                    raise ValueError("constant tensor must be symmetric")
        return cls(n, {(a, b): MultiPoly.const(n, mat[a][b]) for a, b in upper_positions(n)})

    def __getitem__(self, key: tuple[int, int]) -> MultiPoly:
        a, b = key
        return self.entries[(a, b) if a <= b else (b, a)]

    def __eq__(self, other):
        if not isinstance(other, SymTensorPoly):
            return NotImplemented
        return self.n == other.n and all(self.entries[k] == other.entries[k] for k in self.entries)

    def __add__(self, other: "SymTensorPoly") -> "SymTensorPoly":
        return SymTensorPoly(self.n, {k: p + other.entries[k] for k, p in self.entries.items()})

    def __sub__(self, other: "SymTensorPoly") -> "SymTensorPoly":
        return SymTensorPoly(self.n, {k: p - other.entries[k] for k, p in self.entries.items()})

    def __neg__(self):
        return SymTensorPoly(self.n, {k: -p for k, p in self.entries.items()})

    def __mul__(self, f):
        """Multiply every entry by a polynomial or scalar."""
        return SymTensorPoly(self.n, {k: p * f for k, p in self.entries.items()})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.entries.values())

    def degrees(self) -> list[int]:
        return sorted({d for p in self.entries.values() for d in p.degrees()})

    def homogeneous_part(self, d: int) -> "SymTensorPoly":
        return SymTensorPoly(self.n, {k: p.homogeneous_part(d) for k, p in self.entries.items()})

    def is_homogeneous(self, d: int) -> bool:
        return all(p.is_homogeneous(d) for p in self.entries.values())

    def transform(self, g: Sequence[Sequence[Scalar]]) -> "SymTensorPoly":
        """Pull back by the linear map g: x -> g^T sigma(g x) g."""
        n = self.n
        sub = {k: p.substitute_linear(g) for k, p in self.entries.items()}
        full = [[sub[(c, d) if c <= d else (d, c)] for d in range(n)] for c in range(n)]
        out = {}
        for a, b in upper_positions(n):
            acc = MultiPoly.zero(n)
            for c in range(n):
                gca = g[c][a]
                if gca == 0:
                    continue
                for d in range(n):
                    gdb = g[d][b]
                    if gdb == 0 or full[c][d].is_zero():
                        continue
                    acc = acc + full[c][d].scale(gca * gdb)
            out[(a, b)] = acc
        return SymTensorPoly(n, out)

    def demoted(self) -> "SymTensorPoly":
        return SymTensorPoly(self.n, {k: p.demoted() for k, p in self.entries.items()})

    def __call__(self, point):
        return tensor_eval(self, point)

    def __repr__(self):
        return "SymTensorPoly(" + ", ".join(f"{k}: {p}" for k, p in self.entries.items() if not p.is_zero()) + ")"

    def to_json(self) -> dict:
        return {"n": self.n, "entries": [self.entries[pos].to_json() for pos in upper_positions(self.n)]}

    @classmethod
    def from_json(cls, obj) -> "SymTensorPoly":
        n = int(obj["n"])
        polys = [MultiPoly.from_json(p) for p in obj["entries"]]
        pos = upper_positions(n)
        if len(polys) != len(pos):
            raise ValueError(f"expected {len(pos)} entries for n={n}, got {len(polys)}")
        return cls(n, dict(zip(pos, polys)))


def hessian_sym(p: MultiPoly) -> SymTensorPoly:
    """Symbolic Hessian of ``p`` as a symmetric tensor."""
    grad = p.gradient()
    return SymTensorPoly(p.n, {(a, b): grad[a].diff(b) for a, b in upper_positions(p.n)})


def tensor_eval(sigma: SymTensorPoly, point: Sequence[Scalar]) -> list[list[Scalar]]:
    if len(point) != sigma.n:
        raise ValueError(f"point has {len(point)} coordinates, tensor has dimension {sigma.n}")
    n = sigma.n
    vals = {pos: sigma.entries[pos].evaluate(point) for pos in upper_positions(n)}
    return [[vals[(a, b) if a <= b else (b, a)] for b in range(n)] for a in range(n)]


# ---------------------------------------------------------------------------
# Linear forms
# ---------------------------------------------------------------------------

class LinearForm:
    """lambda(v) = sum_j w_j v_j in the working coordinates."""

    __slots__ = ("w",)

    def __init__(self, w: Iterable[Scalar]):
        self.w = tuple(_norm(x) for x in w)

    def __len__(self):
        return len(self.w)

    def __call__(self, v: Sequence[Scalar]) -> Scalar:
        acc: Scalar = Fraction(0)
        for a, b in zip(self.w, v):
            if a != 0 and b != 0:
                acc = acc + a * b
        return acc

    def act(self, g: Sequence[Sequence[Scalar]]) -> "LinearForm":
        """Precompose with g, i.e. the row vector w @ g."""
        n = len(self.w)
        out = []
        for j in range(n):
            acc: Scalar = Fraction(0)
            for k in range(n):
                if self.w[k] != 0 and g[k][j] != 0:
                    acc = acc + self.w[k] * g[k][j]
            out.append(demote(acc) if isinstance(acc, CycloScalar) else acc)
        return LinearForm(out)

    def __eq__(self, other):
        return isinstance(other, LinearForm) and len(self.w) == len(other.w) and all(
            a == b for a, b in zip(self.w, other.w))

    def __hash__(self):
        return hash(self.w)

    def as_poly(self) -> MultiPoly:
        return MultiPoly.linear(self.w)

    def __repr__(self):
        return f"LinearForm({[str(x) for x in self.w]})"
