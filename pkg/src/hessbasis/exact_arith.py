"""Exact scalars in cyclotomic fields, univariate polynomials and truncated series.

A :class:`CycloScalar` of conductor ``m`` is an element of ``Q[x]/(Phi_m(x))``
stored as its coefficient vector in the power basis ``1, z, ..., z^(phi(m)-1)``
where ``z = exp(2*pi*i/m)``.  Conductor 1 is the rational field.

Rational numbers may also travel as plain :class:`fractions.Fraction` (or
``int``); every operation here accepts them and treats them as conductor 1.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


# ---------------------------------------------------------------------------
# Cyclotomic polynomials and reduction tables
# ---------------------------------------------------------------------------

def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def _int_poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # ascending coefficients; den monic
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k]
        out[k - dn] = c
        if c:
            for i, d in enumerate(den):
                num[k - dn + i] -= c * d
    if any(num[:dn]):
        raise ValueError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(m: int) -> tuple[int, ...]:
    if m < 1:
        raise ValueError(f"conductor must be positive, got {m}")
    num = [-1] + [0] * (m - 1) + [1]
    for d in _divisors(m)[:-1]:
        num = _int_poly_divexact(num, list(_cyclotomic_coeffs(d)))
    return tuple(num)


def cyclotomic_polynomial(m: int) -> "UniPoly":
    """Return the m-th cyclotomic polynomial as a :class:`UniPoly` over Z."""
    return UniPoly([Fraction(c) for c in _cyclotomic_coeffs(m)])


def euler_phi(m: int) -> int:
    return len(_cyclotomic_coeffs(m)) - 1


@lru_cache(maxsize=None)
def _power_vectors(m: int) -> tuple[tuple[int, ...], ...]:
    """x^e mod Phi_m for e = 0..m-1, as integer coefficient vectors."""
    phi = euler_phi(m)
    cyc = _cyclotomic_coeffs(m)
    vec = [1] + [0] * (phi - 1)
    out = []
    for _ in range(m):
        out.append(tuple(vec))
        top = vec[-1]
        vec = [0] + vec[:-1]
        if top:
            vec = [v - top * c for v, c in zip(vec, cyc)]
    return tuple(out)


@lru_cache(maxsize=None)
def _lift_table(m: int, target: int) -> tuple[tuple[int, ...], ...]:
    step = target // m
    pv = _power_vectors(target)
    return tuple(pv[(k * step) % target] for k in range(euler_phi(m)))


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


# ---------------------------------------------------------------------------
# CycloScalar
# ---------------------------------------------------------------------------

class CycloScalar:
    """Immutable element of the cyclotomic field Q(zeta_m)."""

    __slots__ = ("m", "c")

    def __init__(self, m: int, coeffs: Iterable[Rational]):
        c = tuple(Fraction(x) for x in coeffs)
        phi = euler_phi(m)
        if len(c) != phi:
            raise ValueError(f"conductor {m} needs {phi} coefficients, got {len(c)}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "c", c)

    def __setattr__(self, name, value):
        raise AttributeError("CycloScalar is immutable")

    def __reduce__(self):
        return (CycloScalar._raw, (self.m, self.c))

    @classmethod
    def _raw(cls, m: int, c: tuple) -> "CycloScalar":
        obj = object.__new__(cls)
        object.__setattr__(obj, "m", m)
        object.__setattr__(obj, "c", c)
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def rational(cls, q: Rational, m: int = 1) -> "CycloScalar":
        phi = euler_phi(m)
        return cls._raw(m, (Fraction(q),) + (Fraction(0),) * (phi - 1))

    @classmethod
    def zeta(cls, m: int, k: int = 1) -> "CycloScalar":
        """The root of unity zeta_m ** k."""
        return cls._raw(m, tuple(Fraction(v) for v in _power_vectors(m)[k % m]))

    @classmethod
    def coerce(cls, x) -> "CycloScalar":
        if isinstance(x, CycloScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls._raw(1, (Fraction(x),))
        raise TypeError(f"cannot coerce {type(x).__name__} to CycloScalar")

    # -- conductor handling -------------------------------------------------
    def lift(self, target: int) -> "CycloScalar":
        """Re-express in Q(zeta_target); ``target`` must be a multiple of m."""
        if target == self.m:
            return self
        if target % self.m:
            raise ValueError(f"cannot lift conductor {self.m} to {target}")
        table = _lift_table(self.m, target)
        out = [Fraction(0)] * euler_phi(target)
        for a, vec in zip(self.c, table):
            if a:
                for i, v in enumerate(vec):
                    if v:
                        out[i] += a * v
        return CycloScalar._raw(target, tuple(out))

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def try_demote(self) -> Fraction | None:
        """The rational value if every non-constant coefficient vanishes."""
        return self.c[0] if self.is_rational() else None

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.c)

    # -- arithmetic ---------------------------------------------------------
    def _align(self, other):
        o = other if isinstance(other, CycloScalar) else CycloScalar.coerce(other)
        if o.m == self.m:
            return self, o
        L = _lcm(self.m, o.m)
        return self.lift(L), o.lift(L)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloScalar._raw(self.m, (self.c[0] + other,) + self.c[1:])
        a, b = self._align(other)
        return CycloScalar._raw(a.m, tuple(x + y for x, y in zip(a.c, b.c)))

    __radd__ = __add__

    def __neg__(self):
        return CycloScalar._raw(self.m, tuple(-x for x in self.c))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloScalar._raw(self.m, tuple(x * other for x in self.c))
        a, b = self._align(other)
        m = a.m
        if m == 1:
            return CycloScalar._raw(1, (a.c[0] * b.c[0],))
        phi = len(a.c)
        conv = [Fraction(0)] * (2 * phi - 1)
        for i, x in enumerate(a.c):
            if x:
                for j, y in enumerate(b.c):
                    if y:
                        conv[i + j] += x * y
        out = list(conv[:phi])
        pv = _power_vectors(m)
        for k in range(phi, 2 * phi - 1):
            ck = conv[k]
            if ck:
                for i, v in enumerate(pv[k % m]):
                    if v:
                        out[i] += ck * v
        return CycloScalar._raw(m, tuple(out))

    __rmul__ = __mul__

    def mult_matrix(self) -> list[list[Fraction]]:
        """Matrix of multiplication by self in the power basis (column k = self*z^k)."""
        phi = len(self.c)
        cols = [(self * CycloScalar.zeta(self.m, k)).c for k in range(phi)]
        return [[cols[k][i] for k in range(phi)] for i in range(phi)]

    def inverse(self) -> "CycloScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero CycloScalar")
        if self.m == 1 or self.is_rational():
            return CycloScalar.rational(1 / self.c[0], self.m)
        mat = self.mult_matrix()
        rhs = [Fraction(1)] + [Fraction(0)] * (len(self.c) - 1)
        return CycloScalar._raw(self.m, tuple(_solve_square(mat, rhs)))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return CycloScalar._raw(self.m, tuple(x / other for x in self.c))
        return self * CycloScalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return CycloScalar.coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = CycloScalar.rational(1, self.m)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.c[0] == other and not any(self.c[1:])
        if not isinstance(other, CycloScalar):
            return NotImplemented
        if other.m == self.m:
            return self.c == other.c
        a, b = self._align(other)
        return a.c == b.c

    def __hash__(self):
        # rational values hash like the Fraction so mixed containers agree
        if self.is_rational():
            return hash(self.c[0])
        return hash((self.m, self.c))

    def __bool__(self):
        return not self.is_zero()

    # -- text / json --------------------------------------------------------
    def __repr__(self):
        return f"CycloScalar({self.m}, {[str(x) for x in self.c]})"

    def __str__(self):
        if self.m == 1 or self.is_rational():
            return str(self.c[0])
        parts = []
        for k, x in enumerate(self.c):
            if not x:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if not mono:
                parts.append(str(x))
            elif x == 1:
                parts.append(mono)
            elif x == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{x}*{mono}")
        return " + ".join(parts).replace("+ -", "- ") + f"  [m={self.m}]"

    def to_json(self):
        if self.m == 1:
            return str(self.c[0])
        return {"m": self.m, "coeffs": [str(x) for x in self.c]}

    @classmethod
    def from_json(cls, obj) -> "CycloScalar":
        if isinstance(obj, (str, int)):
            return cls.rational(Fraction(obj))
        return cls(int(obj["m"]), (Fraction(x) for x in obj["coeffs"]))


Scalar = Union[int, Fraction, CycloScalar]


def scalar_to_json(x: Scalar):
    if isinstance(x, CycloScalar):
        return x.to_json()
    return str(Fraction(x))


def scalar_from_json(obj) -> Scalar:
    """Rational strings come back as Fraction, conductor objects as CycloScalar."""
    if isinstance(obj, (str, int)):
        return Fraction(obj)
    return CycloScalar.from_json(obj)


def demote(x: Scalar) -> Scalar:
    """Fraction if the value is rational, otherwise the CycloScalar unchanged."""
    if isinstance(x, CycloScalar):
        q = x.try_demote()
        return x if q is None else q
    return Fraction(x)


def require_rational(x: Scalar) -> Fraction:
    q = demote(x)
    if isinstance(q, CycloScalar):
        raise ValueError(f"expected a rational value, got {q}")
    return q


def is_zero(x: Scalar) -> bool:
    return x == 0


def conductor_of(x: Scalar) -> int:
    return x.m if isinstance(x, CycloScalar) else 1


def inverse(x: Scalar) -> Scalar:
    if isinstance(x, CycloScalar):
        return x.inverse()
    if x == 0:
        raise ZeroDivisionError("inverse of zero")
    return 1 / Fraction(x)


def _solve_square(mat: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    n = len(mat)
    a = [list(row) + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# Univariate polynomials
# ---------------------------------------------------------------------------

class UniPoly:
    """Polynomial in t with ascending coefficients; no trailing zeros.

    The zero polynomial has ``degree == -1``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        c = [x if isinstance(x, CycloScalar) else Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, k: int, c: Scalar = 1) -> "UniPoly":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        return len(self.coeffs) == len(other.coeffs) and all(
            a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _as_unipoly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_unipoly(other))

    def __rsub__(self, other):
        return _as_unipoly(other) - self

    def __mul__(self, other):
        other = _as_unipoly(other)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b != 0:
                    out[i + j] = out[i + j] + a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = UniPoly([1])
        for _ in range(e):
            out = out * self
        return out

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dl = other.degree
        lead_inv = inverse(other.coeffs[-1])
        quot = [Fraction(0)] * max(len(rem) - dl, 0)
        for k in range(len(rem) - 1, dl - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            q = c * lead_inv
            quot[k - dl] = q
            for i, d in enumerate(other.coeffs):
                rem[k - dl + i] = rem[k - dl + i] - q * d
        return UniPoly(quot), UniPoly(rem[:dl] if dl > 0 else [])

    def __floordiv__(self, other):
        return self.divmod(_as_unipoly(other))[0]

    def __mod__(self, other):
        return self.divmod(_as_unipoly(other))[1]

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = self.divmod(other)
        if r.coeffs:
            raise ValueError("polynomial division is not exact")
        return q

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def reversed_poly(self, n: int) -> "UniPoly":
        """t^n * p(1/t) for n >= degree."""
        return UniPoly([self[n - k] for k in range(n + 1)])

    def demoted(self) -> "UniPoly":
        return UniPoly(demote(c) for c in self.coeffs)

    def __repr__(self):
        return f"UniPoly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        return format_poly(self.coeffs, "t")


def _as_unipoly(x) -> UniPoly:
    return x if isinstance(x, UniPoly) else UniPoly([x])


def format_poly(coeffs: Sequence[Scalar], var: str = "t") -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        cs = str(c) if not isinstance(c, CycloScalar) else f"({c})"
        if not mono:
            terms.append(cs)
        elif c == 1:
            terms.append(mono)
        else:
            terms.append(f"{cs}*{mono}")
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# Truncated power series
# ---------------------------------------------------------------------------

class TruncSeries:
    """Power series in t known modulo t^(N+1)."""

    __slots__ = ("N", "coeffs")

    def __init__(self, N: int, coeffs: Iterable[Scalar] = ()):
        if N < 0:
            raise ValueError("truncation order must be nonnegative")
        c = [x if isinstance(x, CycloScalar) else Fraction(x) for x in coeffs][: N + 1]
        c += [Fraction(0)] * (N + 1 - len(c))
        self.N = N
        self.coeffs = tuple(c)

    @classmethod
    def from_poly(cls, p: UniPoly, N: int) -> "TruncSeries":
        return cls(N, p.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.N == other.N and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        N = min(self.N, other.N)
        return TruncSeries(N, (self.coeffs[k] + other.coeffs[k] for k in range(N + 1)))

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        N = min(self.N, other.N)
        return TruncSeries(N, (self.coeffs[k] - other.coeffs[k] for k in range(N + 1)))

    def scale(self, c: Scalar) -> "TruncSeries":
        return TruncSeries(self.N, (x * c for x in self.coeffs))

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        N = min(self.N, other.N)
        out = [Fraction(0)] * (N + 1)
        for i in range(N + 1):
            a = self.coeffs[i]
            if a == 0:
                continue
            for j in range(N + 1 - i):
                b = other.coeffs[j]
                if b != 0:
                    out[i + j] = out[i + j] + a * b
        return TruncSeries(N, out)

    def reciprocal(self) -> "TruncSeries":
        return series_reciprocal(self)

    def demoted(self) -> "TruncSeries":
        return TruncSeries(self.N, (demote(c) for c in self.coeffs))

    def as_rationals(self) -> list[Fraction]:
        return [require_rational(c) for c in self.coeffs]

    def __repr__(self):
        return f"TruncSeries(N={self.N}, {format_poly(self.coeffs)})"


def series_reciprocal(s: TruncSeries) -> TruncSeries:
    """1/s modulo t^(N+1); the constant term must be nonzero."""
    a0 = s.coeffs[0]
    if a0 == 0:
        raise ZeroDivisionError("series reciprocal needs a nonzero constant term")
    inv0 = inverse(a0)
    out = [inv0]
    nz = [(j, c) for j, c in enumerate(s.coeffs) if j and c != 0]
    for k in range(1, s.N + 1):
        acc = Fraction(0)
        for j, c in nz:
            if j > k:
                break
            acc = acc + c * out[k - j]
        out.append(-acc * inv0)
    return TruncSeries(s.N, out)
