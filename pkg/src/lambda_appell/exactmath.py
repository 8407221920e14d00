"""Exact scalars, dense univariate polynomials and combinatorial tables.

Rationals are plain :class:`fractions.Fraction` values. Polynomials are
immutable and store their coefficients densely, lowest power first.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb, factorial
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

from .errors import BoundsError

Rational = Fraction

#: Degree of the zero polynomial. Comparable with ints, absorbs subtraction.
DEG_ZERO = float("-inf")

DEFAULT_TABLE_BOUND = 64


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-3/4"`` to a Fraction.

    Floats are refused: there is no floating-point mode.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an exact value such as '1/3'")
    # sympy Rational and friends
    try:
        return Fraction(int(value.p), int(value.q))
    except AttributeError:
        raise TypeError(f"cannot interpret {value!r} as a rational") from None


def format_rational(q) -> str:
    """Canonical string form: ``"p/q"``, or ``"p"`` when the denominator is 1."""
    q = as_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    return as_rational(text)


class Polynomial:
    """Dense univariate polynomial over Q.

    ``coeffs[i]`` is the coefficient of ``x**i``; the last entry is nonzero,
    and the zero polynomial has no coefficients at all.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [as_rational(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self._c = tuple(c)

    @classmethod
    def _raw(cls, coeffs: tuple) -> "Polynomial":
        # trusted constructor: coeffs already Fractions
        p = object.__new__(cls)
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        p._c = tuple(c)
        return p

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls._raw(())

    @classmethod
    def one(cls) -> "Polynomial":
        return cls._raw((Fraction(1),))

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls([c])

    @classmethod
    def monomial(cls, power: int, coeff=1) -> "Polynomial":
        if power < 0:
            raise ValueError("negative power")
        return cls([0] * power + [coeff])

    @classmethod
    def x(cls) -> "Polynomial":
        return cls.monomial(1)

    # -- inspection -------------------------------------------------------

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def degree(self):
        """Index of the last nonzero coefficient, ``DEG_ZERO`` for zero."""
        return len(self._c) - 1 if self._c else DEG_ZERO

    @property
    def leading(self) -> Fraction:
        return self._c[-1] if self._c else Fraction(0)

    def is_zero(self) -> bool:
        return not self._c

    def is_monic(self) -> bool:
        return bool(self._c) and self._c[-1] == 1

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self._c):
            return self._c[i]
        return Fraction(0)

    def __len__(self):
        return len(self._c)

    def __iter__(self):
        return iter(self._c)

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        return f"Polynomial([{', '.join(format_rational(c) for c in self._c)}])"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for i in range(len(self._c) - 1, -1, -1):
            c = self._c[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and c == 1:
                s = mono
            elif mono and c == -1:
                s = "-" + mono
            else:
                s = format_rational(c) + ("*" + mono if mono else "")
            parts.append(s)
        return " + ".join(parts).replace("+ -", "- ")

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial.constant(as_rational(other))

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self._c, o._c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] += v
        return Polynomial._raw(tuple(out))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(tuple(-v for v in self._c))

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                s = as_rational(other)
            except TypeError:
                return NotImplemented
            return self.scale(s)
        a, b = self._c, other._c
        if not a or not b:
            return Polynomial.zero()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, u in enumerate(a):
            if u == 0:
                continue
            for j, v in enumerate(b):
                out[i + j] += u * v
        return Polynomial._raw(tuple(out))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        s = as_rational(other)
        if s == 0:
            raise ZeroDivisionError("polynomial division by zero scalar")
        return self.scale(1 / s)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result, base = Polynomial.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, s) -> "Polynomial":
        s = as_rational(s)
        if s == 0:
            return Polynomial.zero()
        return Polynomial._raw(tuple(s * v for v in self._c))

    def shift_power(self, k: int) -> "Polynomial":
        """Multiply by ``x**k``."""
        if not self._c:
            return self
        return Polynomial._raw((Fraction(0),) * k + self._c)

    def divmod(self, divisor: "Polynomial"):
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self._c)
        d = len(divisor._c) - 1
        lead = divisor._c[-1]
        if len(rem) - 1 < d:
            return Polynomial.zero(), self
        quot = [Fraction(0)] * (len(rem) - d)
        for i in range(len(rem) - 1 - d, -1, -1):
            q = rem[i + d] / lead
            quot[i] = q
            if q:
                for j, v in enumerate(divisor._c):
                    rem[i + j] -= q * v
        return Polynomial._raw(tuple(quot)), Polynomial._raw(tuple(rem[:d]))

    # -- calculus and substitution -----------------------------------------

    def derivative(self, order: int = 1) -> "Polynomial":
        if order < 0:
            raise ValueError("negative derivative order")
        c = self._c
        if order == 0:
            return self
        if order >= len(c):
            return Polynomial.zero()
        return Polynomial._raw(tuple(
            c[i] * falling_factorial(i, order) for i in range(order, len(c))
        ))

    def __call__(self, x):
        if isinstance(x, Polynomial):
            return self.compose(x)
        x = as_rational(x)
        acc = Fraction(0)
        for v in reversed(self._c):
            acc = acc * x + v
        return acc

    def compose(self, inner: "Polynomial") -> "Polynomial":
        acc = Polynomial.zero()
        for v in reversed(self._c):
            acc = acc * inner + v
        return acc

    def affine(self, scale, shift=0) -> "Polynomial":
        """Return ``p(scale*x + shift)``."""
        return self.compose(Polynomial([shift, scale]))

    def in_cube(self) -> "Polynomial":
        """Return ``p(x**3)``."""
        out = [Fraction(0)] * (3 * len(self._c) - 2) if self._c else []
        for i, v in enumerate(self._c):
            out[3 * i] = v
        return Polynomial._raw(tuple(out))

    def monic(self) -> "Polynomial":
        if not self._c:
            raise ZeroDivisionError("zero polynomial has no monic normalization")
        return self.scale(1 / self._c[-1])

    # -- serialization ----------------------------------------------------

    def to_json(self) -> list:
        return [format_rational(v) for v in self._c]

    @classmethod
    def from_json(cls, data: Sequence) -> "Polynomial":
        return cls(as_rational(v) for v in data)


def poly_arith(p: Polynomial, q, op: str) -> Polynomial:
    """Dispatch helper for ``add``, ``sub``, ``mul`` and ``scale``."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "scale":
        return p.scale(q)
    raise ValueError(f"unknown operation {op!r}")


def split_by_residue(p: Polynomial, modulus: int = 3) -> list:
    """Components ``p_r`` with ``p(x) = sum_r x**r * p_r(x**modulus)``."""
    return [Polynomial(p.coeffs[r::modulus]) for r in range(modulus)]


def combine_residues(parts: Sequence[Polynomial]) -> Polynomial:
    """Inverse of :func:`split_by_residue`."""
    modulus = len(parts)
    size = max((modulus * len(q) for q in parts), default=0)
    out = [Fraction(0)] * size
    for r, q in enumerate(parts):
        for j, v in enumerate(q.coeffs):
            out[modulus * j + r] = v
    return Polynomial._raw(tuple(out))


# -- combinatorics --------------------------------------------------------


def falling_factorial(n: int, k: int) -> int:
    """``n (n-1) ... (n-k+1)``; zero when ``0 <= n < k``."""
    r = 1
    for i in range(k):
        r *= n - i
    return r


def pochhammer(a, n: int) -> Fraction:
    """Rising product ``(a)_n = a (a+1) ... (a+n-1)`` with ``(a)_0 = 1``."""
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    a = as_rational(a)
    r = Fraction(1)
    for i in range(n):
        r *= a + i
    return r


def binomial(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


class StirlingTable:
    """Triangular table of Stirling numbers, rows ``0..bound``.

    ``kind`` is ``"second"`` for S(n, k) or ``"first"`` for the signed
    numbers s(n, k).
    """

    def __init__(self, kind: str, bound: int = DEFAULT_TABLE_BOUND):
        if kind not in ("first", "second"):
            raise ValueError("kind must be 'first' or 'second'")
        if bound < 0:
            raise ValueError("bound must be non-negative")
        self.kind = kind
        self.bound = bound
        rows = [[1]]
        for n in range(1, bound + 1):
            prev = rows[-1]
            row = [0] * (n + 1)
            for k in range(1, n + 1):
                left = prev[k - 1]
                up = prev[k] if k < n else 0
                if kind == "second":
                    row[k] = k * up + left
                else:
                    row[k] = left - (n - 1) * up
            rows.append(row)
        self._rows = rows

    def __call__(self, n: int, k: int) -> int:
        if n < 0 or k < 0 or n > self.bound:
            raise BoundsError(f"Stirling index ({n}, {k}) outside table rows 0..{self.bound}")
        if k > n:
            return 0
        return self._rows[n][k]

    def row(self, n: int) -> list:
        if not 0 <= n <= self.bound:
            raise BoundsError(f"row {n} outside 0..{self.bound}")
        return list(self._rows[n])


_tables: dict = {}
_tables_lock = threading.Lock()


def stirling_table(kind: str, bound: int = DEFAULT_TABLE_BOUND) -> StirlingTable:
    """Shared, lazily built table with at least ``bound`` rows."""
    with _tables_lock:
        t = _tables.get(kind)
        if t is None or t.bound < bound:
            t = StirlingTable(kind, max(bound, DEFAULT_TABLE_BOUND))
            _tables[kind] = t
        return t


def stirling(kind: str, n: int, k: int, bound: int = DEFAULT_TABLE_BOUND) -> Fraction:
    """Exact Stirling number; ``kind`` is ``"first"`` (signed) or ``"second"``.

    Raises :class:`BoundsError` for negative indices or ``n > bound``.
    """
    if n > bound:
        raise BoundsError(f"n={n} exceeds the table bound {bound}")
    return Fraction(stirling_table(kind, bound)(n, k))


def stirling2(n: int, k: int) -> Fraction:
    return stirling("second", n, k)


def stirling1(n: int, k: int) -> Fraction:
    return stirling("first", n, k)


__all__ = [
    "DEG_ZERO",
    "Fraction",
    "Polynomial",
    "Rational",
    "StirlingTable",
    "as_rational",
    "binomial",
    "combine_residues",
    "factorial",
    "falling_factorial",
    "format_rational",
    "parse_rational",
    "pochhammer",
    "poly_arith",
    "split_by_residue",
    "stirling",
    "stirling1",
    "stirling2",
    "stirling_table",
]
