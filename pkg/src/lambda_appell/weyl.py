"""Normal-ordered differential operators and the operator family
``Lambda = sum_i a_i (Dx)^i D``.

An operator is stored as a map ``(m, n) -> c`` standing for ``c x^m D^n``.
The (Dx)-basis coefficients, the ``x^m D^(m+1)`` coefficients and the
factored product form are only views; everything computes through the
normal-ordered map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence

from .errors import NotFactorableError, NotLoweringError, ZeroOperatorError
from .exactmath import (
    Polynomial,
    as_rational,
    binomial,
    falling_factorial,
    format_rational,
    stirling1,
    stirling2,
)


class DiffOperator:
    """Element ``sum c_{m,n} x^m D^n`` of the Weyl algebra, normal ordered.

    ``*`` composes two operators (``(S * T)(p) == S(T(p))``) or scales by a
    number; calling the operator applies it to a :class:`Polynomial`.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        for (m, n), c in dict(terms or {}).items():
            if m < 0 or n < 0:
                raise ValueError("x-power and D-order must be non-negative")
            c = as_rational(c)
            if c:
                clean[(int(m), int(n))] = clean.get((int(m), int(n)), Fraction(0)) + c
        self._terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def identity(cls):
        return cls({(0, 0): 1})

    @classmethod
    def d(cls, order: int = 1):
        return cls({(0, order): 1})

    @classmethod
    def x(cls, power: int = 1):
        """Multiplication by ``x**power``."""
        return cls({(power, 0): 1})

    @classmethod
    def scalar(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def multiplication(cls, p: Polynomial):
        return cls({(i, 0): c for i, c in enumerate(p.coeffs)})

    @classmethod
    def linear_xd(cls, a, b):
        """``a I + b xD``."""
        return cls({(0, 0): a, (1, 1): b})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def x_gain(self):
        """Largest ``m - n`` over the terms: how far the operator can raise degree."""
        if not self._terms:
            return None
        return max(m - n for m, n in self._terms)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"DiffOperator({self.to_json()})"

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for (m, n), c in sorted(self._terms.items(), key=lambda t: (t[0][1], t[0][0])):
            word = "".join(
                s for s in (("x" if m == 1 else f"x^{m}") if m else "",
                            ("D" if n == 1 else f"D^{n}") if n else "") if s
            )
            out.append(format_rational(c) + (("*" + word) if word else ""))
        return " + ".join(out).replace("+ -", "- ")

    def __add__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        t = dict(self._terms)
        for k, v in other._terms.items():
            t[k] = t.get(k, Fraction(0)) + v
        return DiffOperator(t)

    def __neg__(self):
        return DiffOperator({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, DiffOperator):
            return compose_operators(self, other)
        try:
            s = as_rational(other)
        except TypeError:
            return NotImplemented
        return DiffOperator({k: s * v for k, v in self._terms.items()})

    def __rmul__(self, other):
        s = as_rational(other)
        return DiffOperator({k: s * v for k, v in self._terms.items()})

    def __pow__(self, n: int):
        out = DiffOperator.identity()
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, p: Polynomial) -> Polynomial:
        return apply_operator(self, p)

    def to_json(self) -> list:
        """``[[m, n, "p/q"], ...]`` sorted by ``(n, m)``."""
        return [[m, n, format_rational(c)]
                for (m, n), c in sorted(self._terms.items(), key=lambda t: (t[0][1], t[0][0]))]

    @classmethod
    def from_json(cls, data):
        return cls({(int(m), int(n)): as_rational(c) for m, n, c in data})


def apply_operator(T: DiffOperator, p: Polynomial) -> Polynomial:
    """``sum c_{m,n} x^m p^(n)(x)``."""
    out = Polynomial.zero()
    cache = {}
    for (m, n), c in T._terms.items():
        dp = cache.get(n)
        if dp is None:
            dp = cache[n] = p.derivative(n)
        out = out + dp.shift_power(m).scale(c)
    return out


def compose_operators(S: DiffOperator, T: DiffOperator) -> DiffOperator:
    """Normal-ordered product ``S o T``.

    Uses ``D^b x^c = sum_k C(b,k) c!/(c-k)! x^(c-k) D^(b-k)``.
    """
    out: dict = {}
    for (a, b), u in S._terms.items():
        for (c, d), v in T._terms.items():
            for k in range(min(b, c) + 1):
                w = u * v * binomial(b, k) * falling_factorial(c, k)
                key = (a + c - k, b - k + d)
                out[key] = out.get(key, Fraction(0)) + w
    return DiffOperator(out)


# -- the Lambda family -----------------------------------------------------


@dataclass(frozen=True)
class LambdaCoeffs:
    """Coefficients ``a_i`` of ``Lambda = sum_i a_i (Dx)^i D``.

    Trailing zeros are dropped, so ``a[-1] != 0`` unless the operator is
    zero (in which case ``a == (0,)``).
    """

    a: tuple = field(default=(Fraction(1),))

    def __post_init__(self):
        c = [as_rational(v) for v in self.a]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [Fraction(0)]
        object.__setattr__(self, "a", tuple(c))

    @classmethod
    def of(cls, *values):
        return cls(tuple(values))

    @property
    def k(self) -> int:
        return len(self.a) - 1

    def coeff(self, i: int) -> Fraction:
        return self.a[i] if 0 <= i < len(self.a) else Fraction(0)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.a)

    @property
    def symbol(self) -> Polynomial:
        """``f(x) = sum a_i x^i``."""
        return Polynomial(self.a)

    def rho(self, n: int) -> Fraction:
        """Normalizer ``(n+1) f(n+1)`` of ``Lambda B_{n+1}``."""
        return (n + 1) * self.symbol(n + 1)

    def operator(self) -> DiffOperator:
        return lambda_operator(self)

    def transpose(self) -> "LambdaCoeffs":
        return LambdaCoeffs(tuple(v if i % 2 else -v for i, v in enumerate(self.a)))

    def to_json(self) -> list:
        return [format_rational(v) for v in self.a]


def _coeffs(a) -> LambdaCoeffs:
    return a if isinstance(a, LambdaCoeffs) else LambdaCoeffs(tuple(a))


def dx_power_d(i: int) -> DiffOperator:
    """``(Dx)^i D`` built by explicit composition."""
    dx = DiffOperator.d() * DiffOperator.x()
    return (dx ** i) * DiffOperator.d()


def xd_from_dx(a) -> list:
    """Coefficients ``c_m`` of ``x^m D^(m+1)`` for ``sum a_i (Dx)^i D``."""
    a = _coeffs(a).a
    k = len(a) - 1
    return [sum((a[i] * stirling2(i + 1, m + 1) for i in range(m, k + 1)), Fraction(0))
            for m in range(k + 1)]


def lambda_operator(a) -> DiffOperator:
    """Normal-ordered form of ``sum a_i (Dx)^i D`` via Stirling numbers of the second kind."""
    c = xd_from_dx(a)
    return DiffOperator({(m, m + 1): v for m, v in enumerate(c)})


def coeffs_from_xd_powers(c: Sequence) -> LambdaCoeffs:
    """Rewrite ``sum c_i x^i D^(i+1)`` in the (Dx)-basis (signed first-kind numbers)."""
    c = [as_rational(v) for v in c] or [Fraction(0)]
    k = len(c) - 1
    return LambdaCoeffs(tuple(
        sum((c[i] * stirling1(i + 1, m + 1) for i in range(m, k + 1)), Fraction(0))
        for m in range(k + 1)
    ))


def coeffs_from_operator(T: DiffOperator) -> LambdaCoeffs:
    """Recover the (Dx)-basis coefficients of an operator of the form ``sum c_m x^m D^(m+1)``."""
    terms = T.terms
    if any(n != m + 1 for m, n in terms):
        raise ValueError("operator is not a combination of x^m D^(m+1)")
    if not terms:
        return LambdaCoeffs((0,))
    top = max(m for m, _ in terms)
    return coeffs_from_xd_powers([terms.get((m, m + 1), 0) for m in range(top + 1)])


def transpose_lambda(a) -> DiffOperator:
    """Transposed operator ``sum a_i (-1)^(i+1) (Dx)^i D`` (acts on forms)."""
    return lambda_operator(_coeffs(a).transpose())


def lambda_on_monomial(a, n: int):
    """``Lambda(x^n) = n f(n) x^(n-1)``; returns ``(coefficient, n - 1)``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    a = _coeffs(a)
    return n * a.symbol(n), n - 1


# -- product form ----------------------------------------------------------


@dataclass(frozen=True)
class FactoredForm:
    """``scale * prod_left (A I + B xD) . D . prod_right (A I + B xD)``.

    ``left`` lists the factors from the outermost inwards (``i = -l..-1``),
    ``right`` from the innermost outwards (``i = 1..t``).
    """

    left: tuple = ()
    right: tuple = ()
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        conv = lambda fs: tuple((as_rational(A), as_rational(B)) for A, B in fs)
        object.__setattr__(self, "left", conv(self.left))
        object.__setattr__(self, "right", conv(self.right))
        object.__setattr__(self, "scale", as_rational(self.scale))

    def operator(self) -> DiffOperator:
        """Product built by explicit composition (independent of the recursions)."""
        op = DiffOperator.d()
        for A, B in self.right:
            op = op * DiffOperator.linear_xd(A, B)
        for A, B in reversed(self.left):
            op = DiffOperator.linear_xd(A, B) * op
        return op * self.scale

    def to_json(self) -> dict:
        pair = lambda fs: [[format_rational(A), format_rational(B)] for A, B in fs]
        return {"left": pair(self.left), "right": pair(self.right),
                "scale": format_rational(self.scale)}


def lambda_from_factored(s: FactoredForm) -> LambdaCoeffs:
    """(Dx)-basis coefficients of a product, one factor at a time from ``D``."""
    a = [Fraction(1)]
    for A, B in s.right:
        # S_{l,t+1} = S_{l,t} (A I + B xD)
        nxt = [A * a[0]]
        nxt += [A * a[i] + B * a[i - 1] for i in range(1, len(a))]
        nxt.append(B * a[-1])
        a = nxt
    for A, B in reversed(s.left):
        # S_{l+1,t} = (A I + B xD) S_{l,t}
        nxt = [(A - B) * a[0]]
        nxt += [B * a[i - 1] + (A - B) * a[i] for i in range(1, len(a))]
        nxt.append(B * a[-1])
        a = nxt
    return LambdaCoeffs(tuple(s.scale * v for v in a))


def _integer_coeffs(p: Polynomial) -> list:
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return [v // g for v in ints] if g else ints


def _divisors(n: int) -> list:
    n = abs(n)
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def rational_roots(p: Polynomial) -> list:
    """Rational roots of ``p`` with multiplicity, sorted ascending."""
    if p.is_zero():
        raise ValueError("the zero polynomial has every number as a root")
    roots = []
    q = p
    while q.degree >= 1 and q[0] == 0:
        roots.append(Fraction(0))
        q = Polynomial(q.coeffs[1:])
    while q.degree >= 1:
        ints = _integer_coeffs(q)
        found = None
        for num in _divisors(ints[0]):
            for den in _divisors(ints[-1]):
                for r in (Fraction(num, den), Fraction(-num, den)):
                    if q(r) == 0:
                        found = r
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        q, _ = q.divmod(Polynomial([-found, 1]))
    return sorted(roots)


def factor_lambda(a) -> FactoredForm:
    """Right-sided product form ``D prod (A_i I + B_i xD)`` with ``prod (A_i + B_i x) = f``.

    Factors are primitive integer pairs sorted lexicographically; the leftover
    constant is folded into the first factor (or kept as ``scale`` when k = 0).
    """
    a = _coeffs(a)
    if a.is_zero():
        raise ZeroOperatorError("all coefficients vanish")
    f = a.symbol
    roots = rational_roots(f)
    if len(roots) < f.degree:
        raise NotFactorableError(
            f"f(x) = {f} has an irreducible factor of degree >= 2 over the rationals")
    factors = sorted((-r.numerator, r.denominator) for r in roots)
    factors = [(Fraction(A), Fraction(B)) for A, B in factors]
    prod = Polynomial.one()
    for A, B in factors:
        prod = prod * Polynomial([A, B])
    c = f.leading / prod.leading
    if not factors:
        return FactoredForm((), (), c)
    A, B = factors[0]
    factors[0] = (c * A, c * B)
    return FactoredForm((), tuple(factors))


# -- lowering test ---------------------------------------------------------


@dataclass(frozen=True)
class LoweringVerdict:
    lowering: bool
    witness: int | None = None

    def __bool__(self):
        return self.lowering

    def to_json(self) -> dict:
        return {"lowering": self.lowering, "witness": self.witness}


def positive_integer_roots(p: Polynomial) -> list:
    """Positive integer roots of ``p`` by the rational root theorem (exact, no scan bound)."""
    q = p
    while q.degree >= 1 and q[0] == 0:
        q = Polynomial(q.coeffs[1:])
    if q.degree < 1:
        return []
    ints = _integer_coeffs(q)
    return [d for d in _divisors(ints[0]) if q(d) == 0]


def is_lowering_operator(a) -> LoweringVerdict:
    """Lambda is lowering iff ``f`` has no positive integer root.

    The witness is the smallest offending root.
    """
    a = _coeffs(a)
    if a.is_zero():
        raise ZeroOperatorError("all coefficients vanish: Lambda is the zero operator")
    roots = positive_integer_roots(a.symbol)
    if roots:
        return LoweringVerdict(False, min(roots))
    return LoweringVerdict(True)


def require_lowering(a) -> LambdaCoeffs:
    a = _coeffs(a)
    verdict = is_lowering_operator(a)
    if not verdict:
        raise NotLoweringError(
            f"f({verdict.witness}) = 0, so Lambda is not a lowering operator", verdict.witness)
    return a


def parse_operator(spec: dict) -> LambdaCoeffs:
    """Read ``{"basis": "dx"|"xd"|"factored", ...}`` into (Dx)-basis coefficients."""
    basis = spec.get("basis", "dx")
    if basis == "dx":
        return LambdaCoeffs(tuple(as_rational(v) for v in spec["coeffs"]))
    if basis == "xd":
        return coeffs_from_xd_powers([as_rational(v) for v in spec["coeffs"]])
    if basis == "factored":
        return lambda_from_factored(FactoredForm(
            tuple(spec.get("left", ())), tuple(spec.get("right", ())), spec.get("scale", 1)))
    raise ValueError(f"unknown basis {basis!r}")


def convert(a, basis: str) -> dict:
    """Express ``a`` in the requested basis as a JSON-ready dict."""
    a = _coeffs(a)
    if basis == "dx":
        return {"basis": "dx", "coeffs": a.to_json()}
    if basis == "xd":
        return {"basis": "xd", "coeffs": [format_rational(v) for v in xd_from_dx(a)]}
    if basis == "factored":
        return {"basis": "factored", **factor_lambda(a).to_json()}
    raise ValueError(f"unknown basis {basis!r}")


__all__ = [
    "DiffOperator",
    "FactoredForm",
    "LambdaCoeffs",
    "LoweringVerdict",
    "apply_operator",
    "coeffs_from_operator",
    "coeffs_from_xd_powers",
    "compose_operators",
    "convert",
    "dx_power_d",
    "factor_lambda",
    "is_lowering_operator",
    "lambda_from_factored",
    "lambda_on_monomial",
    "lambda_operator",
    "parse_operator",
    "positive_integer_roots",
    "rational_roots",
    "require_lowering",
    "transpose_lambda",
    "xd_from_dx",
]
