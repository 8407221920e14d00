"""Moment functionals (forms) truncated to finitely many moments.

A form ``u`` is identified with its moments ``(u)_n = <u, x^n>``. Only
``(u)_0 .. (u)_N`` are stored, and every operation returns a functional whose
length is exactly the number of moments it can vouch for. Checks built on
top of this are therefore "verified to order N", never for all n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PreconditionError, TruncationError
from .exactmath import Polynomial, as_rational, falling_factorial, format_rational
from .weyl import DiffOperator, LambdaCoeffs, lambda_operator

DEFAULT_MOMENTS = 64


@dataclass(frozen=True)
class MomentFunctional:
    moments: tuple

    def __post_init__(self):
        object.__setattr__(self, "moments", tuple(as_rational(v) for v in self.moments))

    @classmethod
    def from_function(cls, fn, N: int):
        return cls(tuple(fn(n) for n in range(N + 1)))

    @classmethod
    def zero(cls, N: int):
        return cls((0,) * (N + 1))

    @property
    def trusted_to(self) -> int:
        """Highest moment index that is exact (``N``); -1 if nothing is known."""
        return len(self.moments) - 1

    N = trusted_to

    def __getitem__(self, n: int) -> Fraction:
        if not 0 <= n < len(self.moments):
            raise TruncationError(f"moment {n} not available (trusted to {self.trusted_to})")
        return self.moments[n]

    def __len__(self):
        return len(self.moments)

    def truncate(self, N: int) -> "MomentFunctional":
        if N > self.trusted_to:
            raise TruncationError(f"cannot extend a functional trusted to {self.trusted_to} to {N}")
        return MomentFunctional(self.moments[:N + 1])

    def _common(self, other):
        n = min(len(self.moments), len(other.moments))
        return self.moments[:n], other.moments[:n]

    def __add__(self, other):
        a, b = self._common(other)
        return MomentFunctional(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other):
        a, b = self._common(other)
        return MomentFunctional(tuple(x - y for x, y in zip(a, b)))

    def __neg__(self):
        return MomentFunctional(tuple(-v for v in self.moments))

    def __mul__(self, s):
        if isinstance(s, Polynomial):
            return left_multiply(s, self)
        s = as_rational(s)
        return MomentFunctional(tuple(s * v for v in self.moments))

    def __rmul__(self, s):
        return self.__mul__(s)

    def agrees_with(self, other, upto: int | None = None) -> bool:
        """Equality on the moments both sides vouch for (or up to ``upto``)."""
        n = min(self.trusted_to, other.trusted_to)
        if upto is not None:
            if upto > n:
                raise TruncationError(f"comparison to order {upto} exceeds trusted range {n}")
            n = upto
        return self.moments[:n + 1] == other.moments[:n + 1]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.moments)

    def to_json(self) -> dict:
        return {"moments": [format_rational(v) for v in self.moments],
                "trusted_to": self.trusted_to}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, dict):
            moments = data["moments"]
            trusted = data.get("trusted_to", len(moments) - 1)
            return cls(tuple(moments[:trusted + 1]))
        return cls(tuple(data))


def pair(u: MomentFunctional, p: Polynomial) -> Fraction:
    """``<u, p> = sum p_j (u)_j``."""
    if p.degree > u.trusted_to:
        raise TruncationError(
            f"polynomial of degree {p.degree} needs more than {u.trusted_to + 1} moments")
    return sum((c * u.moments[j] for j, c in enumerate(p.coeffs)), Fraction(0))


def derivative_form(u: MomentFunctional, order: int = 1) -> MomentFunctional:
    """Form derivative, ``<Du, p> = -<u, p'>``, so ``(Du)_n = -n (u)_(n-1)``.

    Each derivative makes one more moment exact.
    """
    for _ in range(order):
        m = u.moments
        u = MomentFunctional((Fraction(0),) + tuple(-(n + 1) * m[n] for n in range(len(m))))
    return u


def left_multiply(p: Polynomial, u: MomentFunctional) -> MomentFunctional:
    """``(pu)_n = sum_j p_j (u)_(n+j)``; exact to ``N - deg p``."""
    if p.is_zero():
        return MomentFunctional.zero(u.trusted_to)
    top = u.trusted_to - p.degree
    m = u.moments
    return MomentFunctional(tuple(
        sum((c * m[n + j] for j, c in enumerate(p.coeffs)), Fraction(0))
        for n in range(top + 1)
    ))


def apply_transpose(T: DiffOperator, u: MomentFunctional) -> MomentFunctional:
    """Transpose of a polynomial operator, from ``<tT u, x^n> = <u, T x^n>``.

    Exact to ``N - x_gain(T)``.
    """
    if T.is_zero():
        return MomentFunctional.zero(u.trusted_to)
    top = u.trusted_to - T.x_gain
    m = u.moments
    out = []
    for n in range(top + 1):
        acc = Fraction(0)
        for (a, b), c in T.terms.items():
            if b <= n:
                acc += c * falling_factorial(n, b) * m[n - b + a]
        out.append(acc)
    return MomentFunctional(tuple(out))


def apply_on_functional(T: DiffOperator, u: MomentFunctional) -> MomentFunctional:
    """Let the operator word act on a form: ``D`` as the form derivative and
    ``x^m`` as left multiplication, so ``x^m D^n`` maps ``u`` to ``x^m (D^n u)``.
    """
    parts = [c * left_multiply(Polynomial.monomial(m), derivative_form(u, n))
             for (m, n), c in T.terms.items()]
    if not parts:
        return MomentFunctional.zero(u.trusted_to)
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out


def transpose_lambda_action(a, u: MomentFunctional) -> MomentFunctional:
    """``tLambda(u)``, computed from the adjunction with ``Lambda``."""
    a = a if isinstance(a, LambdaCoeffs) else LambdaCoeffs(tuple(a))
    return apply_transpose(lambda_operator(a), u)


# -- dual sequences ---------------------------------------------------------


def monomials_in_basis(polys: Sequence[Polynomial]) -> list:
    """Rows ``c[j]`` with ``x^j = sum_m c[j][m] B_m`` for a monic basis ``polys``."""
    N = len(polys) - 1
    rows = []
    for j in range(N + 1):
        B = polys[j]
        if B.degree != j or not B.is_monic():
            raise PreconditionError(f"B_{j} is not monic of degree {j}")
        # x^j = B_j - sum_{m<j} b_{j,m} x^m
        row = [Fraction(0)] * (N + 1)
        row[j] = Fraction(1)
        for m in range(j):
            b = B[m]
            if b:
                for t, v in enumerate(rows[m]):
                    if v:
                        row[t] -= b * v
        rows.append(row)
    return rows


def dual_sequence(B, count: int, N: int = DEFAULT_MOMENTS) -> list:
    """Forms ``u_n`` with ``<u_n, B_m> = delta_{n,m}``, ``n < count``, moments ``0..N``.

    ``(u_n)_j`` is the coefficient of ``B_n`` when ``x^j`` is written in the
    B-basis, so the moments are exact (not approximations) up to ``N``.
    """
    if count > N + 1:
        raise PreconditionError("count must not exceed N + 1")
    polys = B.polys(N) if hasattr(B, "polys") else list(B)[:N + 1]
    if len(polys) < N + 1:
        raise TruncationError(f"need B_0..B_{N}, got {len(polys)} polynomials")
    rows = monomials_in_basis(polys)
    return [MomentFunctional(tuple(rows[j][n] for j in range(N + 1))) for n in range(count)]


# -- functional equations ---------------------------------------------------


@dataclass(frozen=True)
class FunctionalEquation:
    """``sum_i p_i(x) u^(i) = 0`` where ``u^(i)`` is the i-th form derivative."""

    terms: tuple

    def __post_init__(self):
        merged = {}
        for p, i in self.terms:
            if not isinstance(p, Polynomial):
                p = Polynomial(p)
            merged[int(i)] = merged.get(int(i), Polynomial.zero()) + p
        if not merged:
            raise ValueError("a functional equation needs at least one term")
        object.__setattr__(self, "terms", tuple((p, i) for i, p in sorted(merged.items())))

    @classmethod
    def divergence_form(cls, phi: Polynomial, psi: Polynomial):
        """``D(phi u) + psi u = 0``, i.e. ``phi u' + (phi' + psi) u = 0``."""
        return cls(((phi, 1), (phi.derivative() + psi, 0)))

    @classmethod
    def from_operator(cls, T: DiffOperator, rhs: Polynomial | None = None):
        """``T(u) = rhs u`` with ``T`` acting on forms as in :func:`apply_on_functional`."""
        terms = {}
        for (m, n), c in T.terms.items():
            terms[n] = terms.get(n, Polynomial.zero()) + Polynomial.monomial(m, c)
        if rhs is not None:
            terms[0] = terms.get(0, Polynomial.zero()) - rhs
        return cls(tuple((p, i) for i, p in terms.items()))

    @property
    def gain(self) -> int:
        """``max(deg p_i - i)``: moment index shift of the equation."""
        live = [p.degree - i for p, i in self.terms if not p.is_zero()]
        return max(live) if live else 0

    def apply(self, u: MomentFunctional) -> MomentFunctional:
        out = None
        for p, i in self.terms:
            if p.is_zero():
                continue
            t = left_multiply(p, derivative_form(u, i))
            out = t if out is None else out + t
        return out if out is not None else MomentFunctional.zero(u.trusted_to)

    def moment_form(self, n: int) -> dict:
        """Coefficients ``{j: c}`` with ``<sum p_i u^(i), x^n> = sum_j c (u)_j``."""
        out: dict = {}
        for p, i in self.terms:
            sign = -1 if i % 2 else 1
            for j, c in enumerate(p.coeffs):
                if c == 0 or n + j < i:
                    continue
                idx = n + j - i
                out[idx] = out.get(idx, Fraction(0)) + sign * c * falling_factorial(n + j, i)
        return {k: v for k, v in out.items() if v}


def residual(eq: FunctionalEquation, u: MomentFunctional, upto: int) -> list:
    """Moments ``0..upto`` of ``sum p_i u^(i)``; all zero means ``u`` solves ``eq`` to that order."""
    r = eq.apply(u)
    if upto > r.trusted_to:
        raise TruncationError(
            f"residual needed to order {upto} but only {r.trusted_to} moments are exact")
    return list(r.moments[:upto + 1])


def solve_functional_equation(eq: FunctionalEquation, initial: Sequence, N: int) -> MomentFunctional:
    """Moments of a form solving ``eq`` from its first ``gain`` moments.

    The n-th moment relation is solved for ``(u)_(n+gain)``; fails if that
    coefficient vanishes.
    """
    g = eq.gain
    m = [as_rational(v) for v in initial]
    if len(m) < g:
        raise PreconditionError(f"need {g} initial moments, got {len(m)}")
    n = len(m) - g
    while len(m) < N + 1:
        form = eq.moment_form(n)
        top = n + g
        lead = form.pop(top, Fraction(0))
        if lead == 0:
            raise PreconditionError(f"moment relation {n} does not determine (u)_{top}")
        m.append(-sum((c * m[j] for j, c in form.items()), Fraction(0)) / lead)
        n += 1
    return MomentFunctional(tuple(m[:N + 1]))


# -- product rules for the three-term Lambda ----------------------------------


def lambda_product_rules_hold(a, f: Polynomial, p: Polynomial, u: MomentFunctional) -> bool:
    """Check both Leibniz-type rules of the k = 2 operator on concrete inputs.

    Polynomial side::

        Lambda(fp) = f Lambda(p) + p Lambda(f) + 2(a1+3a2) x f'p'
                     + 3a2 x^2 f''p' + 3a2 x^2 f'p''

    Form side::

        tLambda(fu) = f tLambda(u) - Lambda(f) u + 2a1 (f' + x f'') u
                      + (2(a1-3a2) x f' - 3a2 x^2 f'') u' - 3a2 x^2 f' u''
    """
    a = a if isinstance(a, LambdaCoeffs) else LambdaCoeffs(tuple(a))
    if a.k > 2:
        raise PreconditionError("the product rules are stated for k <= 2")
    a1, a2 = a.coeff(1), a.coeff(2)
    L = lambda_operator(a)
    x, x2 = Polynomial.x(), Polynomial.monomial(2)
    f1, f2 = f.derivative(), f.derivative(2)
    p1, p2 = p.derivative(), p.derivative(2)

    lhs = L(f * p)
    rhs = (f * L(p) + p * L(f) + (x * f1 * p1).scale(2 * (a1 + 3 * a2))
           + (x2 * f2 * p1).scale(3 * a2) + (x2 * f1 * p2).scale(3 * a2))
    if lhs != rhs:
        return False

    tl = lambda w: apply_transpose(L, w)
    lhs_u = tl(left_multiply(f, u))
    rhs_u = (left_multiply(f, tl(u))
             - left_multiply(L(f), u)
             + left_multiply((f1 + x * f2).scale(2 * a1), u)
             + left_multiply((x * f1).scale(2 * (a1 - 3 * a2)) - (x2 * f2).scale(3 * a2),
                             derivative_form(u))
             - left_multiply((x2 * f1).scale(3 * a2), derivative_form(u, 2)))
    return lhs_u.agrees_with(rhs_u)


__all__ = [
    "DEFAULT_MOMENTS",
    "FunctionalEquation",
    "MomentFunctional",
    "apply_on_functional",
    "apply_transpose",
    "derivative_form",
    "dual_sequence",
    "lambda_product_rules_hold",
    "left_multiply",
    "monomials_in_basis",
    "pair",
    "residual",
    "solve_functional_equation",
    "transpose_lambda_action",
]
