"""Monic polynomial sequences: construction, structure coefficients,
orthogonality and Lambda-Appell tests.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import BoundsError, PreconditionError, TruncationError
from .exactmath import Polynomial, as_rational, format_rational
from .functionals import DEFAULT_MOMENTS, MomentFunctional, apply_transpose, dual_sequence, pair
from .weyl import LambdaCoeffs, lambda_operator, require_lowering


class MonicPolySequence:
    """Lazily extended MPS ``B_0, B_1, ...`` with ``deg B_n = n``, ``B_n`` monic.

    ``step(n, prev)`` returns ``B_n`` given ``prev = [B_0, ..., B_(n-1)]``.
    ``limit`` is the last available index for finite sequences.
    """

    def __init__(self, step: Callable, provenance: str = "explicit", limit: int | None = None):
        self._step = step
        self.provenance = provenance
        self.limit = limit
        self._polys: list = []
        self._lock = threading.Lock()

    @classmethod
    def explicit(cls, polys: Sequence, provenance: str = "explicit"):
        polys = [p if isinstance(p, Polynomial) else Polynomial(p) for p in polys]
        return cls(lambda n, prev: polys[n], provenance, limit=len(polys) - 1)

    @classmethod
    def from_function(cls, fn: Callable, provenance: str = "explicit", limit=None):
        return cls(lambda n, prev: fn(n), provenance, limit)

    def _extend(self, n: int):
        if self.limit is not None and n > self.limit:
            raise BoundsError(f"sequence only has B_0..B_{self.limit}")
        with self._lock:
            while len(self._polys) <= n:
                k = len(self._polys)
                p = self._step(k, self._polys)
                if p.degree != k or not p.is_monic():
                    raise PreconditionError(f"B_{k} = {p} is not monic of degree {k}")
                self._polys.append(p)

    def __getitem__(self, n: int) -> Polynomial:
        if n < 0:
            raise IndexError("negative index")
        if n >= len(self._polys):
            self._extend(n)
        return self._polys[n]

    def polys(self, upto: int) -> list:
        """``[B_0, ..., B_upto]``."""
        self[upto]
        return list(self._polys[:upto + 1])

    def __iter__(self):
        n = 0
        while self.limit is None or n <= self.limit:
            yield self[n]
            n += 1

    def to_json(self, upto: int) -> list:
        return [p.to_json() for p in self.polys(upto)]


def _as_lookup(values) -> Callable:
    if callable(values):
        return lambda n: as_rational(values(n))
    vals = [as_rational(v) for v in values]

    def get(n):
        if n >= len(vals):
            raise TruncationError(f"recurrence data only has {len(vals)} entries")
        return vals[n]
    return get


@dataclass
class RecurrencePair:
    """Three-term recurrence data.

    ``beta[n] = beta_n`` and ``gamma[n] = gamma_(n+1)``; either may be a
    list or a callable of ``n``.
    """

    beta: object
    gamma: object

    def __post_init__(self):
        self._beta = _as_lookup(self.beta)
        self._gamma = _as_lookup(self.gamma)

    def beta_at(self, n: int) -> Fraction:
        return self._beta(n)

    def gamma_at(self, n: int) -> Fraction:
        """``gamma_n`` for ``n >= 1``."""
        if n < 1:
            raise ValueError("gamma is indexed from 1")
        return self._gamma(n - 1)

    def affine(self, scale, shift) -> "RecurrencePair":
        """Data of ``scale^-n B_n(scale x + shift)``."""
        scale, shift = as_rational(scale), as_rational(shift)
        b, g = self._beta, self._gamma
        return RecurrencePair(lambda n: (b(n) - shift) / scale, lambda n: g(n) / scale ** 2)


def from_recurrence(r: RecurrencePair, provenance: str = "recurrence") -> MonicPolySequence:
    """``B_(n+2) = (x - beta_(n+1)) B_(n+1) - gamma_(n+1) B_n``, ``B_1 = x - beta_0``."""

    def step(n, prev):
        if n == 0:
            return Polynomial.one()
        if n == 1:
            return Polynomial([-r.beta_at(0), 1])
        g = r.gamma_at(n - 1)
        if g == 0:
            raise PreconditionError(f"gamma_{n - 1} = 0 violates regularity")
        return Polynomial([-r.beta_at(n - 1), 1]) * prev[n - 1] - prev[n - 2].scale(g)

    return MonicPolySequence(step, provenance)


def monomials() -> MonicPolySequence:
    return MonicPolySequence.from_function(Polynomial.monomial, "explicit")


def hermite_recurrence() -> RecurrencePair:
    return RecurrencePair(lambda n: 0, lambda n: n + 1)


def check_laguerre_parameter(alpha) -> Fraction:
    alpha = as_rational(alpha)
    if alpha.denominator == 1 and alpha < 0:
        raise PreconditionError(f"Laguerre parameter {alpha} is a negative integer")
    return alpha


def laguerre_recurrence(alpha) -> RecurrencePair:
    alpha = check_laguerre_parameter(alpha)
    return RecurrencePair(lambda n: 2 * n + alpha + 1, lambda n: (n + 1) * (n + alpha + 1))


def hermite() -> MonicPolySequence:
    """Monic Hermite: ``beta_n = 0``, ``gamma_(n+1) = n + 1``."""
    return from_recurrence(hermite_recurrence(), "recurrence:hermite")


def laguerre(alpha) -> MonicPolySequence:
    """Monic Laguerre: ``beta_n = 2n + alpha + 1``, ``gamma_(n+1) = (n+1)(n+alpha+1)``."""
    return from_recurrence(laguerre_recurrence(alpha), "recurrence:laguerre")


# -- structure coefficients -----------------------------------------------------


def expand_in_basis(p: Polynomial, polys: Sequence[Polynomial]) -> list:
    """Coefficients ``c`` with ``p = sum c_m B_m`` (monic basis, unitriangular solve)."""
    d = p.degree
    if d == float("-inf"):
        return []
    if d >= len(polys):
        raise TruncationError(f"need B_0..B_{d}")
    out = [Fraction(0)] * (d + 1)
    rem = p
    for m in range(d, -1, -1):
        c = rem[m]
        if c:
            out[m] = c
            rem = rem - polys[m].scale(c)
    return out


@dataclass
class StructureCoefficients:
    """``x B_(n+1) = B_(n+2) + beta_(n+1) B_(n+1) + sum_nu chi[n][nu] B_nu``."""

    beta: list
    chi: list

    def gamma(self, n: int) -> Fraction:
        """``gamma_(n+1) = chi[n][n]``."""
        return self.chi[n][n]

    def reconstruct(self, B0: Polynomial, B1: Polynomial, count: int) -> list:
        polys = [B0, B1]
        x = Polynomial.x()
        for n in range(count - 2):
            nxt = (x - self.beta[n + 1]) * polys[n + 1]
            for nu, c in enumerate(self.chi[n]):
                nxt = nxt - polys[nu].scale(c)
            polys.append(nxt)
        return polys

    def to_json(self) -> dict:
        return {"beta": [format_rational(v) for v in self.beta],
                "chi": [[format_rational(v) for v in row] for row in self.chi]}


def structure_coefficients(B: MonicPolySequence, upto: int) -> StructureCoefficients:
    """``beta_0..beta_(upto+1)`` and ``chi_{n,nu}`` for ``n <= upto``, by basis expansion."""
    polys = B.polys(upto + 2)
    x = Polynomial.x()
    beta = [expand_in_basis(x * polys[0], polys)[0]]
    chi = []
    for n in range(upto + 1):
        c = expand_in_basis(x * polys[n + 1], polys)
        beta.append(c[n + 1])
        chi.append(c[:n + 1])
    return StructureCoefficients(beta, chi)


@dataclass(frozen=True)
class OrthogonalityVerdict:
    orthogonal: bool
    order: int
    witness: tuple | None = None  # (n, nu, chi_{n,nu})

    def __bool__(self):
        return self.orthogonal

    def to_json(self) -> dict:
        w = None
        if self.witness is not None:
            n, nu, v = self.witness
            w = {"n": n, "nu": nu, "chi": format_rational(v)}
        return {"orthogonal": self.orthogonal, "verified_to_order": self.order, "witness": w}


def is_orthogonal(B: MonicPolySequence, upto: int) -> OrthogonalityVerdict:
    """Orthogonal to order ``upto`` iff ``chi_{n,nu} = 0`` (nu < n) and ``chi_{n,n} != 0``."""
    if upto < 2:
        raise ValueError("upto must be at least 2")
    sc = structure_coefficients(B, upto)
    for n, row in enumerate(sc.chi):
        for nu in range(n):
            if row[nu] != 0:
                return OrthogonalityVerdict(False, upto, (n, nu, row[nu]))
        if row[n] == 0:
            return OrthogonalityVerdict(False, upto, (n, n, row[n]))
    return OrthogonalityVerdict(True, upto)


def recurrence_of(B: MonicPolySequence, upto: int) -> RecurrencePair:
    """``beta_0..beta_upto`` and ``gamma_1..gamma_upto`` of an orthogonal sequence."""
    sc = structure_coefficients(B, upto)
    return RecurrencePair(sc.beta[:upto + 1], [sc.gamma(n) for n in range(upto)])


def orthogonal_from_functional(u: MomentFunctional, upto: int):
    """MOPS of a form by the Stieltjes procedure.

    ``beta_n = <u, x B_n^2> / <u, B_n^2>``, ``gamma_(n+1) = <u, B_(n+1)^2> / <u, B_n^2>``.
    Returns the sequence ``B_0..B_upto`` and its recurrence data.
    """
    if 2 * upto - 1 > u.trusted_to:
        raise TruncationError(f"order {upto} needs moments up to {2 * upto - 1}")
    x = Polynomial.x()
    polys = [Polynomial.one()]
    norms = [pair(u, polys[0])]
    if norms[0] == 0:
        raise PreconditionError("<u, 1> = 0: the form is not regular")
    betas, gammas = [], []
    for n in range(upto):
        Bn = polys[n]
        betas.append(pair(u, x * Bn * Bn) / norms[n])
        nxt = (x - betas[n]) * Bn
        if n:
            nxt = nxt - polys[n - 1].scale(gammas[n - 1])
        polys.append(nxt)
        if 2 * (n + 1) <= u.trusted_to:
            norm = pair(u, nxt * nxt)
            if norm == 0:
                raise PreconditionError(f"<u, B_{n + 1}^2> = 0: the form is not regular")
            norms.append(norm)
            gammas.append(norm / norms[n])
    return MonicPolySequence.explicit(polys, "orthogonal"), RecurrencePair(betas, gammas)


# -- Lambda-Appell ------------------------------------------------------------------


def lowered_sequence(B: MonicPolySequence, a) -> MonicPolySequence:
    """``B1_n = Lambda(B_(n+1)) / rho_n``, ``rho_n = (n+1) f(n+1)``."""
    a = require_lowering(a)
    L = lambda_operator(a)
    limit = None if B.limit is None else B.limit - 1
    return MonicPolySequence(lambda n, prev: L(B[n + 1]).scale(1 / a.rho(n)), "transformed", limit)


@dataclass(frozen=True)
class AppellVerdict:
    appell: bool
    order: int
    witness: int | None = None

    def __bool__(self):
        return self.appell

    def to_json(self) -> dict:
        return {"appell": self.appell, "verified_to_order": self.order, "witness": self.witness}


def is_lambda_appell(B: MonicPolySequence, a, upto: int) -> AppellVerdict:
    """``Lambda B_(n+1) == rho_n B_n`` for all ``n < upto``; witness is the first failing n."""
    a = require_lowering(a)
    L = lambda_operator(a)
    for n in range(upto):
        if L(B[n + 1]) != B[n].scale(a.rho(n)):
            return AppellVerdict(False, upto, n)
    return AppellVerdict(True, upto)


def build_lambda_appell(a, constants=None, upto: int | None = None) -> MonicPolySequence:
    """The Lambda-Appell MPS whose ``B_n`` has constant term ``constants[n]`` (``n >= 1``).

    ``Lambda`` maps ``x^j`` to ``j f(j) x^(j-1)``, so each non-constant
    coefficient of ``B_(n+1)`` is fixed by one division:
    ``[x^j] B_(n+1) = rho_n [x^(j-1)] B_n / (j f(j))``.
    """
    a = require_lowering(a)
    f = a.symbol
    if constants is None:
        const = lambda n: Fraction(0)
    elif callable(constants):
        const = lambda n: as_rational(constants(n))
    else:
        vals = [as_rational(v) for v in constants]
        const = lambda n: vals[n] if n < len(vals) else Fraction(0)

    def step(n, prev):
        if n == 0:
            return Polynomial.one()
        rho = a.rho(n - 1)
        Bp = prev[n - 1]
        coeffs = [const(n)] + [rho * Bp[j - 1] / (j * f(j)) for j in range(1, n + 1)]
        return Polynomial(coeffs)

    return MonicPolySequence(step, "appell-built", upto)


def translated_monomials(c) -> MonicPolySequence:
    """``(x + c)^n``, the D-Appell sequence with constant terms ``c^n``."""
    c = as_rational(c)
    return build_lambda_appell(LambdaCoeffs((1,)), lambda n: c ** n)


@dataclass(frozen=True)
class DualAppellReport:
    lowering_relation: bool   # tLambda(u_n) == rho_n u_(n+1)
    power_formula: bool       # u_n == (prod rho_j)^-1 tLambda^n u_0
    order: int
    moments: int
    first_failure: int | None = None

    def __bool__(self):
        return self.lowering_relation and self.power_formula

    def to_json(self) -> dict:
        return {"lowering_relation": self.lowering_relation, "power_formula": self.power_formula,
                "verified_to_order": self.order, "moments_checked": self.moments,
                "first_failure": self.first_failure}


def dual_appell_check(B: MonicPolySequence, a, upto: int, N: int = DEFAULT_MOMENTS) -> DualAppellReport:
    """Check ``tLambda u_n = rho_n u_(n+1)`` and the closed power formula for ``n <= upto``."""
    a = require_lowering(a)
    if upto + 1 > N:
        raise TruncationError("need upto + 1 <= N")
    L = lambda_operator(a)
    duals = dual_sequence(B, upto + 2, N)
    rel_ok, pow_ok, first = True, True, None
    power = duals[0]
    norm = Fraction(1)
    for n in range(upto + 1):
        lhs = apply_transpose(L, duals[n])
        if not lhs.agrees_with(duals[n + 1] * a.rho(n), N):
            rel_ok = False
            first = n if first is None else first
        if not duals[n].agrees_with(power * (1 / norm), N):
            pow_ok = False
            first = n if first is None else first
        power = apply_transpose(L, power)
        norm *= a.rho(n)
    return DualAppellReport(rel_ok, pow_ok, upto, N, first)


def affine_transform(B: MonicPolySequence, scale, shift=0) -> MonicPolySequence:
    """``scale^-n B_n(scale x + shift)``."""
    scale, shift = as_rational(scale), as_rational(shift)
    if scale == 0:
        raise PreconditionError("scale must be nonzero")
    return MonicPolySequence(
        lambda n, prev: B[n].affine(scale, shift).scale(scale ** -n), "transformed", B.limit)


# -- degree ladders ---------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeStructure:
    """``n0`` is the first nonzero index (``None`` when every f_n vanishes)."""

    n0: int | None
    degrees: tuple
    rhos: tuple

    @property
    def all_zero(self) -> bool:
        return self.n0 is None


def degree_structure(fs: Sequence[Polynomial], a, rho: Callable | None = None) -> DegreeStructure:
    """Validate ``rho_n f_n = Lambda(f_(n+1))`` with nonzero ``rho_n`` and read off the ladder.

    If ``rho`` is omitted each ``rho_n`` is inferred as the (necessarily
    nonzero) ratio between ``Lambda(f_(n+1))`` and ``f_n``.
    """
    a = a if isinstance(a, LambdaCoeffs) else LambdaCoeffs(tuple(a))
    L = lambda_operator(a)
    rhos = []
    for n in range(len(fs) - 1):
        img = L(fs[n + 1])
        if rho is not None:
            r = as_rational(rho(n))
            if r == 0 or img != fs[n].scale(r):
                raise PreconditionError(f"rho_{n} f_{n} != Lambda f_{n + 1}")
        elif fs[n].is_zero():
            if not img.is_zero():
                raise PreconditionError(f"f_{n} = 0 but Lambda f_{n + 1} != 0")
            r = None
        else:
            if img.is_zero():
                raise PreconditionError(f"Lambda f_{n + 1} = 0 while f_{n} != 0")
            r = img.leading / fs[n].leading
            if img != fs[n].scale(r):
                raise PreconditionError(f"Lambda f_{n + 1} is not proportional to f_{n}")
        rhos.append(r)
    degrees = tuple(p.degree for p in fs)
    n0 = next((i for i, p in enumerate(fs) if not p.is_zero()), None)
    if n0 is not None:
        for n in range(n0, len(fs) - 1):
            if degrees[n + 1] != degrees[n] + 1:
                raise PreconditionError(f"degree ladder broken at n = {n}")
    return DegreeStructure(n0, degrees, tuple(rhos))


def parse_sequence(desc: dict) -> MonicPolySequence:
    """Build a sequence from a JSON descriptor.

    ``family`` is one of hermite, laguerre (``alpha``), recurrence (``beta``,
    ``gamma``), appell (``coeffs``, ``constants``), explicit (``polys``),
    monomials, translated (``shift``: the sequence ``(x + shift)^n``).
    """
    family = desc.get("family")
    if family == "hermite":
        return hermite()
    if family == "laguerre":
        return laguerre(desc.get("alpha", 0))
    if family == "recurrence":
        beta, gamma = desc["beta"], desc["gamma"]
        seq = from_recurrence(RecurrencePair(beta, gamma))
        seq.limit = min(len(beta), len(gamma) + 1)
        return seq
    if family == "appell":
        return build_lambda_appell(LambdaCoeffs(tuple(desc.get("coeffs", [1]))),
                                   desc.get("constants"))
    if family == "explicit":
        return MonicPolySequence.explicit([Polynomial.from_json(p) for p in desc["polys"]])
    if family == "monomials":
        return monomials()
    if family == "translated":
        return translated_monomials(desc.get("shift", 1))
    raise ValueError(f"unknown sequence family {family!r}")


__all__ = [
    "AppellVerdict",
    "DegreeStructure",
    "DualAppellReport",
    "MonicPolySequence",
    "OrthogonalityVerdict",
    "RecurrencePair",
    "StructureCoefficients",
    "affine_transform",
    "build_lambda_appell",
    "check_laguerre_parameter",
    "degree_structure",
    "dual_appell_check",
    "expand_in_basis",
    "from_recurrence",
    "hermite",
    "hermite_recurrence",
    "is_lambda_appell",
    "is_orthogonal",
    "laguerre",
    "laguerre_recurrence",
    "lowered_sequence",
    "monomials",
    "orthogonal_from_functional",
    "parse_sequence",
    "recurrence_of",
    "structure_coefficients",
    "translated_monomials",
]
