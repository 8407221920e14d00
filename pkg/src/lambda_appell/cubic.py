"""Cubic decomposition of a monic polynomial sequence.

Each ``W_m`` is split by powers mod 3::

    W_3n     = P_n(x^3)   + x a1_(n-1)(x^3) + x^2 a2_(n-1)(x^3)
    W_3n+1   = b1_n(x^3)  + x Q_n(x^3)      + x^2 b2_(n-1)(x^3)
    W_3n+2   = c1_n(x^3)  + x c2_n(x^3)     + x^2 R_n(x^3)

``P, Q, R`` are monic of degree n; the six secondary components are
polynomials of bounded degree that may vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PreconditionError
from .exactmath import Polynomial, binomial, combine_residues, format_rational, pochhammer, split_by_residue
from .sequences import MonicPolySequence, is_lambda_appell
from .weyl import DiffOperator, LambdaCoeffs, coeffs_from_operator, is_lowering_operator

PRINCIPAL = ("P", "Q", "R")
SECONDARY = ("a1", "a2", "b1", "b2", "c1", "c2")
# components whose natural index lags the row index by one (stored from -1)
_LAGGED = ("a1", "a2", "b2")


def _bound(name: str, n: int) -> int:
    """Maximal degree of component ``name`` at its own index ``n``."""
    return n


@dataclass
class CubicDecomposition:
    """Components indexed by their own subscript.

    ``P, Q, R, b1, c1, c2`` hold indices ``0..upto``; ``a1, a2, b2`` hold
    ``-1..upto-1`` (index ``-1`` is always zero).
    """

    upto: int
    P: dict = field(default_factory=dict)
    Q: dict = field(default_factory=dict)
    R: dict = field(default_factory=dict)
    a1: dict = field(default_factory=dict)
    a2: dict = field(default_factory=dict)
    b1: dict = field(default_factory=dict)
    b2: dict = field(default_factory=dict)
    c1: dict = field(default_factory=dict)
    c2: dict = field(default_factory=dict)

    def component(self, name: str) -> dict:
        if name not in PRINCIPAL + SECONDARY:
            raise KeyError(name)
        return getattr(self, name)

    def indices(self, name: str) -> range:
        if name in _LAGGED:
            return range(-1, self.upto)
        return range(self.upto + 1)

    def matrix(self, n: int) -> list:
        """The 3x3 array of components making up ``W_3n, W_3n+1, W_3n+2``."""
        return [
            [self.P[n], self.a1[n - 1], self.a2[n - 1]],
            [self.b1[n], self.Q[n], self.b2[n - 1]],
            [self.c1[n], self.c2[n], self.R[n]],
        ]

    def matrix_json(self, n: int) -> list:
        return [[p.to_json() for p in row] for row in self.matrix(n)]

    def to_json(self) -> dict:
        return {"upto": self.upto, "matrices": [self.matrix_json(n) for n in range(self.upto + 1)]}

    def check_bounds(self):
        for name in PRINCIPAL:
            comp = self.component(name)
            for n in self.indices(name):
                p = comp.get(n)
                if p is None or p.degree != n or not p.is_monic():
                    raise PreconditionError(f"{name}_{n} must be monic of degree {n}")
        for name in SECONDARY:
            comp = self.component(name)
            for n in self.indices(name):
                p = comp.get(n)
                if p is None:
                    raise PreconditionError(f"{name}_{n} is missing")
                if n < 0 and not p.is_zero():
                    raise PreconditionError(f"{name}_-1 must be zero")
                if p.degree > _bound(name, n):
                    raise PreconditionError(f"deg {name}_{n} exceeds {n}")


def decompose(W, upto: int) -> CubicDecomposition:
    """Split ``W_0..W_(3 upto + 2)`` into the nine components."""
    polys = W.polys(3 * upto + 2) if hasattr(W, "polys") else list(W)[:3 * upto + 3]
    if len(polys) < 3 * upto + 3:
        raise PreconditionError(f"need W_0..W_{3 * upto + 2}")
    d = CubicDecomposition(upto)
    zero = Polynomial.zero()
    d.a1[-1] = d.a2[-1] = d.b2[-1] = zero
    for n in range(upto + 1):
        r0, r1, r2 = split_by_residue(polys[3 * n], 3)
        d.P[n] = r0
        if n:
            d.a1[n - 1], d.a2[n - 1] = r1, r2
        r0, r1, r2 = split_by_residue(polys[3 * n + 1], 3)
        d.b1[n], d.Q[n] = r0, r1
        if n:
            d.b2[n - 1] = r2
        d.c1[n], d.c2[n], d.R[n] = split_by_residue(polys[3 * n + 2], 3)
    # the lagged components reach index upto-1 only through W_3upto and W_3upto+1
    return d


def recompose(d: CubicDecomposition, upto: int | None = None) -> list:
    """``W_0..W_(3 upto + 2)`` from the components; rejects bound violations."""
    upto = d.upto if upto is None else upto
    if upto > d.upto:
        raise PreconditionError(f"decomposition only reaches n = {d.upto}")
    d.check_bounds()
    out = []
    for n in range(upto + 1):
        for row in d.matrix(n):
            out.append(combine_residues(row))
    return out


def recompose_sequence(d: CubicDecomposition) -> MonicPolySequence:
    return MonicPolySequence.explicit(recompose(d), "transformed")


def principal_only(P: Polynomial, Q: Polynomial, R: Polynomial) -> Polynomial:
    """``P(x^3) + x Q(x^3) + x^2 R(x^3)``."""
    return combine_residues([P, Q, R])


# -- the nine coupling relations ------------------------------------------------


def _op_i3xd(c: int) -> DiffOperator:
    """``cI + 3xD``."""
    return DiffOperator.linear_xd(c, 3)


_3D = DiffOperator.d() * 3

# (label, operator, lhs component, lhs offset, factor(n), rhs component, rhs offset)
# the relation reads  op(lhs_(n+off)) = factor(n) * rhs_(n+off)
NINE_RELATIONS = (
    ("c1", _op_i3xd(1), "Q", 0, lambda n: 3 * n + 1, "P", 0),
    ("c2", _op_i3xd(2), "b2", -1, lambda n: 3 * n + 1, "a1", -1),
    ("c3", _3D, "b1", 0, lambda n: 3 * n + 1, "a2", -1),
    ("c4", _op_i3xd(1), "c2", 0, lambda n: 3 * n + 2, "b1", 0),
    ("c5", _op_i3xd(2), "R", 0, lambda n: 3 * n + 2, "Q", 0),
    ("c6", _3D, "c1", 0, lambda n: 3 * n + 2, "b2", -1),
    ("c7", _op_i3xd(1), "a1", 0, lambda n: 3 * n + 3, "c1", 0),
    ("c8", _op_i3xd(2), "a2", 0, lambda n: 3 * n + 3, "c2", 0),
    ("c9", _3D, "P", 1, lambda n: 3 * n + 3, "R", 0),
)


@dataclass(frozen=True)
class RelationResidual:
    relation: str
    n: int
    residual: Polynomial

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()

    def to_json(self) -> dict:
        return {"relation": self.relation, "n": self.n, "ok": self.ok,
                "residual": self.residual.to_json()}


def _max_n(d: CubicDecomposition, lhs: str, loff: int, rhs: str, roff: int) -> int:
    top = d.upto
    for name, off in ((lhs, loff), (rhs, roff)):
        top = min(top, d.indices(name)[-1] - off)
    return top


def verify_nine_relations(d: CubicDecomposition, upto: int | None = None) -> list:
    """Residuals ``op(lhs) - factor * rhs`` for each relation and each n it covers.

    For an Appell ``W`` every residual vanishes.
    """
    out = []
    for label, op, lhs, loff, factor, rhs, roff in NINE_RELATIONS:
        top = _max_n(d, lhs, loff, rhs, roff)
        if upto is not None:
            top = min(top, upto)
        L, Rc = d.component(lhs), d.component(rhs)
        for n in range(top + 1):
            res = op(L[n + loff]) - Rc[n + roff].scale(factor(n))
            out.append(RelationResidual(label, n, res))
    return out


# -- principal operators ---------------------------------------------------------------


def principal_operators() -> dict:
    """The three composite lowering operators, built by composition.

    ``O012 = D(I+3xD)(2I+3xD)``, ``O201 = (2I+3xD)D(I+3xD)``,
    ``O120 = (I+3xD)(2I+3xD)D``; returned as Dx-basis coefficients.
    """
    D, A, B = DiffOperator.d(), _op_i3xd(1), _op_i3xd(2)
    ops = {"O012": D * A * B, "O201": B * D * A, "O120": A * B * D}
    return {name: coeffs_from_operator(T) for name, T in ops.items()}


PRINCIPAL_EXPANSIONS = {
    "O012": LambdaCoeffs.of(2, 9, 9),
    "O201": LambdaCoeffs.of(-1, 0, 9),
    "O120": LambdaCoeffs.of(2, -9, 9),
}

# which principal sequence each operator lowers, with the closed form of rho_n
PRINCIPAL_RHO = {
    "R": ("O012", lambda n: (n + 1) * (3 * n + 4) * (3 * n + 5)),
    "Q": ("O201", lambda n: (n + 1) * (3 * n + 2) * (3 * n + 4)),
    "P": ("O120", lambda n: (n + 1) * (3 * n + 1) * (3 * n + 2)),
}

# secondary lowered relations, valid for n >= 1:
#   comp_(n-1) = norm(n)^-1 * op(comp_n)
SECONDARY_LOWERED = (
    ("a2", 0, "O012", lambda n: (n + 1) * (3 * n + 1) * (3 * n + 2)),
    ("b2", 0, "O012", lambda n: (n + 1) * (3 * n + 2) * (3 * n + 4)),
    ("a1", 0, "O201", lambda n: (n + 1) * (3 * n + 1) * (3 * n + 2)),
    ("c2", 0, "O201", lambda n: n * (3 * n + 1) * (3 * n + 2)),
    ("b1", 0, "O120", lambda n: n * (3 * n - 1) * (3 * n + 1)),
    ("c1", 0, "O120", lambda n: n * (3 * n + 1) * (3 * n + 2)),
)


@dataclass
class PrincipalReport:
    operators_match: bool
    lowering: dict
    rho_match: bool
    appell: dict
    secondary: dict
    order: int

    def __bool__(self):
        return (self.operators_match and self.rho_match and all(self.lowering.values())
                and all(self.appell.values()) and all(self.secondary.values()))

    def to_json(self) -> dict:
        return {"operators_match": self.operators_match, "lowering": self.lowering,
                "rho_match": self.rho_match, "appell": self.appell,
                "secondary": self.secondary, "verified_to_order": self.order}


def verify_principal_appell(d: CubicDecomposition, upto: int | None = None) -> PrincipalReport:
    """R, Q, P are Appell for O012, O201, O120, and the six secondary
    components satisfy their lowered relations."""
    upto = d.upto if upto is None else min(upto, d.upto)
    ops = principal_operators()
    match = all(ops[k] == v for k, v in PRINCIPAL_EXPANSIONS.items())
    lowering = {k: bool(is_lowering_operator(v)) for k, v in ops.items()}
    rho_ok = all(ops[name].rho(n) == rho(n)
                 for name, rho in PRINCIPAL_RHO.values() for n in range(51))
    appell = {}
    for comp, (name, _) in PRINCIPAL_RHO.items():
        seq = MonicPolySequence.explicit([d.component(comp)[n] for n in range(upto + 1)])
        appell[comp] = bool(is_lambda_appell(seq, ops[name], upto))
    secondary = {}
    for comp, off, name, norm in SECONDARY_LOWERED:
        T = ops[name].operator()
        seq = d.component(comp)
        ok = True
        for n in range(1, upto + 1):
            if n + off not in seq or n + off - 1 not in seq:
                break
            if T(seq[n + off]) != seq[n + off - 1].scale(norm(n)):
                ok = False
                break
        secondary[comp] = ok
    return PrincipalReport(match, lowering, rho_ok, appell, secondary, upto)


# -- secondary profile ----------------------------------------------------------------


def _lc(p: Polynomial) -> Fraction:
    return Fraction(0) if p.is_zero() else p.leading


def mu_closed_form(i: int, n: int, kappa: int, b) -> Fraction:
    """Closed forms of the leading coefficients of ``b2, a1, c1`` at ``n + kappa``."""
    b = Fraction(b)
    k = Fraction(kappa)
    t73, t53, t43 = k + Fraction(7, 3), k + Fraction(5, 3), Fraction(4, 3)
    f53 = Fraction(5, 3)
    if i == 1:
        return (pochhammer(t73, n) * pochhammer(t53, n) / (pochhammer(t43, n) * pochhammer(f53, n))
                * binomial(n + kappa + 1, n) * b)
    if n == 0:
        return 2 * b / (3 * kappa + 4) if i == 2 else 2 * b / ((3 * kappa + 3) * (3 * kappa + 4))
    if i == 2:
        return (pochhammer(t73, n - 1) * pochhammer(t53, n)
                / (pochhammer(t43, n) * pochhammer(f53, n - 1)) * binomial(n + kappa + 1, n) * b)
    if i == 3:
        return (pochhammer(t73, n - 1) * pochhammer(t53, n)
                / (pochhammer(t43, n - 1) * pochhammer(f53, n - 1))
                * binomial(n + kappa, n) * b / (kappa + 1))
    raise ValueError("i must be 1, 2 or 3")


def alpha_closed_form(i: int, n: int, tau: int, a) -> Fraction:
    """Closed forms of the leading coefficients of ``a2, c2, b1`` at ``n + tau``."""
    a = Fraction(a)
    t = Fraction(tau)
    t53, t43 = t + Fraction(5, 3), t + Fraction(4, 3)
    f43, f53 = Fraction(4, 3), Fraction(5, 3)
    if i == 1:
        return (pochhammer(t53, n) * pochhammer(t43, n) / (pochhammer(f43, n) * pochhammer(f53, n))
                * binomial(n + tau + 1, n) * a)
    if n == 0:
        return 2 * a / (3 * tau + 3) if i == 2 else 2 * a / ((3 * tau + 2) * (3 * tau + 3))
    if i == 2:
        return (pochhammer(t53, n) * pochhammer(t43, n)
                / (pochhammer(f43, n) * pochhammer(f53, n - 1))
                * binomial(n + tau, n) * a / (tau + 1))
    if i == 3:
        return (pochhammer(t53, n - 1) * pochhammer(t43, n)
                / (pochhammer(f43, n - 1) * pochhammer(f53, n - 1))
                * binomial(n + tau, n) * a / (tau + 1))
    raise ValueError("i must be 1, 2 or 3")


@dataclass
class FamilyProfile:
    """One of the two secondary families: ``(b2, a1, c1)`` or ``(a2, c2, b1)``."""

    names: tuple
    threshold: int | None          # kappa or tau; None when all zero to the computed order
    seed: Fraction | None          # b2_kappa or a2_tau
    measured: list                 # three lists of leading coefficients, n = 0..count-1
    closed: list
    hatted_monic: bool
    cascade: bool
    order: int

    @property
    def all_zero(self) -> bool:
        return self.threshold is None

    @property
    def closed_forms_match(self) -> bool:
        return self.measured == self.closed

    @property
    def nonzero(self) -> bool:
        return all(v != 0 for row in self.measured for v in row)

    def to_json(self) -> dict:
        if self.all_zero:
            return {"components": list(self.names), "threshold": "all-zero",
                    "verified_to_order": self.order}
        return {
            "components": list(self.names),
            "threshold": self.threshold,
            "threshold_zero": self.threshold == 0,
            "seed": format_rational(self.seed),
            "measured": [[format_rational(v) for v in row] for row in self.measured],
            "closed_forms_match": self.closed_forms_match,
            "hatted_monic": self.hatted_monic,
            "cascade": self.cascade,
            "verified_to_order": self.order,
        }


@dataclass
class SecondaryProfile:
    kappa_family: FamilyProfile
    tau_family: FamilyProfile
    linear_system: bool

    @property
    def kappa(self):
        return self.kappa_family.threshold

    @property
    def tau(self):
        return self.tau_family.threshold

    @property
    def mu(self) -> list:
        return self.kappa_family.measured

    @property
    def alpha(self) -> list:
        return self.tau_family.measured

    def __bool__(self):
        fams = (self.kappa_family, self.tau_family)
        return self.linear_system and all(
            f.all_zero or (f.closed_forms_match and f.hatted_monic and f.cascade and f.nonzero)
            for f in fams) and all(f.cascade for f in fams)

    def to_json(self) -> dict:
        return {"kappa": self.kappa_family.to_json(), "tau": self.tau_family.to_json(),
                "linear_system": self.linear_system, "ok": bool(self)}


def _zero_prefix(seq: dict, indices) -> bool:
    """Once a component is nonzero it stays nonzero."""
    seen = False
    for n in indices:
        if n < 0:
            continue
        if not seq[n].is_zero():
            seen = True
        elif seen:
            return False
    return True


def _family(d: CubicDecomposition, names: tuple, closed) -> FamilyProfile:
    first = d.component(names[0])
    top = d.upto - 1  # lagged components reach upto-1
    cascade = all(_zero_prefix(d.component(nm), range(0, top + 1)) for nm in names)
    threshold = next((n for n in range(top + 1) if not first[n].is_zero()), None)
    if threshold is None:
        return FamilyProfile(names, None, None, [], [], True, cascade, top)
    seed = first[threshold].leading
    count = top - threshold + 1
    measured = [[_lc(d.component(nm)[n + threshold]) for n in range(count)] for nm in names]
    expected = [[closed(i + 1, n, threshold, seed) for n in range(count)] for i in range(3)]
    hatted = True
    for nm in names:
        comp = d.component(nm)
        for n in range(count):
            p = comp[n + threshold]
            if p.is_zero() or p.degree != n or not p.monic().is_monic():
                hatted = False
    return FamilyProfile(names, threshold, seed, measured, expected, hatted, cascade, top)


def secondary_profile(d: CubicDecomposition) -> SecondaryProfile:
    """Thresholds, measured leading coefficients and their closed forms.

    ``kappa`` is the first index with ``b2 != 0`` and ``tau`` the first with
    ``a2 != 0``.  A threshold of 0 is reported as such (``threshold_zero``).
    """
    kf = _family(d, ("b2", "a1", "c1"), mu_closed_form)
    tf = _family(d, ("a2", "c2", "b1"), alpha_closed_form)
    ok = True
    if not kf.all_zero:
        k = kf.threshold
        m1, m2, m3 = kf.measured
        for n in range(len(m1)):
            ok &= (2 + 3 * n) * m1[n] == (3 * n + 3 * k + 4) * m2[n]
            ok &= (1 + 3 * n) * m2[n] == (3 * n + 3 * k + 3) * m3[n]
            if n + 1 < len(m1):
                ok &= 3 * (n + 1) * m3[n + 1] == (3 * n + 3 * k + 5) * m1[n]
    return SecondaryProfile(kf, tf, bool(ok))


def hatted(d: CubicDecomposition, name: str, threshold: int) -> list:
    """Monic normalizations ``comp_(n + threshold) / lc`` for the computed range."""
    comp = d.component(name)
    return [comp[n].monic() for n in range(threshold, d.upto) if not comp[n].is_zero()]


__all__ = [
    "CubicDecomposition",
    "FamilyProfile",
    "NINE_RELATIONS",
    "PRINCIPAL_EXPANSIONS",
    "PRINCIPAL_RHO",
    "PrincipalReport",
    "RelationResidual",
    "SECONDARY_LOWERED",
    "SecondaryProfile",
    "alpha_closed_form",
    "decompose",
    "hatted",
    "mu_closed_form",
    "principal_only",
    "principal_operators",
    "recompose",
    "recompose_sequence",
    "secondary_profile",
    "verify_nine_relations",
    "verify_principal_appell",
]
