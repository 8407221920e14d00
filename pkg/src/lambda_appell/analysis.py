"""Orthogonal Lambda-Appell sequences for ``k <= 2``.

For ``Lambda = a0 D + a1 DxD + a2 (Dx)^2 D`` an orthogonal Lambda-Appell
sequence would force its first form ``u0`` to satisfy a chain of functional
equations built from the polynomials ``U, V, W1, W2`` (and ``T`` when
``a2 = 0``).  Eliminating ``u0'`` pairwise gives three polynomial identities.

* ``a2 != 0``: the identities force ``lambda0 = lambda1 = lambda2`` and
  ``beta0 = beta1 = beta2``, after which the x^3 coefficient of
  ``W1 V + 6 a2 x W2`` is ``-54 a2^2 lambda0 != 0``: no such sequence exists.
* ``a2 = 0, a1 != 0``: the constraints pin the recurrence data to an affine
  image of Laguerre with ``alpha = a0 / a1``.
* ``a1 = a2 = 0``: Hermite, up to an affine change of variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import sympy as sp

from .errors import PreconditionError
from .exactmath import Polynomial, as_rational, format_rational
from .functionals import (
    FunctionalEquation,
    MomentFunctional,
    dual_sequence,
    residual,
    solve_functional_equation,
)
from .sequences import (
    RecurrencePair,
    affine_transform,
    check_laguerre_parameter,
    from_recurrence,
    is_lambda_appell,
    is_orthogonal,
    laguerre,
    orthogonal_from_functional,
)
from .weyl import LambdaCoeffs, lambda_operator, require_lowering


def _as_k2(a) -> LambdaCoeffs:
    a = require_lowering(a)
    if a.k > 2:
        raise PreconditionError("the elimination chain is set up for k <= 2")
    return a


def _chain_polys(x, B1, B2, B3, lam, rho, a0, a1, a2, diff):
    """U, V, W1, W2, T; works for exact polynomials and for sympy expressions."""
    U = lam[1] * B2 - lam[0] * B1 * B1 + (a0 - a1 + a2)
    V = (lam[2] * B3 - lam[0] * B1 * B2 + rho[1] * B1 - 4 * a1 * x
         - diff(B2) * (lam[1] * B2 - lam[0] * B1 * B1 + rho[0]))
    W1 = -2 * (a1 - 3 * a2) * (a1 + 3 * a2) + 3 * a2 * ((3 * a0 - a1 - 3 * a2) - U)
    W2 = -(a1 + 3 * a2) * U + 3 * a2 * x * (-3 * lam[0] * B1 + diff(U))
    T = (2 * a0 - U) * U + 2 * a1 * x * (2 * lam[0] * B1 - diff(U))
    return U, V, W1, W2, T


def _identities(x, U, V, W1, W2, a1, a2, diff):
    """Left minus right of the three identities obtained by eliminating u0'."""
    e1 = V * V - x * (6 * a2 * x * (diff(V) - 2 * U) - 4 * a1 * V)
    e2 = W1 * V + 6 * a2 * x * W2
    e3 = V * W2 - x * (W1 * (2 * U - diff(V)) - 4 * a1 * W2)
    return e1, e2, e3


@dataclass
class EliminationState:
    """Exact data of one candidate: ``B_0..B_depth``, ``lambda_n = rho_n / gamma_(n+1)``
    and the polynomials of the chain."""

    a: LambdaCoeffs
    beta: list
    gamma: list          # gamma_1, gamma_2, ...
    lambdas: list        # lambda_0, lambda_1, ...
    polys: list          # B_0 .. B_depth
    U: Polynomial
    V: Polynomial
    W1: Polynomial
    W2: Polynomial
    T: Polynomial

    @property
    def B(self) -> list:
        return self.polys

    def to_json(self) -> dict:
        fr = lambda vs: [format_rational(v) for v in vs]
        return {
            "a": self.a.to_json(), "beta": fr(self.beta), "gamma": fr(self.gamma),
            "lambda": fr(self.lambdas),
            "U": self.U.to_json(), "V": self.V.to_json(), "W1": self.W1.to_json(),
            "W2": self.W2.to_json(), "T": self.T.to_json(),
        }


def build_elimination_state(a, r, depth: int = 3) -> EliminationState:
    """Chain polynomials for the candidate recurrence ``r`` (a RecurrencePair or
    ``(betas, gammas)`` with at least ``depth`` entries each)."""
    a = _as_k2(a)
    if depth < 3:
        raise ValueError("depth must be at least 3")
    if not isinstance(r, RecurrencePair):
        r = RecurrencePair(*r)
    beta = [r.beta_at(n) for n in range(depth)]
    gamma = [r.gamma_at(n) for n in range(1, depth + 1)]
    if any(g == 0 for g in gamma):
        raise PreconditionError("gamma values must be nonzero")
    lambdas = [a.rho(n) / gamma[n] for n in range(depth)]
    x = Polynomial.x()
    polys = [Polynomial.one(), x - beta[0]]
    for n in range(1, depth):
        polys.append((x - beta[n]) * polys[n] - polys[n - 1].scale(gamma[n - 1]))
    a0, a1, a2 = (a.coeff(i) for i in range(3))
    U, V, W1, W2, T = _chain_polys(x, polys[1], polys[2], polys[3], lambdas,
                                   [a.rho(0), a.rho(1)], a0, a1, a2, lambda p: p.derivative())
    return EliminationState(a, beta, gamma, lambdas, polys, U, V, W1, W2, T)


def polynomial_identities(st: EliminationState) -> tuple:
    """Residual polynomials of the three pairwise eliminations (zero for a true solution)."""
    a1, a2 = st.a.coeff(1), st.a.coeff(2)
    return _identities(Polynomial.x(), st.U, st.V, st.W1, st.W2, a1, a2, lambda p: p.derivative())


# -- functional equations on u0 -------------------------------------------------


def chain_equations(st: EliminationState) -> dict:
    """The functional equations on ``u0`` as :class:`FunctionalEquation` objects.

    ``third_order``:  tLambda(u0) = lambda0 B1 u0
    ``second_order``: -3a2 x^2 u0'' + 2(a1-3a2) x u0' = U u0
    ``first_v``:      -6a2 x^2 u0' = V u0
    ``first_uv``:     (4a1 x + V) u0' = (2U - V') u0
    ``first_w``:      x W1 u0' = W2 u0
    """
    a0, a1, a2 = (st.a.coeff(i) for i in range(3))
    x = Polynomial.x()
    x2 = Polynomial.monomial(2)
    l0, B1 = st.lambdas[0], st.polys[1]
    eqs = {
        "third_order": FunctionalEquation((
            (x2.scale(a2), 3), (x.scale(-(a1 - 3 * a2)), 2),
            (Polynomial.constant(a0 - a1 + a2), 1), (B1.scale(l0), 0))),
        "second_order": FunctionalEquation((
            (x2.scale(-3 * a2), 2), (x.scale(2 * (a1 - 3 * a2)), 1), (-st.U, 0))),
        "first_v": FunctionalEquation(((x2.scale(-6 * a2), 1), (-st.V, 0))),
        "first_uv": FunctionalEquation((
            (x.scale(4 * a1) + st.V, 1), (st.V.derivative() - 2 * st.U, 0))),
        "first_w": FunctionalEquation(((x * st.W1, 1), (-st.W2, 0))),
    }
    if a2 == 0:
        eqs["first_t"] = FunctionalEquation(((x.scale(2 * a1), 1), (-st.U, 0)))
    return eqs


def general_chain_equations(st: EliminationState, n: int) -> dict:
    """The two equations valid for every ``n`` (before and after eliminating ``u0''``)."""
    if n + 1 >= len(st.polys) or n >= len(st.lambdas):
        raise PreconditionError(f"state depth too small for n = {n}")
    a0, a1, a2 = (st.a.coeff(i) for i in range(3))
    x = Polynomial.x()
    x2 = Polynomial.monomial(2)
    Bn, B1 = st.polys[n], st.polys[1]
    d1, d2 = Bn.derivative(), Bn.derivative(2)
    lam_n, l0 = st.lambdas[n], st.lambdas[0]
    LBn = lambda_operator(st.a)(Bn)
    rho0 = st.a.rho(0)
    rhs_full = (st.polys[n + 1].scale(lam_n) - (x * d2 + d1).scale(2 * a1)
                - B1 * Bn * l0 + LBn)
    full = FunctionalEquation((
        (x2 * d1 * (-3 * a2), 2),
        (x * d1 * (2 * (a1 - 3 * a2)) - x2 * d2 * (3 * a2), 1),
        (-rhs_full, 0)))
    rhs_red = (st.polys[n + 1].scale(lam_n) - B1 * Bn * l0 + LBn - (x * d2).scale(2 * a1)
               - d1 * (st.polys[2].scale(st.lambdas[1]) - B1 * B1 * l0 + rho0))
    reduced = FunctionalEquation(((x2 * d2 * (-3 * a2), 1), (-rhs_red, 0)))
    return {"full": full, "reduced": reduced}


def functional_chain_residuals(st: EliminationState, u0: MomentFunctional, upto: int,
                               general_n: int | None = None) -> dict:
    """Moment residuals of every chain equation for the given ``u0``.

    All vanish when ``u0`` is the first form of an orthogonal Lambda-Appell
    sequence with the candidate's recurrence data.
    """
    out = {name: residual(eq, u0, upto) for name, eq in chain_equations(st).items()}
    top = len(st.polys) - 2 if general_n is None else general_n
    for n in range(top + 1):
        for kind, eq in general_chain_equations(st, n).items():
            out[f"{kind}_n{n}"] = residual(eq, u0, upto)
    return out


def chain_is_zero(res: dict) -> bool:
    return all(v == 0 for vec in res.values() for v in vec)


# -- the k = 2 elimination -------------------------------------------------------------

_X = sp.Symbol("x")
_BETA = sp.symbols("beta0 beta1 beta2")
_GAMMA = sp.symbols("gamma1 gamma2")
_LAMBDA = sp.symbols("lambda0 lambda1 lambda2")
_A = sp.symbols("a0 a1 a2")


_GENS = (_X,) + _BETA + _GAMMA + _LAMBDA


def _poly(e):
    return sp.Poly(e, *_GENS, domain="QQ")


def _symbolic_chain(a0, a1, a2, subs=None):
    """Chain polynomials and the three identities as sparse sympy polynomials.

    ``subs`` maps some of the beta/lambda symbols to linear expressions in the
    others; the chain is rebuilt from the substituted inputs, which is much
    cheaper than substituting into the expanded identities.
    """
    subs = subs or {}
    val = lambda s: _poly(subs.get(s, s))
    x = _poly(_X)
    b0, b1, b2 = (val(s) for s in _BETA)
    g1, g2 = (val(s) for s in _GAMMA)
    lam = [val(s) for s in _LAMBDA]
    B1 = x - b0
    B2 = (x - b1) * B1 - g1
    B3 = (x - b2) * B2 - g2 * B1
    rho = [(n + 1) * (a0 + a1 * (n + 1) + a2 * (n + 1) ** 2) for n in range(2)]
    diff = lambda e: e.diff(_X)
    U, V, W1, W2, T = _chain_polys(x, B1, B2, B3, lam, rho, a0, a1, a2, diff)
    ids = _identities(x, U, V, W1, W2, a1, a2, diff)
    return {"U": U, "V": V, "W1": W1, "W2": W2, "T": T}, ids


def _top(p):
    """Degree in x and factored coefficient of the highest power of x."""
    if p.is_zero:
        return None, sp.Integer(0)
    deg = p.degree(_X)
    coeff = sum((c * sp.Mul(*(g ** e for g, e in zip(_GENS[1:], m[1:])))
                 for m, c in p.terms() if m[0] == deg), sp.Integer(0))
    return deg, sp.factor(coeff)


def _x_coeff(p, k):
    return sp.factor(sum((c * sp.Mul(*(g ** e for g, e in zip(_GENS[1:], m[1:])))
                          for m, c in p.terms() if m[0] == k), sp.Integer(0)))


def _solve_factor(coeff, target, nonzero):
    """Solve ``coeff = 0`` for ``target`` after dropping factors known to be nonzero."""
    _, factors = sp.factor_list(coeff)
    live = []
    for base, _mult in factors:
        if target in base.free_symbols:
            live.append(base)
        elif not base.free_symbols <= set(nonzero):
            raise RuntimeError(f"factor {base} of {coeff} does not involve {target}")
    live = list(dict.fromkeys(live))
    if len(live) != 1:
        raise RuntimeError(f"unexpected factor structure in {coeff}")
    sol = sp.solve(live[0], target)
    if len(sol) != 1:
        raise RuntimeError(f"cannot solve {live[0]} for {target}")
    return live[0], sp.expand(sol[0])


@dataclass
class EliminationStep:
    label: str
    identity: str
    degree: int
    coefficient: str
    constraint: str
    substitution: str

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class NonexistenceCertificate:
    a: LambdaCoeffs
    steps: list
    final_identity: str
    final_degree: int | None
    x3_coefficient: str
    expected: str
    matches_closed_form: bool
    lambda0_nonzero: bool
    residual_polynomials: dict
    instances: list = field(default_factory=list)

    @property
    def contradiction(self) -> bool:
        return self.matches_closed_form and self.lambda0_nonzero and all(self.instances)

    def __bool__(self):
        return self.contradiction

    def to_json(self) -> dict:
        return {
            "a": self.a.to_json(),
            "constraints": [s.to_json() for s in self.steps],
            "final_identity": self.final_identity,
            "residual_polynomial": self.residual_polynomials[self.final_identity],
            "x3_coefficient": self.x3_coefficient,
            "residual": "-54*a2^2*lambda0",
            "residual_value": self.expected,
            "matches_closed_form": self.matches_closed_form,
            "instance_checks": self.instances,
            "contradiction": self.contradiction,
        }


def nonexistence_certificate(a, instances=((0, 1), (1, 2), (Fraction(-3, 2), Fraction(5, 7)))
                             ) -> NonexistenceCertificate:
    """Replay the k = 2 elimination symbolically in beta0..beta2, gamma1, gamma2 and
    lambda0..lambda2 for the numeric coefficients ``a``.

    Every step reads the top coefficient of one identity, drops factors that
    cannot vanish (``a2``, ``lambda0``), and solves the remaining linear factor.
    ``instances`` are ``(beta0, gamma1)`` pairs for an exact cross-check of the
    final coefficient with ``lambda_n = lambda0``, ``beta_n = beta0``.
    """
    a = _as_k2(a)
    a0, a1, a2 = (sp.Rational(a.coeff(i).numerator, a.coeff(i).denominator) for i in range(3))
    if a2 == 0:
        raise PreconditionError("a2 = 0: use the Laguerre characterization instead")
    l0, l1, l2 = _LAMBDA
    b0, b1, b2 = _BETA
    names = ("V^2 identity", "W1 V identity", "V W2 identity")
    nonzero = {l0}
    subs: dict = {}
    steps = []
    plan = (
        ("c1", "V^2 identity", l2),
        ("c2", "V W2 identity", l1),
        ("c3", "V^2 identity", b2),
        ("c4", "V^2 identity", b1),
    )
    for label, ident, target in plan:
        _, ids = _symbolic_chain(a0, a1, a2, subs)
        deg, coeff = _top(dict(zip(names, ids))[ident])
        factor, value = _solve_factor(coeff, target, nonzero)
        subs = {k: sp.expand(v.subs(target, value)) for k, v in subs.items()}
        subs[target] = value
        steps.append(EliminationStep(label, ident, deg, str(coeff), f"{factor} = 0",
                                     f"{target} = {value}"))
    _, ids = _symbolic_chain(a0, a1, a2, subs)
    final = dict(zip(names, ids))
    target_poly = final["W1 V identity"]
    x3 = _x_coeff(target_poly, 3)
    expected = sp.expand(-54 * a2 ** 2 * l0)
    ok = sp.expand(x3 - expected) == 0
    residuals = {k: str(p.as_expr()) for k, p in final.items()}

    checks = []
    for beta0, gamma1 in instances:
        beta0, gamma1 = as_rational(beta0), as_rational(gamma1)
        lam0 = a.rho(0) / gamma1
        r = RecurrencePair([beta0] * 3, [a.rho(n) / lam0 for n in range(3)])
        st = build_elimination_state(a, r)
        e = polynomial_identities(st)[1]
        checks.append(e[3] == -54 * a.coeff(2) ** 2 * lam0)
    return NonexistenceCertificate(
        a, steps, "W1 V identity", target_poly.degree(_X), str(x3), str(expected), ok,
        True, residuals, checks)


def leading_terms(st: EliminationState) -> dict:
    """Degree and leading coefficient of each identity residual for an exact candidate."""
    out = {}
    for name, p in zip(("V^2 identity", "W1 V identity", "V W2 identity"), polynomial_identities(st)):
        out[name] = (p.degree, p.leading if not p.is_zero() else Fraction(0))
    return out


# -- k = 1: Laguerre --------------------------------------------------------------------


def laguerre_forced_data(a, beta0) -> dict:
    """Recurrence data forced by ``V = T = 0`` for ``Lambda = a0 D + a1 DxD``."""
    a = require_lowering(a)
    if a.k != 1:
        raise PreconditionError("need a1 != 0 and a2 = 0")
    a0, a1 = a.coeff(0), a.coeff(1)
    beta0 = as_rational(beta0)
    if beta0 == 0:
        raise PreconditionError("beta0 = 0 would force a1 = 0")
    s = a0 + a1
    beta1 = (3 * a1 + a0) / s * beta0
    gamma1 = -beta0 * (beta0 - beta1) / 2
    beta2 = 2 * beta1 - beta0
    gamma2 = 2 * (a0 + 2 * a1) * gamma1 / s
    lam0, lam1 = a.rho(0) / gamma1, a.rho(1) / gamma2
    lam2 = 2 * lam1 - lam0
    gamma3 = a.rho(2) / lam2
    return {"beta": [beta0, beta1, beta2], "gamma": [gamma1, gamma2, gamma3],
            "lambda": [lam0, lam1, lam2]}


@dataclass
class LaguerreReport:
    a: LambdaCoeffs
    alpha: Fraction
    scale: Fraction
    forced: dict
    v_zero: bool
    t_zero: bool
    psi: Polynomial
    moments_match_recurrence: bool
    appell: bool
    orthogonal: bool
    matches_laguerre: bool
    functional_residual_zero: bool
    chain_residual_zero: bool
    order: int

    def __bool__(self):
        return all((self.v_zero, self.t_zero, self.moments_match_recurrence, self.appell,
                    self.orthogonal, self.matches_laguerre, self.functional_residual_zero,
                    self.chain_residual_zero))

    def to_json(self) -> dict:
        fr = lambda vs: [format_rational(v) for v in vs]
        return {
            "a": self.a.to_json(),
            "laguerre_alpha": format_rational(self.alpha),
            "affine_map": {"scale": format_rational(self.scale), "shift": "0"},
            "beta": fr(self.forced["beta"]),
            "gamma": fr(self.forced["gamma"]),
            "lambda": fr(self.forced["lambda"]),
            "psi": self.psi.to_json(),
            "V_zero": self.v_zero,
            "T_zero": self.t_zero,
            "moments_match_recurrence": self.moments_match_recurrence,
            "appell": self.appell,
            "orthogonal": self.orthogonal,
            "matches_laguerre": self.matches_laguerre,
            "functional_residual_zero": self.functional_residual_zero,
            "chain_residual_zero": self.chain_residual_zero,
            "verified_to_order": self.order,
            "ok": bool(self),
        }


def laguerre_characterization(a, beta0, order: int = 25) -> LaguerreReport:
    """Run the k = 1 pipeline: forced data, the Laguerre-type equation
    ``D(x u0) + Psi u0 = 0``, its orthogonal sequence, and the affine map back
    to monic Laguerre with ``alpha = a0 / a1``."""
    a = require_lowering(a)
    forced = laguerre_forced_data(a, beta0)
    a0, a1 = a.coeff(0), a.coeff(1)
    alpha = check_laguerre_parameter(a0 / a1)
    beta0 = forced["beta"][0]
    scale = beta0 * a1 / (a0 + a1)
    st = build_elimination_state(a, RecurrencePair(forced["beta"], forced["gamma"]))

    x = Polynomial.x()
    psi = Polynomial([-alpha - 1, (a0 + a1) / (beta0 * a1)])
    eq = FunctionalEquation.divergence_form(x, psi)
    N = 2 * order + 4
    u0 = solve_functional_equation(eq, [1], N)
    B, rec = orthogonal_from_functional(u0, order + 1)
    match = (rec.beta_at(0), rec.beta_at(1), rec.beta_at(2)) == tuple(forced["beta"]) and \
        (rec.gamma_at(1), rec.gamma_at(2), rec.gamma_at(3)) == tuple(forced["gamma"])

    appell = bool(is_lambda_appell(B, a, order))
    ortho = bool(is_orthogonal(B, order - 1))
    lag = laguerre(alpha)
    T = affine_transform(B, scale)
    same = all(T[n] == lag[n] for n in range(order + 1))

    # the dual form of the constructed sequence satisfies the same equations
    dual = dual_sequence(B.polys(order + 1), 1, order + 1)[0]
    check_to = order - 2
    func_ok = all(v == 0 for v in residual(eq, dual, check_to))
    chain = functional_chain_residuals(st, dual, check_to)
    return LaguerreReport(a, alpha, scale, forced, st.V.is_zero(), st.T.is_zero(), psi, match,
                          appell, ortho, same, func_ok, chain_is_zero(chain), order)


# -- k = 0: Hermite -------------------------------------------------------------------


@dataclass
class HermiteReport:
    a0: Fraction
    beta0: Fraction
    gamma1: Fraction
    beta: list
    gamma: list
    appell: bool
    orthogonal: bool
    affine_hermite: bool
    order: int

    def __bool__(self):
        return self.appell and self.orthogonal and self.affine_hermite

    def to_json(self) -> dict:
        return {"a0": format_rational(self.a0), "beta0": format_rational(self.beta0),
                "gamma1": format_rational(self.gamma1), "appell": self.appell,
                "orthogonal": self.orthogonal, "affine_hermite": self.affine_hermite,
                "verified_to_order": self.order}


def hermite_characterization(a0=1, beta0=0, gamma1=1, order: int = 25) -> HermiteReport:
    """``Lambda = a0 D``: solve ``a0 u0' + lambda0 B1 u0 = 0`` and check that the
    resulting orthogonal sequence has ``beta_n = beta0``, ``gamma_(n+1) = (n+1) gamma1``."""
    a = require_lowering(LambdaCoeffs((a0,)))
    a0, beta0, gamma1 = a.coeff(0), as_rational(beta0), as_rational(gamma1)
    if gamma1 == 0:
        raise PreconditionError("gamma1 must be nonzero")
    lam0 = a.rho(0) / gamma1
    B1 = Polynomial([-beta0, 1])
    eq = FunctionalEquation(((Polynomial.constant(a0), 1), (B1.scale(lam0), 0)))
    u0 = solve_functional_equation(eq, [1], 2 * order + 4)
    B, rec = orthogonal_from_functional(u0, order + 1)
    betas = [rec.beta_at(n) for n in range(order + 1)]
    gammas = [rec.gamma_at(n) for n in range(1, order + 1)]
    affine = all(b == beta0 for b in betas) and all(g == n * gamma1 for n, g in enumerate(gammas, 1))
    return HermiteReport(a0, beta0, gamma1, betas, gammas, bool(is_lambda_appell(B, a, order)),
                         bool(is_orthogonal(B, order - 1)), affine, order)


__all__ = [
    "EliminationState",
    "EliminationStep",
    "HermiteReport",
    "LaguerreReport",
    "NonexistenceCertificate",
    "build_elimination_state",
    "chain_equations",
    "chain_is_zero",
    "functional_chain_residuals",
    "general_chain_equations",
    "hermite_characterization",
    "laguerre_characterization",
    "laguerre_forced_data",
    "leading_terms",
    "nonexistence_certificate",
    "polynomial_identities",
]
