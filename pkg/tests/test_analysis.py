from fractions import Fraction

import pytest
import sympy as sp

from lambda_appell.analysis import (
    build_elimination_state,
    chain_equations,
    chain_is_zero,
    functional_chain_residuals,
    hermite_characterization,
    laguerre_characterization,
    laguerre_forced_data,
    leading_terms,
    nonexistence_certificate,
    polynomial_identities,
)
from lambda_appell.errors import NotLoweringError, PreconditionError
from lambda_appell.exactmath import Polynomial
from lambda_appell.functionals import MomentFunctional, dual_sequence, residual
from lambda_appell.sequences import RecurrencePair, hermite, hermite_recurrence, laguerre, laguerre_recurrence
from lambda_appell.weyl import LambdaCoeffs


def test_lambda0_example():
    st = build_elimination_state((2, 9, 9), RecurrencePair([0, 0, 0], [1, 1, 1]))
    assert st.lambdas[0] == 20


def test_hermite_state_has_zero_v():
    st = build_elimination_state((1, 0, 0), hermite_recurrence())
    assert st.V.is_zero()
    assert st.lambdas == [1, 1, 1]


def test_symmetric_candidate_u_is_even():
    st = build_elimination_state((1, 2, 3), RecurrencePair([0, 0, 0], [2, 5, 7]))
    assert all(c == 0 for c in st.U.coeffs[1::2])


def test_state_rejects_bad_input():
    with pytest.raises(NotLoweringError):
        build_elimination_state((-2, 1), hermite_recurrence())
    with pytest.raises(PreconditionError):
        build_elimination_state((1, 1, 1, 1), hermite_recurrence())
    with pytest.raises(PreconditionError):
        build_elimination_state((1, 1, 1), RecurrencePair([0, 0, 0], [1, 0, 1]))


def test_generic_leading_coefficient_of_first_identity():
    a = LambdaCoeffs.of(2, 9, 9)
    r = RecurrencePair([1, Fraction(1, 2), 3], [2, 7, Fraction(5, 3)])
    st = build_elimination_state(a, r)
    l0, l1, l2 = st.lambdas
    deg, lead = leading_terms(st)["V^2 identity"]
    assert deg == 6 and lead == (l0 - 2 * l1 + l2) ** 2


def test_degenerate_candidate_leaves_x3_coefficient():
    a = LambdaCoeffs.of(1, -3, 7)
    lam0 = Fraction(3, 2)
    r = RecurrencePair([Fraction(2, 3)] * 3, [a.rho(n) / lam0 for n in range(3)])
    st = build_elimination_state(a, r)
    assert st.lambdas == [lam0] * 3
    e1, e2, e3 = polynomial_identities(st)
    assert e2[3] == -54 * 49 * lam0
    assert e1.degree <= 2 and e3.degree <= 3


def test_identities_against_sympy_recomputation():
    # recompute the three identities independently from the printed definitions
    x = sp.Symbol("x")
    a0, a1, a2 = 2, -1, 5
    beta = [1, 2, -1]
    gamma = [3, Fraction(1, 2), 4]
    st = build_elimination_state((a0, a1, a2), RecurrencePair(beta, gamma))
    R = lambda q: sp.Rational(q.numerator, q.denominator) if isinstance(q, Fraction) else sp.Integer(q)
    rho = lambda n: (n + 1) * (a0 + a1 * (n + 1) + a2 * (n + 1) ** 2)
    lam = [R(Fraction(rho(n)) / Fraction(gamma[n])) for n in range(3)]
    B1 = x - beta[0]
    B2 = (x - beta[1]) * B1 - R(gamma[0])
    B3 = (x - beta[2]) * B2 - R(gamma[1]) * B1
    U = lam[1] * B2 - lam[0] * B1 ** 2 + a0 - a1 + a2
    V = lam[2] * B3 - lam[0] * B1 * B2 + rho(1) * B1 - 4 * a1 * x - sp.diff(B2, x) * (
        lam[1] * B2 - lam[0] * B1 ** 2 + rho(0))
    W1 = -2 * (a1 - 3 * a2) * (a1 + 3 * a2) + 3 * a2 * (3 * a0 - a1 - 3 * a2 - U)
    W2 = -(a1 + 3 * a2) * U + 3 * a2 * x * (-3 * lam[0] * B1 + sp.diff(U, x))
    e2 = sp.expand(W1 * V + 6 * a2 * x * W2)
    got = polynomial_identities(st)[1]
    want = sp.Poly(e2, x).all_coeffs()[::-1]
    assert [sp.Rational(c.numerator, c.denominator) for c in got.coeffs] == want


@pytest.mark.parametrize("a", [(2, 9, 9), (0, 0, 1), (-1, 0, 9), (1, -3, 7), (Fraction(1, 2), 5, -2)])
def test_certificates(a):
    cert = nonexistence_certificate(a)
    assert cert
    a2 = LambdaCoeffs(tuple(a)).coeff(2)
    assert cert.x3_coefficient == str(sp.expand(-54 * sp.Rational(a2.numerator, a2.denominator) ** 2
                                                * sp.Symbol("lambda0")))
    labels = [s.substitution for s in cert.steps]
    assert labels[0] == "lambda2 = -lambda0 + 2*lambda1"
    assert labels[1] == "lambda1 = lambda0"
    assert labels[2] == "beta2 = -beta0 + 2*beta1"
    assert labels[3] == "beta1 = beta0"
    doc = cert.to_json()
    assert doc["residual"] == "-54*a2^2*lambda0"


def test_certificate_needs_a2():
    with pytest.raises(PreconditionError):
        nonexistence_certificate((1, 1))


def test_laguerre_forced_data_example():
    data = laguerre_forced_data((0, 1), 3)
    assert data["beta"][:2] == [3, 9]
    assert data["gamma"][0] == 9
    assert data["beta"][2] == 2 * 9 - 3
    assert data["lambda"][2] == 2 * data["lambda"][1] - data["lambda"][0]


@pytest.mark.parametrize("a, beta0", [((0, 1), 3), ((Fraction(1, 2), 1), 1), ((3, 2), -5),
                                      ((Fraction(-1, 2), 1), Fraction(2, 7))])
def test_laguerre_characterization(a, beta0):
    rep = laguerre_characterization(a, beta0, order=12)
    assert rep, rep.to_json()
    assert rep.alpha == Fraction(a[0]) / a[1]


def test_laguerre_rejections():
    with pytest.raises(NotLoweringError):
        laguerre_characterization((-2, 1), 1)
    with pytest.raises(PreconditionError):
        laguerre_characterization((1, 1), 0)
    with pytest.raises(PreconditionError):
        laguerre_forced_data((1, 1, 1), 1)


def test_laguerre_chain_residuals_vanish():
    alpha = Fraction(1, 3)
    a = LambdaCoeffs.of(alpha, 1)
    st = build_elimination_state(a, laguerre_recurrence(alpha), depth=6)
    u0 = dual_sequence(laguerre(alpha), 1, 30)[0]
    res = functional_chain_residuals(st, u0, 20)
    assert chain_is_zero(res)
    assert "full_n4" in res and "reduced_n4" in res


def test_hermite_chain_residuals_vanish():
    st = build_elimination_state((1,), hermite_recurrence(), depth=5)
    u0 = dual_sequence(hermite(), 1, 30)[0]
    assert chain_is_zero(functional_chain_residuals(st, u0, 20))


def test_random_form_fails_chain():
    st = build_elimination_state((1, 2, 3), RecurrencePair([0, 1, 2], [1, 2, 3]))
    u = MomentFunctional(tuple(Fraction(n + 1, n + 2) for n in range(30)))
    assert not chain_is_zero(functional_chain_residuals(st, u, 20))


def test_third_order_equation_matches_transpose():
    # tLambda(u0) = lambda0 B1 u0 for the Laguerre form and a = (alpha, 1)
    alpha = Fraction(2)
    st = build_elimination_state((alpha, 1), laguerre_recurrence(alpha))
    u0 = dual_sequence(laguerre(alpha), 1, 20)[0]
    assert all(v == 0 for v in residual(chain_equations(st)["third_order"], u0, 15))


@pytest.mark.parametrize("a0, beta0, gamma1", [(1, 0, 1), (2, 1, 3), (Fraction(1, 2), -1, Fraction(2, 5))])
def test_hermite_characterization(a0, beta0, gamma1):
    rep = hermite_characterization(a0, beta0, gamma1, order=15)
    assert rep and rep.affine_hermite
