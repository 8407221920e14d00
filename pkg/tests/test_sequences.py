from fractions import Fraction
from math import factorial

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from lambda_appell.errors import BoundsError, NotLoweringError, PreconditionError, TruncationError
from lambda_appell.exactmath import Polynomial, binomial
from lambda_appell.functionals import MomentFunctional, dual_sequence, pair
from lambda_appell.sequences import (
    MonicPolySequence,
    RecurrencePair,
    affine_transform,
    build_lambda_appell,
    degree_structure,
    dual_appell_check,
    expand_in_basis,
    from_recurrence,
    hermite,
    is_lambda_appell,
    is_orthogonal,
    laguerre,
    lowered_sequence,
    monomials,
    orthogonal_from_functional,
    parse_sequence,
    recurrence_of,
    structure_coefficients,
    translated_monomials,
)
from lambda_appell.weyl import LambdaCoeffs, lambda_operator

from conftest import from_sympy, lowering_coeffs, rationals

X = sp.Symbol("x")


def test_hermite_matches_sympy():
    H = hermite()
    for n in range(15):
        assert H[n] == from_sympy(sp.hermite_prob(n, X), X)
    assert H[2] == Polynomial([-1, 0, 1])


@pytest.mark.parametrize("alpha", [0, Fraction(1, 2), Fraction(-2, 3)])
def test_laguerre_matches_sympy(alpha):
    L = laguerre(alpha)
    al = sp.Rational(Fraction(alpha).numerator, Fraction(alpha).denominator)
    for n in range(12):
        want = (-1) ** n * factorial(n) * sp.assoc_laguerre(n, al, X)
        assert L[n] == from_sympy(want, X)
        assert L[n](0) == (-1) ** n * sp.rf(al + 1, n)


def test_laguerre_rejects_negative_integer():
    with pytest.raises(PreconditionError):
        laguerre(-2)


def test_sequence_validation_and_bounds():
    seq = MonicPolySequence.explicit([[1], [0, 1]])
    assert seq[1] == Polynomial.x()
    with pytest.raises(BoundsError):
        seq[2]
    bad = MonicPolySequence.explicit([[1], [0, 2]])
    with pytest.raises(PreconditionError):
        bad[1]


def test_zero_gamma_rejected():
    seq = from_recurrence(RecurrencePair([0, 0, 0], [1, 0, 1]))
    seq[2]
    with pytest.raises(PreconditionError):
        seq[3]


def test_recurrence_data_is_recovered():
    rec = recurrence_of(laguerre(Fraction(1, 2)), 8)
    for n in range(8):
        assert rec.beta_at(n) == 2 * n + Fraction(3, 2)
        assert rec.gamma_at(n + 1) == (n + 1) * (n + Fraction(3, 2))


def test_structure_coefficients_reconstruct():
    B = translated_monomials(2)
    sc = structure_coefficients(B, 6)
    assert sc.reconstruct(B[0], B[1], 8) == B.polys(7)


def test_orthogonality_witness_for_non_orthogonal():
    v = is_orthogonal(translated_monomials(1), 10)
    assert not v
    n, nu, val = v.witness
    assert val == 0 and n == nu == 0  # x(x+1) = (x+1)^2 - (x+1): gamma_1 = 0


def test_orthogonality_offdiagonal_witness():
    # x B_(n+1) = B_(n+2) + B_n + B_(n-1): a four-term recurrence
    def step(n, prev):
        if n < 2:
            return Polynomial.monomial(n)
        out = Polynomial.x() * prev[n - 1] - prev[n - 2]
        return out - prev[n - 3] if n >= 3 else out

    v = is_orthogonal(MonicPolySequence(step), 6)
    assert not v
    assert v.witness == (1, 0, 1)


def test_classical_appell_properties():
    assert is_lambda_appell(hermite(), (1,), 40)
    assert is_orthogonal(hermite(), 40)
    assert is_lambda_appell(laguerre(0), (0, 1), 30)
    assert is_lambda_appell(laguerre(Fraction(2, 5)), (Fraction(2, 5), 1), 20)


def test_hermite_not_dxd_appell():
    v = is_lambda_appell(hermite(), (0, 1), 10)
    assert not v and v.witness == 2


def test_appell_requires_lowering():
    with pytest.raises(NotLoweringError):
        is_lambda_appell(hermite(), (-2, 1), 3)


@given(lowering_coeffs(3), st.lists(rationals(), max_size=6))
def test_built_sequences_are_appell(a, consts):
    B = build_lambda_appell(a, [0] + consts)
    assert is_lambda_appell(B, a, 10)
    for n, c in enumerate(consts, 1):
        assert B[n](0) == c


def test_translated_monomials():
    B = translated_monomials(Fraction(1, 2))
    for n in range(8):
        assert B[n] == Polynomial([Fraction(1, 2), 1]) ** n


@given(lowering_coeffs(2), st.lists(rationals(), max_size=4))
def test_lowered_sequence_of_appell_is_itself(a, consts):
    B = build_lambda_appell(a, [0] + consts)
    assert lowered_sequence(B, a).polys(6) == B.polys(6)


@given(lowering_coeffs(2), st.lists(rationals(), max_size=5))
def test_dual_sequence_relations(a, consts):
    B = build_lambda_appell(a, [0] + consts)
    rep = dual_appell_check(B, a, 8, 20)
    assert rep.lowering_relation and rep.power_formula


def test_dual_check_detects_non_appell():
    rep = dual_appell_check(hermite(), (0, 1), 4, 12)
    assert not rep.lowering_relation and rep.first_failure is not None


def test_affine_transform_recurrence():
    B = laguerre(1)
    T = affine_transform(B, 3, 2)
    for n in range(8):
        assert T[n] == B[n].affine(3, 2).scale(Fraction(1, 3 ** n))
    rec = recurrence_of(T, 5)
    # beta_n -> (beta_n - 2) / 3, gamma_n -> gamma_n / 9
    for n in range(5):
        assert rec.beta_at(n) == Fraction(2 * n, 3)
        assert rec.gamma_at(n + 1) == Fraction((n + 1) * (n + 2), 9)


def test_stieltjes_recovers_hermite():
    moments = [0 if n % 2 else sp.factorial2(n - 1) for n in range(30)]
    u = MomentFunctional(tuple(int(m) for m in moments))
    B, rec = orthogonal_from_functional(u, 12)
    assert B.polys(12) == hermite().polys(12)
    assert [rec.gamma_at(n) for n in range(1, 12)] == list(range(1, 12))


def test_stieltjes_truncation_and_singular():
    with pytest.raises(TruncationError):
        orthogonal_from_functional(MomentFunctional((1, 0, 1)), 5)
    with pytest.raises(PreconditionError):
        orthogonal_from_functional(MomentFunctional((1, 1, 1, 1, 1, 1)), 2)


def test_expand_in_basis():
    B = hermite()
    c = expand_in_basis(Polynomial.monomial(4), B.polys(4))
    assert c == [3, 0, 6, 0, 1]


def test_degree_structure_ladder():
    # x^n secondary-style ladder starting at index 2
    a = LambdaCoeffs.of(1)
    fs = [Polynomial.zero(), Polynomial.zero(), Polynomial.constant(5),
          Polynomial([0, 5]), Polynomial([0, 0, Fraction(5, 2)])]
    ds = degree_structure(fs, a)
    assert ds.n0 == 2 and ds.degrees[2:] == (0, 1, 2)
    assert degree_structure([Polynomial.zero()] * 3, a).all_zero
    with pytest.raises(PreconditionError):
        degree_structure([Polynomial.constant(1), Polynomial.zero()], a)


def test_degree_structure_with_rho():
    a = LambdaCoeffs.of(0, 1)
    B = laguerre(0)
    fs = B.polys(6)
    ds = degree_structure(fs, a, rho=a.rho)
    assert ds.n0 == 0 and ds.degrees == tuple(range(7))


def test_parse_sequence_descriptors():
    assert parse_sequence({"family": "hermite"})[3] == hermite()[3]
    assert parse_sequence({"family": "laguerre", "alpha": "1/2"})[2] == laguerre(Fraction(1, 2))[2]
    assert parse_sequence({"family": "translated", "shift": 1})[3] == Polynomial([1, 3, 3, 1])
    r = parse_sequence({"family": "recurrence", "beta": [0, 0, 0], "gamma": [1, 2]})
    assert r[3] == hermite()[3]
    with pytest.raises(BoundsError):
        r[4]
    e = parse_sequence({"family": "explicit", "polys": [["1"], ["2", "1"]]})
    assert e[1] == Polynomial([2, 1])
    assert parse_sequence({"family": "appell", "coeffs": [0, 1]})[3] == Polynomial.monomial(3)
    with pytest.raises(ValueError):
        parse_sequence({"family": "unknown"})


def test_concurrent_extension():
    from concurrent.futures import ThreadPoolExecutor
    B = laguerre(Fraction(1, 3))
    with ThreadPoolExecutor(4) as pool:
        results = list(pool.map(lambda n: B[n], [20, 5, 18, 20, 3, 19]))
    ref = laguerre(Fraction(1, 3))
    assert results == [ref[n] for n in [20, 5, 18, 20, 3, 19]]
