from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from lambda_appell.exactmath import Polynomial
from lambda_appell.weyl import LambdaCoeffs, is_lowering_operator

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(max_num=9, max_den=5, nonzero=False):
    s = st.builds(Fraction, st.integers(-max_num, max_num), st.integers(1, max_den))
    return s.filter(lambda q: q != 0) if nonzero else s


def polynomials(max_degree=6, **kw):
    return st.lists(rationals(**kw), max_size=max_degree + 1).map(Polynomial)


def coeff_vectors(max_k=5):
    return st.lists(rationals(), min_size=1, max_size=max_k + 1).filter(
        lambda v: any(v)).map(lambda v: LambdaCoeffs(tuple(v)))


def lowering_coeffs(max_k=3):
    return coeff_vectors(max_k).filter(lambda a: bool(is_lowering_operator(a)))


def to_sympy(p: Polynomial, x):
    import sympy as sp
    return sum((sp.Rational(c.numerator, c.denominator) * x ** i for i, c in enumerate(p.coeffs)),
               sp.Integer(0))


def from_sympy(expr, x) -> Polynomial:
    import sympy as sp
    poly = sp.Poly(sp.expand(expr), x)
    return Polynomial([Fraction(int(sp.fraction(c)[0]), int(sp.fraction(c)[1]))
                       for c in reversed(poly.all_coeffs())])


@pytest.fixture
def x_sym():
    import sympy as sp
    return sp.Symbol("x")
