"""Acceptance criteria, one test (and one printed PASS/FAIL line) each."""

import random
import time
from fractions import Fraction

import pytest

from lambda_appell.analysis import laguerre_characterization, nonexistence_certificate
from lambda_appell.cubic import (
    decompose,
    principal_operators,
    recompose,
    secondary_profile,
    verify_nine_relations,
    verify_principal_appell,
)
from lambda_appell.exactmath import Polynomial
from lambda_appell.functionals import (
    MomentFunctional,
    apply_transpose,
    lambda_product_rules_hold,
    pair,
)
from lambda_appell.sequences import (
    build_lambda_appell,
    dual_appell_check,
    hermite,
    is_lambda_appell,
    is_orthogonal,
    laguerre,
    translated_monomials,
)
from lambda_appell.weyl import (
    DiffOperator,
    LambdaCoeffs,
    coeffs_from_xd_powers,
    dx_power_d,
    is_lowering_operator,
    lambda_operator,
    xd_from_dx,
)


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def rand_q(rng, lo=-9, hi=9, den=6, nonzero=False):
    while True:
        q = Fraction(rng.randint(lo, hi), rng.randint(1, den))
        if q or not nonzero:
            return q


def rand_lowering(rng, k, need_top=True):
    while True:
        a = LambdaCoeffs(tuple(rand_q(rng) for _ in range(k)) + (rand_q(rng, nonzero=need_top),))
        if not a.is_zero() and is_lowering_operator(a):
            return a


def test_criterion_1_stirling_conversions(capsys):
    rng = random.Random(20261015)
    powers = [dx_power_d(i) for i in range(6)]
    checked = 0
    ok = True
    for trial in range(200):
        k = trial % 6
        a = LambdaCoeffs(tuple(rand_q(rng) for _ in range(k)) + (rand_q(rng, nonzero=True),))
        composed = DiffOperator()
        for i, c in enumerate(a.a):
            composed = composed + powers[i] * c
        converted = lambda_operator(a)
        for n in range(16):
            xn = Polynomial.monomial(n)
            ok &= composed(xn) == converted(xn)
            checked += 1
        ok &= coeffs_from_xd_powers(xd_from_dx(a)) == a
    report(capsys, 1, ok, f"200 vectors, k <= 5, {checked} monomial actions, exact round trip")


def test_criterion_2_principal_operators(capsys):
    ops = principal_operators()
    ok = (ops["O012"] == LambdaCoeffs.of(2, 9, 9) and ops["O201"] == LambdaCoeffs.of(-1, 0, 9)
          and ops["O120"] == LambdaCoeffs.of(2, -9, 9))
    for n in range(51):
        m = n + 1
        ok &= ops["O012"].symbol(m) == (3 * n + 4) * (3 * n + 5)
        ok &= ops["O201"].symbol(m) == (3 * n + 2) * (3 * n + 4)
        ok &= ops["O120"].symbol(m) == (3 * n + 1) * (3 * n + 2)
    ok &= all(bool(is_lowering_operator(a)) for a in ops.values())
    report(capsys, 2, ok, "expansions (2,9,9), (-1,0,9), (2,-9,9); rho factorizations n <= 50")


def test_criterion_3_cubic_decomposition(capsys):
    W = translated_monomials(1)
    d = decompose(W, 15)  # W_0 .. W_47
    parts = {}
    parts["round trip"] = recompose(d) == W.polys(47)
    res = verify_nine_relations(d)
    parts["nine relations"] = all(r.ok for r in res)
    parts["principal"] = bool(verify_principal_appell(d))
    prof = secondary_profile(d)
    kf, tf = prof.kappa_family, prof.tau_family
    parts["mu/alpha closed forms"] = (kf.closed_forms_match and tf.closed_forms_match
                                      and len(kf.measured[0]) == 15 and len(tf.measured[0]) == 15)
    parts["linear system"] = prof.linear_system
    ok = all(parts.values())
    report(capsys, 3, ok, f"(x+1)^n to n = 47, {len(res)} relation residuals, "
           f"kappa = {prof.kappa}, tau = {prof.tau}, n <= 14: " +
           ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in parts.items()))


def test_criterion_4_nonexistence(capsys):
    rng = random.Random(4)
    triples = [LambdaCoeffs.of(2, 9, 9), LambdaCoeffs.of(0, 0, 1), LambdaCoeffs.of(-1, 0, 9),
               LambdaCoeffs.of(2, -9, 9)]
    while len(triples) < 30:
        a = rand_lowering(rng, 2)
        if a.k == 2 and a not in triples:
            triples.append(a)
    start = time.perf_counter()
    ok = True
    for a in triples:
        cert = nonexistence_certificate(a)
        subs = [s.substitution for s in cert.steps]
        ok &= subs[1] == "lambda1 = lambda0" and subs[0] == "lambda2 = -lambda0 + 2*lambda1"
        ok &= subs[3] == "beta1 = beta0" and subs[2] == "beta2 = -beta0 + 2*beta1"
        ok &= bool(cert)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    report(capsys, 4, ok, f"{len(triples)} triples, x^3 coefficient -54 a2^2 lambda0 each, "
           f"{elapsed:.1f}s")


def test_criterion_5_laguerre(capsys):
    pairs = [(0, 1), (Fraction(1, 2), 1), (3, 2), (Fraction(-1, 2), 1), (5, 1), (1, 3),
             (Fraction(-2, 3), 1), (7, -2), (Fraction(9, 4), Fraction(3, 2)), (2, 5), (-3, 2)]
    betas = [3, Fraction(-5, 2), Fraction(1, 7)]
    ok = True
    count = 0
    for a in pairs:
        for b in betas:
            rep = laguerre_characterization(a, b, order=25)
            ok &= bool(rep) and rep.alpha == Fraction(a[0]) / Fraction(a[1])
            count += 1
    report(capsys, 5, ok, f"{len(pairs)} pairs x {len(betas)} beta0 = {count} runs, order 25")


def test_criterion_6_classical(capsys):
    parts = {
        "Hermite appell a=(1) to 40": bool(is_lambda_appell(hermite(), (1,), 40)),
        "Hermite orthogonal to 40": bool(is_orthogonal(hermite(), 40)),
        "Laguerre(0) appell a=(0,1) to 30": bool(is_lambda_appell(laguerre(0), (0, 1), 30)),
    }
    report(capsys, 6, all(parts.values()),
           ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in parts.items()))


def test_criterion_7_functional_layer(capsys):
    rng = random.Random(7)
    ok_adj = True
    for _ in range(500):
        a = LambdaCoeffs(tuple(rand_q(rng) for _ in range(rng.randint(0, 3))) + (rand_q(rng, nonzero=True),))
        N = 20
        u = MomentFunctional(tuple(rand_q(rng) for _ in range(N + 1)))
        p = Polynomial([rand_q(rng) for _ in range(rng.randint(0, N - a.k))])
        L = lambda_operator(a)
        ok_adj &= pair(apply_transpose(L, u), p) == pair(u, L(p))

    ok_dual = True
    for _ in range(20):
        a = rand_lowering(rng, rng.randint(0, 2))
        B = build_lambda_appell(a, [0] + [rand_q(rng) for _ in range(30)])
        rep = dual_appell_check(B, a, 10, 24)
        ok_dual &= rep.lowering_relation and rep.power_formula

    ok_prod = True
    for _ in range(200):
        a = LambdaCoeffs((rand_q(rng), rand_q(rng), rand_q(rng, nonzero=True)))
        f = Polynomial([rand_q(rng) for _ in range(rng.randint(1, 5))])
        p = Polynomial([rand_q(rng) for _ in range(rng.randint(1, 7))])
        u = MomentFunctional(tuple(rand_q(rng) for _ in range(25)))
        ok_prod &= lambda_product_rules_hold(a, f, p, u)
    report(capsys, 7, ok_adj and ok_dual and ok_prod,
           f"adjunction 500 {'ok' if ok_adj else 'FAILED'}, dual relations 20 sequences "
           f"{'ok' if ok_dual else 'FAILED'}, product rules 200 {'ok' if ok_prod else 'FAILED'}")
