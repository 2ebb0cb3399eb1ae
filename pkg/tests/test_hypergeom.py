from fractions import Fraction

import mpmath
import pytest

from aperyzeta.exceptions import ConjectureViolation, NonConvergenceError, NonTerminatingError, PoleError
from aperyzeta.hypergeom import (
    HypergeometricSpec,
    ParameterPoleError,
    alpha_ratio,
    bareiss_solve,
    cor2_rhs,
    cor2_spec,
    cor3_spec,
    cor3_summand,
    direct_sum_63,
    eq61_spec,
    eq61_value,
    gf_6f5_spec,
    gf_termination_63,
    gosper_solve,
    pfq_numeric,
    pfq_terminating,
    reflected_term,
    reflection_corollary3,
    tnk,
)
from aperyzeta.identities import RationalPolynomial, finite_identity, identity_65
from aperyzeta.precision import GaussianRational, HPComplex
from aperyzeta.series import gf_lhs

I = GaussianRational(0, 1)


def mp_hyper(spec, dps=50):
    with mpmath.workdps(dps):
        conv = lambda g: mpmath.mpc(mpmath.mpf(g.re.numerator) / g.re.denominator, mpmath.mpf(g.im.numerator) / g.im.denominator)
        return mpmath.hyper([conv(a) for a in spec.numerator], [conv(b) for b in spec.denominator], conv(spec.argument))


# terminating series ------------------------------------------------------------------

def test_eq61_n1_parameters():
    spec = eq61_spec(1)
    assert spec.numerator == tuple(map(GaussianRational.coerce, (2, Fraction(3, 2), 2, 0))) + (1 + I, 1 - I)
    assert pfq_terminating(spec) == 1


@pytest.mark.parametrize("n", range(1, 51))
def test_eq61_exact(n):
    v = pfq_terminating(eq61_spec(n))
    assert v.im == 0
    assert v == eq61_value(n)


def test_eq61_n2_value():
    assert pfq_terminating(eq61_spec(2)) == Fraction(13, 4)


@pytest.mark.parametrize("n", [1, 2, 7, 20, 50])
def test_eq61_equals_closed_form(n):
    # the same number through the finite identity: value = (4n^4+1)/(5n^2), and
    # finite_identity(n) = 1 is the rescaled statement of the same sum
    assert pfq_terminating(eq61_spec(n)) == eq61_value(n)
    assert finite_identity(n) == 1


def test_terminating_rejects():
    with pytest.raises(NonTerminatingError):
        pfq_terminating(cor3_spec())
    with pytest.raises(ParameterPoleError):
        pfq_terminating(HypergeometricSpec((-3, 1), (-1,), 1))


def test_terminating_against_mpmath():
    spec = HypergeometricSpec((-6, Fraction(1, 3), 2 + I), (Fraction(5, 2), 1 - I), Fraction(-3, 7))
    v = complex(pfq_terminating(spec))
    assert abs(v - complex(mp_hyper(spec))) < 1e-12


def test_reduced_cancels():
    spec = cor2_spec(1).reduced()
    assert spec.p == 4 and spec.q == 3
    assert sorted(map(str, spec.numerator)) == sorted(map(str, cor3_spec().numerator))


# numeric series ------------------------------------------------------------------------

def test_cor3_numeric():
    v = pfq_numeric(cor3_spec(), 30)
    assert abs(v.re.value - Fraction(4, 5)) < Fraction(1, 10**30)
    assert abs(v.im.value) < Fraction(1, 10**30)


def test_cor2_n1_is_four_fifths():
    assert cor2_rhs(1) == Fraction(4, 5)
    v = pfq_numeric(cor2_spec(1), 30)
    assert abs(v.re.value - Fraction(4, 5)) < Fraction(1, 10**28)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cor2_numeric(n):
    d = 25
    v = pfq_numeric(cor2_spec(n), d)
    assert abs(v.re.value - cor2_rhs(n)) < Fraction(1, 10 ** (d - 2))
    assert v.re.err_bound < Fraction(1, 10**d)


def test_cor2_rhs_n3():
    expected = Fraction(2, 5) * 20 * Fraction(81 - 1, 324 + 1) * Fraction(81 - 16, 324 + 16)
    assert cor2_rhs(3) == expected


def test_numeric_against_mpmath():
    spec = HypergeometricSpec((Fraction(1, 2), 1 + I, 1 - I), (Fraction(3, 2), 2), Fraction(-1, 3))
    v = pfq_numeric(spec, 40)
    ref = mp_hyper(spec, 60)
    with mpmath.workdps(60):
        assert abs(mpmath.mpf(v.re.value.numerator) / v.re.value.denominator - ref.real) < mpmath.mpf(10) ** -38


def test_numeric_accepts_hpcomplex_parameters():
    a = HPComplex.coerce(GaussianRational(Fraction(1, 3), Fraction(1, 5)), 60)
    spec = HypergeometricSpec((a, 1), (2,), Fraction(1, 4))
    exact = pfq_numeric(HypergeometricSpec((GaussianRational(Fraction(1, 3), Fraction(1, 5)), 1), (2,), Fraction(1, 4)), 30)
    v = pfq_numeric(spec, 30)
    assert abs(v.re.value - exact.re.value) < Fraction(1, 10**28)
    assert abs(v.im.value - exact.im.value) < Fraction(1, 10**28)


def test_numeric_and_terminating_agree():
    v = pfq_numeric(eq61_spec(6), 30)
    assert abs(v.re.value - eq61_value(6)) < Fraction(1, 10**28)


def test_numeric_divergence():
    with pytest.raises(NonConvergenceError):
        pfq_numeric(HypergeometricSpec((1, 1), (2,), 2), 20, max_terms=2000)
    with pytest.raises(NonConvergenceError):
        pfq_numeric(HypergeometricSpec((1, 1, 1), (2,), Fraction(1, 2)), 20)


@pytest.mark.parametrize("z", [Fraction(1, 2), GaussianRational(Fraction(1, 3), Fraction(1, 4))])
def test_gf_6f5_form(z):
    d = 30
    v = pfq_numeric(gf_6f5_spec(z), d)
    z4 = GaussianRational.coerce(z) ** 4
    l = gf_lhs(z, d)
    lhs = GaussianRational(l.re.value, l.im.value) * Fraction(4, 5) * (1 - z4)
    assert abs(v.re.value - lhs.re) < Fraction(1, 10 ** (d - 3))
    assert abs(v.im.value - lhs.im) < Fraction(1, 10 ** (d - 3))


# reflected summand ------------------------------------------------------------------------

def test_tnk_examples():
    assert tnk(1, -1) == -1
    assert tnk(2, 1) == 0
    assert tnk(1, 1) == Fraction(5, 4)
    for n in range(1, 8):
        assert tnk(n, -1) == Fraction(-5, n * (1 + 4 * n**4))


def test_reflected_regimes():
    assert reflected_term(3, 5).regime == "series"
    assert reflected_term(3, 1).regime == "zero"
    assert reflected_term(3, -2).regime == "reflected"


def test_alpha_examples():
    assert alpha_ratio(1, 1) == Fraction(-9, 2) == tnk(1, 1) / tnk(1, 2)
    assert tnk(2, -3) == alpha_ratio(2, -3) * tnk(2, -2)
    with pytest.raises(PoleError):
        alpha_ratio(3, -1)
    k = 10**6
    assert abs(alpha_ratio(1, k) / -4 - 1) < Fraction(1, 10**5)


@pytest.mark.parametrize("n", range(1, 7))
def test_alpha_chain_consistency(n):
    for k in range(-10, 21):
        if k != -1:
            assert tnk(n, k) == alpha_ratio(n, k) * tnk(n, k + 1)


@pytest.mark.parametrize("n", range(1, 11))
def test_reflected_sum(n):
    assert sum(tnk(n, j) for j in range(-n, 0)) == Fraction(-1, n**3)


def test_series_tail_from_tnk_sums_to_inverse_cube():
    n = 2
    s = sum(tnk(n, k) for k in range(n, 120))
    assert abs(s - Fraction(1, n**3)) < Fraction(1, 10**60)


# Gosper -------------------------------------------------------------------------------------

def test_bareiss():
    assert bareiss_solve([[2, 1], [1, 3]], [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]
    assert bareiss_solve([[1, 1], [2, 2]], [1, 3]) is None
    assert bareiss_solve([[1], [2], [3]], [2, 4, 6]) == [2]


def test_gosper_n1():
    g = gosper_solve(1)
    assert g.s == RationalPolynomial([Fraction(1, 5)])
    assert g.T0() == tnk(1, -1) == -1


@pytest.mark.parametrize("n", range(1, 11))
def test_gosper_all_checks(n):
    g = gosper_solve(n)
    assert g.ok, g.checks
    assert g.s.degree <= 3 * n - 3
    assert g.s.shift(1) * g.q - g.r * g.s == g.p
    assert g.T0() == Fraction(-1, n**3)


def test_gosper_polynomials_shape():
    g = gosper_solve(3)
    k = RationalPolynomial.x()
    assert g.q == (k - 3) ** 2 + 9
    assert g.r == -2 * (k + 3) * (2 * k - 1)
    assert g.p(0) == 0 and g.p(1) == 0 and g.p(2) == 0


def test_gosper_failure_is_reported(monkeypatch):
    import aperyzeta.hypergeom as hg

    original = hg._gosper_polys

    def broken(n):
        p, q, r = original(n)
        return p + RationalPolynomial([0] * (3 * n + 1) + [1]), q, r

    monkeypatch.setattr(hg, "_gosper_polys", broken)
    with pytest.raises(ConjectureViolation):
        hg.gosper_solve(2)


# reflection for the n = 1 series ----------------------------------------------------------------

def test_reflection_corollary3():
    assert reflection_corollary3() == Fraction(4, 5)
    assert cor3_summand(-1) == 0
    assert cor3_summand(-3) == 0
    assert cor3_summand(-2) == Fraction(-4, 5)


def test_cor3_summand_matches_series_terms():
    spec = cor3_spec()
    term = GaussianRational(1)
    for k in range(8):
        assert term == cor3_summand(k)
        num = GaussianRational(1)
        for a in spec.numerator:
            num = num * (a + k)
        den = GaussianRational(k + 1)
        for b in spec.denominator:
            den = den * (b + k)
        term = term * num * spec.argument / den


# terminating specialisation -------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 5])
def test_gf_termination_63(n):
    closed, rhs = gf_termination_63(n, 30)
    lhs65, rhs65 = identity_65(n)
    assert rhs == lhs65
    assert abs(closed.value - rhs) < Fraction(1, 10**30)
    if n == 1:
        assert rhs == 1


def test_gf_termination_direct_sum():
    closed, _ = gf_termination_63(3, 20)
    assert abs(direct_sum_63(3) - float(closed)) < 1e-10


def test_gf_termination_digamma_form():
    n = 3
    with mpmath.workdps(40):
        w = (1 + 1j) / 2
        psi = lambda x: mpmath.digamma(x)
        val = (psi(1 - 1j * n * w) + psi(1 + 1j * n * w) - psi(1 + n * w) - psi(1 - n * w)) / (2j * n * n)
        closed, _ = gf_termination_63(n, 30)
        assert abs(val.real - mpmath.mpf(closed.value.numerator) / closed.value.denominator) < mpmath.mpf(10) ** -30
