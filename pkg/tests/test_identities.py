import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from aperyzeta.exceptions import ConjectureViolation
from aperyzeta.identities import (
    IDENTITIES,
    InversePairParams,
    RationalPolynomial,
    chu_sum,
    cnk,
    cnk_rows,
    dnk,
    finite_identity,
    fn_polynomials,
    identity_65,
    integral_corollary4,
    inverse_pair_apply,
    inverse_pair_invert,
    standard_inverse_pair,
    prop42_residual_check,
    prop43_certificate,
    prop43_sum,
    sigma_k,
    verify,
    verify_cnk_sum,
)
from aperyzeta.precision import central_binomial

X = RationalPolynomial.x()


def cnk_direct(n, k):
    num = math.prod(Fraction(j**4 + 4 * n**4, j**4) for j in range(1, k))
    den = math.prod(Fraction(j**4 - n**4, j**4) for j in range(1, k + 1) if j != n)
    return num / den


# polynomials -------------------------------------------------------------------

polys = st.lists(st.fractions(min_value=-100, max_value=100, max_denominator=50), max_size=6).map(RationalPolynomial)


@given(polys, polys.filter(lambda p: not p.is_zero()))
def test_polynomial_divmod(a, b):
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.degree < b.degree


@given(polys, st.fractions(max_denominator=20), st.integers(-5, 5))
def test_polynomial_shift(p, x, a):
    assert p.shift(a)(x) == p(x + a)


def test_polynomial_basics():
    p = 4 * X**2 - 1
    assert p.degree == 2 and p.is_even() and str(p) == "4*x^2 - 1"
    assert RationalPolynomial([1, 2, 0, 0]).degree == 1
    assert RationalPolynomial([]).degree == -1


# partial fractions -----------------------------------------------------------------

def test_cnk_examples():
    assert cnk(1, 1) == 1
    assert cnk(1, 2) == Fraction(16, 3)
    assert cnk(2, 2) == Fraction(-13, 3)
    with pytest.raises(ValueError):
        cnk(3, 2)


@given(st.integers(1, 25), st.integers(0, 10))
def test_cnk_matches_direct_product(n, extra):
    assert cnk(n, n + extra) == cnk_direct(n, n + extra)


def test_cnk_rows_consistent():
    for k, row in enumerate(cnk_rows(12), start=1):
        assert row == [cnk(n, k) for n in range(1, k + 1)]


def test_dnk():
    assert dnk(2, 3) == Fraction(5 * 8, 2 * 27) * cnk(2, 3)


@pytest.mark.parametrize("k", [1, 2, 50])
def test_cnk_sum_examples(k):
    assert verify_cnk_sum(k) == 1


def test_partial_fraction_decomposition_pointwise():
    # prod_{j<k} (1+4z/j^4)/(1-z/j^4) / (1-z/k^4) = sum_j c_j(k)/(1-z/j^4), z = z^4
    for k in (1, 3, 6):
        for w in (Fraction(1, 3), Fraction(-7, 2), Fraction(5, 9)):
            lhs = 1 / (1 - w / k**4)
            for j in range(1, k):
                lhs *= (1 + 4 * w / j**4) / (1 - w / j**4)
            rhs = sum(cnk(j, k) / (1 - w / j**4) for j in range(1, k + 1))
            assert lhs == rhs


# finite identities ------------------------------------------------------------------

def test_finite_identity_examples():
    assert finite_identity(1) == 1
    assert finite_identity(2) == 1


@pytest.mark.parametrize("n", list(range(1, 41)) + [100, 150])
def test_finite_identity_range(n):
    assert finite_identity(n) == 1


def test_chu_examples():
    assert chu_sum(1) == 2
    assert chu_sum(2) == 6
    assert chu_sum(100) == central_binomial(100)


@pytest.mark.parametrize("n", range(1, 31))
def test_chu_range(n):
    assert chu_sum(n) == central_binomial(n)


def test_prop43_examples():
    assert prop43_sum(1) == 1
    assert prop43_sum(2) == 1
    assert prop43_sum(200) == 1


@pytest.mark.parametrize("n", [1, 2, 5, 30])
def test_prop43_certificate(n):
    assert prop43_certificate(n)


def test_fn_examples():
    f = fn_polynomials(2)
    assert f[0] == RationalPolynomial([1])
    assert f[1] == 4 * X**2 - 1
    assert f[2] == 16 * X**4 + 4


@pytest.mark.parametrize("n", range(1, 13))
def test_fn_even_and_residual(n):
    f = fn_polynomials(n)
    assert all(p.is_even() and p.degree == 2 * k for k, p in enumerate(f))
    assert prop42_residual_check(n, f[-1])


def test_fn_recurrence_exact():
    f = fn_polynomials(6)
    for k in range(1, 7):
        assert (4 * X**4 + k**4) * f[k - 1] - (X**2 - k**2) * f[k] == sigma_k(k)


def test_fn_violation_reported(monkeypatch):
    import aperyzeta.identities as ident

    monkeypatch.setattr(ident, "sigma_k", lambda k: sigma_k(k) + (1 if k == 3 else 0))
    with pytest.raises(ConjectureViolation) as exc:
        ident.fn_polynomials(4)
    assert exc.value.index == 3


@pytest.mark.parametrize("n", [1, 2, 3, 10, 50])
def test_identity_65(n):
    lhs, rhs = identity_65(n)
    assert lhs == rhs
    if n == 1:
        assert lhs == 1


# inverse pairs ------------------------------------------------------------------------

def test_standard_inverse_pair_reproduces_both_sums():
    p = standard_inverse_pair()
    g = lambda n: Fraction(1, n * n)
    f = lambda k: Fraction(10 * k * k * central_binomial(k) * (-1) ** k)
    for n in range(1, 21):
        # the forward transform of g gives f, the summand weights of the binomial sum
        assert inverse_pair_apply(p, g, n) == f(n)
        assert inverse_pair_invert(p, f, n) == g(n)


def test_inverse_pair_zero():
    p = standard_inverse_pair()
    assert all(inverse_pair_apply(p, lambda k: Fraction(0), n) == 0 for n in range(1, 6))


@given(st.lists(st.fractions(max_denominator=30), min_size=8, max_size=8), st.integers(0, 10**6))
def test_inverse_pair_roundtrip(seq, seed):
    rng = random.Random(seed)
    a = [Fraction(rng.randint(1, 9)) for _ in range(12)]
    b = [Fraction(rng.randint(1, 9)) for _ in range(12)]
    # distinct nodes c_j keep every psi factor nonzero
    c, acc = [], 0
    for _ in range(12):
        acc += rng.randint(1, 3)
        c.append(Fraction(acc))
    d = [Fraction(1)] * 12
    p = InversePairParams(a.__getitem__, b.__getitem__, c.__getitem__, d.__getitem__, 1)
    g = lambda k: seq[k - 1]
    cache = {}

    def f(n):
        if n not in cache:
            cache[n] = inverse_pair_apply(p, g, n)
        return cache[n]

    for n in range(1, 9):
        assert inverse_pair_invert(p, f, n) == g(n)


# integral -------------------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 5])
def test_integral(n):
    v = integral_corollary4(n, 1e-20)
    assert abs(v.value - central_binomial(n)) < Fraction(1, 10**20)
    assert chu_sum(n) == central_binomial(n)


def test_integral_y_form():
    v = integral_corollary4(3, 1e-15, form="y")
    assert abs(v.value - 20) < Fraction(1, 10**15)


def test_integral_rejects_tiny_tol():
    with pytest.raises(ValueError):
        integral_corollary4(1, 1e-40)


# registry ----------------------------------------------------------------------------------

@pytest.mark.parametrize("name", IDENTITIES)
def test_verify_registry(name):
    r = verify(name, 4)
    assert r.passed and r.identity == name and r.seconds >= 0


def test_verify_unknown():
    with pytest.raises(ValueError):
        verify("nope", 1)
