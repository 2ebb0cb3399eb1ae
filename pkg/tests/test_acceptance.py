"""Acceptance suite: one PASS/FAIL line per criterion, printed even under capture."""

import contextlib
import time
from fractions import Fraction
from math import comb

import mpmath
import pytest

from aperyzeta import hypergeom, identities, series
from aperyzeta.discover import discovery_basis, basis_values, integer_relation, negative_search_zeta5, rediscover_row
from aperyzeta.precision import GaussianRational, clear_caches, zeta_reference
from aperyzeta.series import LambdaSpec, TruncationPlan, lambda_sum
from aperyzeta.symfun import Partition


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(number, text):
        try:
            yield
        except BaseException:
            with capsys.disabled():
                print(f"\nFAIL criterion {number}: {text}")
            raise
        with capsys.disabled():
            print(f"\nPASS criterion {number}: {text}")

    return run


def _close(x, y, tol):
    return abs(Fraction(x) - Fraction(y)) < tol


def test_criterion_01_finite_identity(criterion):
    with criterion(1, "finite identity equals 1 exactly for 1 <= n <= 300"):
        bad = [n for n in range(1, 301) if identities.finite_identity(n) != 1]
        assert bad == []


def test_criterion_02_exact_sums(criterion):
    with criterion(2, "binomial sum, telescoping sum and c_j(k) column sums exact"):
        assert all(identities.chu_sum(n) == comb(2 * n, n) for n in range(1, 201))
        assert all(identities.prop43_sum(n) == 1 for n in range(1, 201))
        assert all(identities.verify_cnk_sum(k) == 1 for k in range(1, 101))


def test_criterion_03_fast_zeta_250(criterion):
    with criterion(3, "zeta(3), zeta(5), zeta(7) to 250 digits against the Euler-Maclaurin oracle"):
        d = 250
        tol = Fraction(1, 10**248)
        for target in (3, 5, 7):
            t0 = time.perf_counter()
            fast = series.zeta_fast(target, d)
            assert time.perf_counter() - t0 < 10
            ref = zeta_reference(target, d + 10)
            assert abs(fast.value - ref.value) < tol
            with mpmath.workdps(d + 10):
                assert _close(mpmath.nstr(mpmath.zeta(target), d + 5, strip_zeros=False), fast.value, tol)


GRID = [
    Fraction(0),
    Fraction(1, 10),
    Fraction(-7, 20),
    Fraction(1, 2),
    Fraction(7, 10),
    GaussianRational(Fraction(3, 10), Fraction(2, 5)),
    GaussianRational(0, Fraction(7, 10)),
    GaussianRational(Fraction(9, 20), Fraction(9, 20)),
    GaussianRational(Fraction(1, 5), Fraction(-3, 5)),
    GaussianRational(Fraction(-1, 2), Fraction(1, 4)),
    GaussianRational(Fraction(-3, 5), Fraction(-1, 5)),
]


def test_criterion_04_generating_functions(criterion):
    with criterion(4, "both generating functions agree to 1e-48 at d=50 on an 11-point grid, |z| <= 0.7"):
        d = 50
        tol = Fraction(1, 10**48)
        assert len(GRID) >= 10
        assert all(abs(complex(GaussianRational.coerce(z))) <= 0.7 for z in GRID)
        for z in GRID:
            for rhs, lhs in ((series.gf_rhs, series.gf_lhs), (series.koecher_gf_rhs, series.koecher_gf_lhs)):
                a, b = rhs(z, d), lhs(z, d)
                assert abs(a.re.value - b.re.value) < tol, (rhs.__name__, z)
                assert abs(a.im.value - b.im.value) < tol, (rhs.__name__, z)


def test_criterion_05_symmetric_and_square_formulas(criterion):
    with criterion(5, "symmetric-function formula for zeta(7,11,15) and the square-power formulas for zeta(3,5,7)"):
        d = 30
        tol = Fraction(1, 10**30)
        for n in (1, 2, 3):
            v = series.zeta4n3_via_corollary1(n, d)
            assert abs(v.value - zeta_reference(4 * n + 3, d + 10).value) < tol
        # the square-power formula at n = 0, 1, 2 against explicit lambda combinations
        d = 60
        lam = lambda m, *parts: lambda_sum(LambdaSpec(m, Partition(parts), 2), d).value
        explicit = {
            0: Fraction(5, 2) * lam(3),
            1: 2 * lam(5) - Fraction(5, 2) * lam(3, 1),
            2: 2 * lam(7) - 2 * lam(5, 1) + Fraction(5, 4) * (lam(3, 1, 1) - lam(3, 2)),
        }
        for n, value in explicit.items():
            k = series.koecher_zeta(n, d).value
            assert abs(k - value) < Fraction(1, 10**58)
            assert abs(k - zeta_reference(2 * n + 3, d + 10).value) < Fraction(1, 10**58)


def test_criterion_06_strange_evaluations(criterion):
    with criterion(6, "terminating 6F5 exact for n <= 50, 4/5 series to 30 digits, product formula for n <= 5 to 25 digits"):
        for n in range(1, 51):
            v = hypergeom.pfq_terminating(hypergeom.eq61_spec(n))
            assert v == GaussianRational(Fraction(4 * n**4 + 1, 5 * n**2))
        c3 = hypergeom.pfq_numeric(hypergeom.cor3_spec(), 30)
        assert abs(c3.re.value - Fraction(4, 5)) < Fraction(1, 10**30)
        assert abs(c3.im.value) < Fraction(1, 10**30)
        for n in range(1, 6):
            v = hypergeom.pfq_numeric(hypergeom.cor2_spec(n), 25)
            rhs = hypergeom.cor2_rhs(n)
            assert abs(v.re.value - rhs) < Fraction(1, 10**25)
            assert abs(v.im.value) < Fraction(1, 10**25)
            with mpmath.workdps(40):
                spec = hypergeom.cor2_spec(n)
                conv = lambda a: mpmath.mpc(float(a.re), float(a.im)) if isinstance(a, GaussianRational) else mpmath.mpf(a)
                m = mpmath.hyper([conv(a) for a in spec.numerator], [conv(b) for b in spec.denominator], -0.25)
                assert abs(m - mpmath.mpf(rhs.numerator) / rhs.denominator) < 1e-14


def test_criterion_07_gosper(criterion):
    with criterion(7, "Gosper polynomial of degree <= 3n-3 and reflected sum -1/n^3 for n <= 10"):
        for n in range(1, 11):
            system = hypergeom.gosper_solve(n)
            s, p, q, r = system.s, system.p, system.q, system.r
            assert s.degree <= 3 * n - 3
            assert s.shift(1) * q - r * s == p
            assert sum(hypergeom.tnk(n, j) for j in range(-n, 0)) == Fraction(-1, n**3)
            assert system.ok, system.checks


def test_criterion_08_rediscovery(criterion):
    with criterion(8, "integer relations for zeta(7), the zeta(11) row and the quadratic redundancy; zeta(5) none"):
        quad = [
            LambdaSpec(7, Partition(), 2),
            LambdaSpec(5, Partition((1,)), 2),
            LambdaSpec(3, Partition((1, 1)), 2),
            LambdaSpec(3, Partition((2,)), 2),
        ]
        found = {}
        for d in (100, 140):
            z7 = integer_relation(basis_values(discovery_basis(1), d), d)
            z11 = integer_relation(basis_values(discovery_basis(2), d), d)
            red = integer_relation([lambda_sum(s, d) for s in quad], d)
            for r in (z7, z11, red):
                assert r and r.residual.magnitude_bound() < Fraction(1, 10**90)
            c = z7.coefficients
            assert c[0] * -5 == 2 * c[1] and c[0] * -25 == 2 * c[2]
            assert z11.normalized(0, Fraction(2, 5)) == [1, 5, Fraction(-15, 2), Fraction(25, 2)]
            assert red.coefficients == (2, 8, -5, 55)
            found[d] = (z7.coefficients, z11.coefficients, red.coefficients)
        assert found[100] == found[140]
        assert list(rediscover_row(2, 140).coefficients) == [1, 5, Fraction(-15, 2), Fraction(25, 2)]
        neg = negative_search_zeta5(100, 10**10)
        assert not neg and neg.log10_bound > 10


def test_criterion_09_integral(criterion):
    with criterion(9, "quadrature equals C(2n,n) within 1e-12 for n in 1, 2, 5; exact sum agrees"):
        for n in (1, 2, 5):
            for form in ("x", "y"):
                v = identities.integral_corollary4(n, tol=1e-20, form=form)
                assert abs(v.value - comb(2 * n, n)) < Fraction(1, 10**12)
            assert identities.chu_sum(n) == comb(2 * n, n)


def _best_time(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _reference_cold(d):
    clear_caches()
    zeta_reference(3, d)


def test_criterion_10_convergence_rate(criterion):
    with criterion(10, "0.60 +- 0.05 digits per term, N = 1 + floor(5d/3) suffices, fast beats reference at 200 and 300"):
        rate = series.measure_digits_per_term(3, 300)
        assert abs(rate - 0.60) <= 0.05
        for d in (50, 100, 250):
            N = TruncationPlan.for_digits(d).N
            assert N == 1 + (5 * d) // 3
            partial = Fraction(0)
            c = 1
            for k in range(1, N + 1):
                c = c * (4 * k - 2) // k
                partial += Fraction((-1) ** (k + 1), k**3 * c)
            ref = zeta_reference(3, d + 10).value
            assert abs(Fraction(5, 2) * partial - ref) < Fraction(1, 10**d)
            for target in (5, 7):
                assert abs(series.zeta_fast(target, d).value - zeta_reference(target, d + 10).value) < Fraction(1, 10**d)
        for d in (200, 300):
            fast = _best_time(lambda: series.zeta_fast(3, d))
            ref = _best_time(lambda: _reference_cold(d))
            assert fast < ref, (d, fast, ref)
