"""High-precision evaluation of the central-binomial zeta series.

All series here are truncated at N = 1 + floor(5d/3) terms (the terms decay
like 4^-k) and carry a rigorous tail bound: for k >= 1 the ratio
C(2k,k)/C(2k+2,k+1) is at most 1/3, so the tail after N terms is at most
3/2 times a majorant of term N+1.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .exceptions import DivergenceError, PoleError
from .identities import cnk_rows
from .precision import (
    HPComplex,
    HPReal,
    _cdiv,
    central_binomial,
    guard_digits,
    zeta_reference,
)
from .symfun import Partition, SymmetricAccumulator

__all__ = [
    "LambdaSpec",
    "TruncationPlan",
    "lambda_sum",
    "zeta_fast",
    "gf_rhs",
    "gf_rhs_quartic",
    "gf_lhs",
    "gf_lhs_quartic",
    "zeta4n3_via_corollary1",
    "koecher_gf_rhs",
    "koecher_gf_lhs",
    "koecher_zeta",
    "dirichlet_transform",
    "DirichletResult",
    "measure_digits_per_term",
    "zeta",
]


@dataclass(frozen=True)
class LambdaSpec:
    """lambda(m, P_alpha^(s)) = sum_k (-1)^(k+1) P_alpha^(s)(k) / (k^m C(2k,k))."""

    m: int
    alpha: Partition = field(default_factory=Partition)
    s: int = 4

    def __post_init__(self):
        if not isinstance(self.alpha, Partition):
            object.__setattr__(self, "alpha", Partition(tuple(self.alpha)))

    @property
    def label(self) -> str:
        base = f"lambda({self.m},{self.alpha.power_label()})"
        return base if self.s == 4 else f"{base}[s={self.s}]"


@dataclass(frozen=True)
class TruncationPlan:
    d: int
    N: int
    g: int

    @classmethod
    def for_digits(cls, d: int) -> "TruncationPlan":
        if d < 1:
            raise ValueError("digits must be >= 1")
        N = 1 + (5 * d) // 3
        return cls(d, N, guard_digits(N))

    @property
    def scale(self) -> int:
        return self.d + self.g


def _tail_bound(N: int, m: int, weight: Fraction) -> Fraction:
    """Bound on sum_{k>N} weight / (k^m C(2k,k))."""
    k = N + 1
    return Fraction(weight) * Fraction(3, 2) / (k**m * central_binomial(k))


def _with_tail(x: HPReal, tail: Fraction, digits: int) -> HPReal:
    extra = _cdiv(tail.numerator * 10**x.scale, tail.denominator)
    return HPReal(x.mantissa, x.scale, x.err + extra, digits)


def _with_tail_c(z: HPComplex, tail: Fraction, digits: int) -> HPComplex:
    return HPComplex(_with_tail(z.re, tail, digits), _with_tail(z.im, tail, digits))


def _upper_fraction(x: float) -> Fraction:
    # float bound -> rational bound, rounded generously upward
    return Fraction(x * 1.01 + 1e-300).limit_denominator(10**6) + Fraction(1, 10**6)


# ---------------------------------------------------------------------------
# lambda sums and the three fixed procedures


def lambda_sum(spec: LambdaSpec, d: int) -> HPReal:
    plan = TruncationPlan.for_digits(d)
    w = plan.scale
    if spec.m < 2:
        raise ValueError("m must be >= 2")
    parts = spec.alpha.parts
    degree = max(parts, default=0)
    # running power sums P_r(k) = sum_{j<k} j^(-r s)
    psums = [HPReal.zero(w) for _ in range(degree + 1)]
    total = HPReal.zero(w)
    c = 1
    for k in range(1, plan.N + 1):
        c = c * (4 * k - 2) // k
        weight = HPReal.from_rational(1, w)
        for r in parts:
            weight = weight * psums[r]
        term = weight * Fraction(1, k**spec.m * c)
        total = total + term if k % 2 else total - term
        for r in range(1, degree + 1):
            psums[r] = psums[r] + HPReal.from_rational(Fraction(1, k ** (r * spec.s)), w)
    # P_r <= zeta(r s) <= zeta(2) < 2
    tail = _tail_bound(plan.N, spec.m, Fraction(2) ** len(parts))
    return _with_tail(total, tail, d)


def zeta_fast(target: int, d: int) -> HPReal:
    """zeta(3), zeta(5) or zeta(7) by the running-accumulator procedures.

    zeta(3) = (5/2) sum (-1)^(n+1) / (n^3 c)
    zeta(5) = (1/2) sum (-1)^(n+1) (4 g - 5 a) / (n^3 c),   g = 1/n^2
    zeta(7) = (5/2) sum (-1)^(n+1) (5 a + g) / (n^3 c),     g = 1/n^4
    where c = C(2n, n) and a = sum_{j<n} g_j.
    """
    if target not in (3, 5, 7):
        raise ValueError("target must be 3, 5 or 7")
    if d < 1:
        raise ValueError("digits must be >= 1")
    plan = TruncationPlan.for_digits(d)
    w = plan.scale
    s = HPReal.zero(w)
    a = HPReal.zero(w)
    c = 2
    for n in range(1, plan.N + 1):
        n3c = n**3 * c
        if target == 3:
            term = HPReal.from_rational(Fraction(1, n3c), w)
        else:
            g = HPReal.from_rational(Fraction(1, n ** (target - 3)), w)
            num = 4 * g - 5 * a if target == 5 else 5 * a + g
            term = num * Fraction(1, n3c)
            a = a + g
        s = s + term if n % 2 else s - term
        c = c * (4 * n + 2) // (n + 1)
    if target == 3:
        result, tail = s * Fraction(5, 2), _tail_bound(plan.N, 3, Fraction(5, 2))
    elif target == 5:
        # |4g - 5a| <= 4 + 5 zeta(2) < 13
        result, tail = s * Fraction(1, 2), _tail_bound(plan.N, 3, Fraction(13, 2))
    else:
        # |5a + g| <= 5 zeta(4) + 1 < 7
        result, tail = s * Fraction(5, 2), _tail_bound(plan.N, 3, Fraction(35, 2))
    return _with_tail(result, tail, d)


# ---------------------------------------------------------------------------
# generating functions


def _as_complex(z, scale: int) -> HPComplex:
    return HPComplex.coerce(z, scale)


def _quartic(z, scale: int) -> HPComplex:
    zc = _as_complex(z, scale)
    z2 = zc * zc
    return z2 * z2


def gf_rhs(z, d: int) -> HPComplex:
    """(5/2) sum_k (-1)^(k+1)/(k^3 C(2k,k)) / (1 - z^4/k^4) prod_{j<k} (1+4z^4/j^4)/(1-z^4/j^4)."""
    plan = TruncationPlan.for_digits(d)
    zc = _as_complex(z, plan.scale)
    if zc.modulus_upper() >= 1:
        raise DivergenceError("gf_rhs requires |z| < 1")
    return gf_rhs_quartic(_quartic(zc, plan.scale), d)


def gf_rhs_quartic(w, d: int) -> HPComplex:
    """The right-hand side as a function of w = z^4 (|w| < 1)."""
    plan = TruncationPlan.for_digits(d)
    scale = plan.scale
    wc = _as_complex(w, scale)
    a = wc.modulus_upper()
    if a >= 1:
        raise DivergenceError("gf_rhs requires |z^4| < 1")
    one = HPComplex.coerce(1, scale)
    prod = one
    total = HPComplex.coerce(0, scale)
    c = 1
    for k in range(1, plan.N + 1):
        c = c * (4 * k - 2) // k
        u = wc * Fraction(1, k**4)
        den = one - u
        if den.modulus_upper() < 1e-300 or float(den.abs_squared().magnitude_bound()) == 0:
            raise PoleError(f"z^4 = {k}^4 is a pole")
        term = prod / den * Fraction(1, k**3 * c)
        total = total + term if k % 2 else total - term
        prod = prod * (one + 4 * u) / den
    # |prod/(1-u)| <= exp(5 a zeta(4)/(1-a)) / (1-a)
    bound = math.exp(5 * a * 1.0824 / (1 - a)) / (1 - a)
    tail = _tail_bound(plan.N, 3, Fraction(5, 2) * _upper_fraction(bound))
    return _with_tail_c(total * Fraction(5, 2), tail, d)


def gf_lhs(z, d: int) -> HPComplex:
    """sum_k 1/(k^3 (1 - z^4/k^4)), evaluated as sum_n z^(4n) zeta(4n+3)."""
    g = guard_digits(10 * d)
    zc = _as_complex(z, d + g)
    if zc.modulus_upper() >= 1:
        raise DivergenceError("gf_lhs requires |z| < 1")
    return gf_lhs_quartic(_quartic(zc, d + g), d)


def _power_series_in_zeta(w: HPComplex, d: int, first: int, step: int) -> HPComplex:
    # sum_{n>=0} w^n zeta(first + step*n), |w| < 1; zeta(first+step*n) <= zeta(first) < 2
    g = guard_digits(10 * d)
    scale = d + g
    a = w.modulus_upper()
    if a >= 1:
        raise DivergenceError("power series in w requires |w| < 1")
    threshold = 10.0 ** -(d + g)
    total = HPComplex.coerce(0, scale)
    wn = HPComplex.coerce(1, scale)
    n = 0
    an = 1.0
    while True:
        if an * 1.2021 < threshold:
            break
        zeta = zeta_reference(first + step * n, scale)
        total = total + wn * zeta
        n += 1
        wn = wn * w
        an *= a
    tail = _upper_fraction(2 * an / (1 - a)) if an > 0 else Fraction(0)
    return _with_tail_c(total, tail, d)


def gf_lhs_quartic(w, d: int) -> HPComplex:
    g = guard_digits(10 * d)
    return _power_series_in_zeta(_as_complex(w, d + g), d, 3, 4)


def zeta4n3_via_corollary1(n: int, d: int) -> HPReal:
    """zeta(4n+3) = (5/2) sum_j sum_k (-1)^(k+1)/(k^(4j+3) C(2k,k)) sum_r 4^r h_{n-j-r} e_r.

    The symmetric functions of {1/j^4 : j < k} are carried along in k.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    plan = TruncationPlan.for_digits(d)
    w = plan.scale
    acc = SymmetricAccumulator(n, zero=HPReal.zero(w), one=HPReal.from_rational(1, w))
    total = HPReal.zero(w)
    c = 1
    for k in range(1, plan.N + 1):
        if k > 1:
            acc.push(HPReal.from_rational(Fraction(1, (k - 1) ** 4), w))
        c = c * (4 * k - 2) // k
        weights = []
        for m in range(n + 1):
            v = HPReal.zero(w)
            for r in range(m + 1):
                v = v + acc.h[m - r] * acc.e[r] * (4**r)
            weights.append(v)
        inner = HPReal.zero(w)
        for j in range(n + 1):
            inner = inner + weights[n - j] * Fraction(1, k ** (4 * j + 3))
        term = inner * Fraction(1, c)
        total = total + term if k % 2 else total - term
    # sum_r 4^r h_{m-r} e_r <= 10 * 2^m (coefficient bound at t = 1/2)
    tail = _tail_bound(plan.N, 3, Fraction(5, 2) * 20 * 2**n)
    return _with_tail(total * Fraction(5, 2), tail, d)


def koecher_gf_rhs(z, d: int) -> HPComplex:
    """sum_k (-1)^(k+1)/(k^3 C(2k,k)) (1/2 + 2/(1 - z^2/k^2)) prod_{j<k} (1 - z^2/j^2)."""
    plan = TruncationPlan.for_digits(d)
    scale = plan.scale
    zc = _as_complex(z, scale)
    if zc.modulus_upper() >= 1:
        raise DivergenceError("koecher_gf_rhs requires |z| < 1")
    z2 = zc * zc
    a = z2.modulus_upper()
    one = HPComplex.coerce(1, scale)
    half = HPComplex.coerce(Fraction(1, 2), scale)
    prod = one
    total = HPComplex.coerce(0, scale)
    c = 1
    for k in range(1, plan.N + 1):
        c = c * (4 * k - 2) // k
        u = z2 * Fraction(1, k * k)
        den = one - u
        if float(den.abs_squared().magnitude_bound()) == 0:
            raise PoleError(f"z = +-{k} is a pole")
        term = (half + 2 / den) * prod * Fraction(1, k**3 * c)
        total = total + term if k % 2 else total - term
        prod = prod * den
    bound = (0.5 + 2 / (1 - a)) * math.exp(a * 1.6450)
    tail = _tail_bound(plan.N, 3, _upper_fraction(bound))
    return _with_tail_c(total, tail, d)


def koecher_gf_lhs(z, d: int) -> HPComplex:
    """sum_k 1/(k^3 (1 - z^2/k^2)) = sum_n z^(2n) zeta(2n+3)."""
    g = guard_digits(10 * d)
    zc = _as_complex(z, d + g)
    return _power_series_in_zeta(zc * zc, d, 3, 2)


def koecher_zeta(n: int, d: int) -> HPReal:
    """zeta(2n+3) from the z^(2n) coefficient of the square-power generating function."""
    if n < 0:
        raise ValueError("n must be non-negative")
    plan = TruncationPlan.for_digits(d)
    w = plan.scale
    acc = SymmetricAccumulator(n, zero=HPReal.zero(w), one=HPReal.from_rational(1, w))
    total = HPReal.zero(w)
    c = 1
    sign_n = -1 if n % 2 else 1
    for k in range(1, plan.N + 1):
        if k > 1:
            acc.push(HPReal.from_rational(Fraction(1, (k - 1) ** 2), w))
        c = c * (4 * k - 2) // k
        inner = acc.e[n] * Fraction(5 * sign_n, 2 * k**3)
        for j in range(1, n + 1):
            sgn = -1 if (n - j) % 2 else 1
            inner = inner + acc.e[n - j] * Fraction(2 * sgn, k ** (2 * j + 3))
        term = inner * Fraction(1, c)
        total = total + term if k % 2 else total - term
    # e_m^(2) <= e^{zeta(2)} < 6
    tail = _tail_bound(plan.N, 3, Fraction(6) * (Fraction(5, 2) + 2 * n))
    return _with_tail(total, tail, d)


# ---------------------------------------------------------------------------
# Dirichlet series transform


@dataclass(frozen=True)
class DirichletResult:
    transformed: HPReal
    direct: HPReal
    K: int
    transformed_exact: Fraction
    direct_exact: Fraction


def dirichlet_transform(a: Callable[[int], object], s: int, d: int, K: int) -> DirichletResult:
    """Partial sums of sum_k (-1)^(k+1)/C(2k,k) sum_{j<=k} a_j d_j(k)/j^s, k <= K.

    Also returns the plain partial sum sum_{n<=K} a_n/n^s.  Both are exact
    rationals rendered to ``d`` digits; no claim is made about the distance
    to the infinite sums (the transform need not converge).
    """
    if s < 3:
        raise ValueError("s must be >= 3")
    if K < 1:
        raise ValueError("K must be positive")
    seq = [Fraction(a(j)) for j in range(1, K + 1)]
    transformed = Fraction(0)
    c = 1
    for k, row in enumerate(cnk_rows(K), start=1):
        c = c * (4 * k - 2) // k
        inner = Fraction(0)
        for j, cj in enumerate(row, start=1):
            # a_j d_j(k)/j^s with d_j(k) = 5 j^3 c_j(k)/(2k^3)
            inner += seq[j - 1] * cj * Fraction(5, 2 * k**3 * j ** (s - 3))
        transformed += inner / c if k % 2 else -inner / c
    direct = sum((seq[n - 1] / n**s for n in range(1, K + 1)), Fraction(0))
    scale = d + guard_digits(K)
    return DirichletResult(
        HPReal.from_rational(transformed, scale, d),
        HPReal.from_rational(direct, scale, d),
        K,
        transformed,
        direct,
    )


# ---------------------------------------------------------------------------
# convergence-rate measurement


def measure_digits_per_term(target: int = 3, d: int = 300, first: int = 20, step: int = 10) -> float:
    """Least-squares slope of -log10|partial sum - zeta| against the term count.

    Partial sums are taken at N = first, first+step, ... while the error is
    still well above 10^-d.
    """
    ref = zeta_reference(target, d + 40)
    w = ref.scale
    xs, ys = [], []
    s = HPReal.zero(w)
    a = HPReal.zero(w)
    c = 2
    limit = (3 * d) // 2
    for n in range(1, limit + 1):
        if target == 3:
            term = HPReal.from_rational(Fraction(1, n**3 * c), w)
            scale_out = Fraction(5, 2)
        else:
            g = HPReal.from_rational(Fraction(1, n ** (target - 3)), w)
            num = 4 * g - 5 * a if target == 5 else 5 * a + g
            term = num * Fraction(1, n**3 * c)
            a = a + g
            scale_out = Fraction(1, 2) if target == 5 else Fraction(5, 2)
        s = s + term if n % 2 else s - term
        c = c * (4 * n + 2) // (n + 1)
        if n >= first and (n - first) % step == 0:
            err = abs((s * scale_out).value - ref.value)
            if err == 0 or err < Fraction(1, 10 ** (d - 5)):
                break
            xs.append(n)
            ys.append(-math.log10(err.numerator) + math.log10(err.denominator))
    slope, _ = statistics.linear_regression(xs, ys)
    return slope


def zeta(target: int, d: int, method: str = "fast", n: int | None = None) -> tuple[HPReal, int]:
    """Dispatch used by the command line; returns (value, number of series terms)."""
    plan = TruncationPlan.for_digits(d)
    if method == "reference":
        return zeta_reference(target, d), 0
    if method == "fast":
        return zeta_fast(target, d), plan.N
    if method == "corollary1":
        if (target - 3) % 4:
            raise ValueError("corollary1 only gives zeta(4n+3)")
        if n is not None and 4 * n + 3 != target:
            raise ValueError(f"--n {n} does not match target {target}")
        return zeta4n3_via_corollary1((target - 3) // 4, d), plan.N
    if method == "koecher":
        if target < 3 or target % 2 == 0:
            raise ValueError("koecher gives odd zeta values >= 3")
        return koecher_zeta((target - 3) // 2, d), plan.N
    raise ValueError(f"unknown method {method!r}")
