"""Hypergeometric series, the reflected summand t_n(k) and its Gosper certificate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exceptions import (
    ConjectureViolation,
    NonConvergenceError,
    NonTerminatingError,
    PoleError,
)
from .identities import RationalPolynomial, cnk, identity_65
from .precision import (
    GaussianRational,
    HPComplex,
    HPReal,
    central_binomial,
    guard_digits,
)

__all__ = [
    "HypergeometricSpec",
    "ParameterPoleError",
    "ReflectedTerm",
    "GosperSystem",
    "pfq_terminating",
    "pfq_numeric",
    "cor2_spec",
    "cor2_rhs",
    "cor3_spec",
    "eq61_spec",
    "eq61_value",
    "gf_6f5_spec",
    "tnk",
    "reflected_term",
    "alpha_ratio",
    "gosper_solve",
    "bareiss_solve",
    "reflection_corollary3",
    "cor3_summand",
    "gf_termination_63",
    "direct_sum_63",
]

Param = GaussianRational | HPComplex


class ParameterPoleError(PoleError):
    """A denominator parameter hits a non-positive integer before termination."""


def _gauss(x) -> Param:
    if isinstance(x, (GaussianRational, HPComplex)):
        return x
    return GaussianRational.coerce(x)


def _is_nonpositive_integer(a) -> bool:
    return isinstance(a, GaussianRational) and a.is_integer() and a.re <= 0


@dataclass(frozen=True)
class HypergeometricSpec:
    numerator: tuple = ()
    denominator: tuple = ()
    argument: object = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(_gauss(a) for a in self.numerator))
        object.__setattr__(self, "denominator", tuple(_gauss(b) for b in self.denominator))
        arg = self.argument
        if not isinstance(arg, (GaussianRational, HPComplex)):
            arg = GaussianRational.coerce(arg)
        object.__setattr__(self, "argument", arg)

    @property
    def p(self) -> int:
        return len(self.numerator)

    @property
    def q(self) -> int:
        return len(self.denominator)

    def termination_index(self) -> int | None:
        """Smallest K with a numerator parameter equal to -K, if any."""
        ks = [int(-a.re) for a in self.numerator if _is_nonpositive_integer(a)]
        return min(ks) if ks else None

    def reduced(self) -> "HypergeometricSpec":
        """Cancel parameters that appear on both sides."""
        num = list(self.numerator)
        den = []
        for b in self.denominator:
            for i, a in enumerate(num):
                if isinstance(a, GaussianRational) and isinstance(b, GaussianRational) and a == b:
                    del num[i]
                    break
            else:
                den.append(b)
        return HypergeometricSpec(tuple(num), tuple(den), self.argument)

    def __str__(self):
        num = ", ".join(map(str, self.numerator))
        den = ", ".join(map(str, self.denominator))
        return f"{self.p}F{self.q}({num}; {den} | {self.argument})"


def _paired_product(params: Sequence[GaussianRational], k: int) -> GaussianRational:
    """prod (a + k), multiplying conjugate pairs as real norms first."""
    pending = [a + k for a in params]
    result = GaussianRational(1)
    while pending:
        x = pending.pop()
        if not x.is_real:
            conj = x.conjugate()
            for i, y in enumerate(pending):
                if y == conj:
                    del pending[i]
                    x = GaussianRational(x.norm())
                    break
        result = result * x
    return result


def pfq_terminating(spec: HypergeometricSpec) -> GaussianRational:
    """Exact value of a terminating series over the Gaussian rationals."""
    K = spec.termination_index()
    if K is None:
        raise NonTerminatingError(f"{spec} does not terminate")
    if not all(isinstance(a, GaussianRational) for a in spec.numerator + spec.denominator):
        raise TypeError("exact evaluation needs Gaussian-rational parameters")
    z = spec.argument
    if not isinstance(z, GaussianRational):
        raise TypeError("exact evaluation needs a rational argument")
    total = GaussianRational(1)
    term = GaussianRational(1)
    for k in range(K):
        den = _paired_product(spec.denominator, k) * (k + 1)
        if den == 0:
            raise ParameterPoleError(f"denominator parameter pole at index {k}")
        term = term * _paired_product(spec.numerator, k) * z / den
        total = total + term
    return total


def _ratio_bound(spec: HypergeometricSpec, k: int) -> float:
    """Upper bound on |term_{m+1}/term_m| valid for every m >= k."""
    absz = float(abs(complex(spec.argument))) if isinstance(spec.argument, GaussianRational) else spec.argument.modulus_upper()
    rho = absz * k ** (spec.p - spec.q - 1) if spec.p != spec.q + 1 else absz
    for a in spec.numerator:
        rho *= 1 + _modulus(a) / k
    for b in spec.denominator:
        mb = _modulus(b)
        if mb >= k:
            return math.inf
        rho /= 1 - mb / k
    return rho * (1 + 1e-12)


def _modulus(a: Param) -> float:
    if isinstance(a, GaussianRational):
        return math.hypot(a.re, a.im) * (1 + 1e-15)
    return a.modulus_upper()


def pfq_numeric(spec: HypergeometricSpec, d: int, max_terms: int = 1_000_000) -> HPComplex:
    """Partial sums until a certified geometric tail bound drops below 10^-(d+g-3)."""
    K = spec.termination_index()
    budget = max_terms if K is None else K + 1
    g = guard_digits(4 * d + 100)
    scale = d + g
    exact = all(isinstance(a, GaussianRational) for a in spec.numerator + spec.denominator) and isinstance(
        spec.argument, GaussianRational
    )
    zero_den = [b for b in spec.denominator if _is_nonpositive_integer(b)]
    if zero_den and (K is None or any(-b.re < K for b in zero_den)):
        raise ParameterPoleError("denominator parameter is a non-positive integer")
    if spec.p > spec.q + 1 and K is None:
        raise NonConvergenceError(f"{spec.p}F{spec.q} diverges")
    total = HPComplex.coerce(1, scale)
    term = HPComplex.coerce(1, scale)
    # a few ulps of slack: the rounded term never falls below its own error
    threshold = Fraction(1, 10 ** (d + g - 3))
    z = spec.argument if exact else HPComplex.coerce(spec.argument, scale)
    tail = Fraction(0)
    for k in range(budget):
        if exact:
            ratio = _paired_product(spec.numerator, k) * z / (_paired_product(spec.denominator, k) * (k + 1))
            term = term * ratio
        else:
            num = HPComplex.coerce(1, scale)
            for a in spec.numerator:
                num = num * (a + k) if isinstance(a, HPComplex) else num * (_gauss(a) + k)
            den = HPComplex.coerce(k + 1, scale)
            for b in spec.denominator:
                den = den * (b + k) if isinstance(b, HPComplex) else den * (_gauss(b) + k)
            term = term * num * z / den
        total = total + term
        if K is not None:
            continue
        m = k + 1
        rho = _ratio_bound(spec, m)
        if rho < 0.9:
            mag = term.re.magnitude_bound() + term.im.magnitude_bound()
            rho_q = Fraction(rho).limit_denominator(10**9) + Fraction(1, 10**9)
            tail = mag * rho_q / (1 - rho_q)
            if tail < threshold:
                break
        elif m > 100 and rho >= 1 and m > 10 * max((_modulus(b) for b in spec.denominator), default=0):
            raise NonConvergenceError("term ratio bound stays >= 1")
    else:
        if K is None:
            raise NonConvergenceError(f"no certified tail after {budget} terms")
    # inflate the error by the tail bound
    extra = -(-tail.numerator * 10**scale // tail.denominator) if tail else 0
    re = HPReal(total.re.mantissa, total.re.scale, total.re.err + extra, d)
    im = HPReal(total.im.mantissa, total.im.scale, total.im.err + extra, d)
    return HPComplex(re, im)


# ---------------------------------------------------------------------------
# concrete series


def _i(x) -> GaussianRational:
    return GaussianRational(0, x)


def cor2_spec(n: int) -> HypergeometricSpec:
    """The non-terminating 6F5 at -1/4 indexed by n >= 1."""
    if n < 1:
        raise ValueError("n must be positive")
    num = (n + 1, n + 1, GaussianRational(2 * n, n), GaussianRational(2 * n, -n), _i(n), _i(-n))
    den = (Fraction(2 * n + 1, 2), n, 2 * n + 1, GaussianRational(n + 1, n), GaussianRational(n + 1, -n))
    return HypergeometricSpec(num, den, Fraction(-1, 4))


def cor2_rhs(n: int) -> Fraction:
    prod = Fraction(1)
    n4 = n**4
    for j in range(1, n):
        prod *= Fraction(n4 - j**4, 4 * n4 + j**4)
    return Fraction(2, 5) * central_binomial(n) * prod


def cor3_spec() -> HypergeometricSpec:
    return HypergeometricSpec((2, 2, _i(-1), _i(1)), (Fraction(3, 2), 1, 3), Fraction(-1, 4))


def eq61_spec(n: int) -> HypergeometricSpec:
    """The terminating 6F5 at -4 indexed by n >= 1."""
    if n < 1:
        raise ValueError("n must be positive")
    num = (2, Fraction(3, 2), 1 + n, 1 - n, GaussianRational(1, n), GaussianRational(1, -n))
    den = (
        1,
        GaussianRational(2 + n, n),
        GaussianRational(2 + n, -n),
        GaussianRational(2 - n, n),
        GaussianRational(2 - n, -n),
    )
    return HypergeometricSpec(num, den, -4)


def eq61_value(n: int) -> Fraction:
    return Fraction(4 * n**4 + 1, 5 * n**2)


def gf_6f5_spec(z) -> HypergeometricSpec:
    """6F5 at -1/4 whose value times 1/(1-z^4) is (4/5) sum 1/(k^3 (1 - z^4/k^4))."""
    z = _gauss(z)
    iz = z * GaussianRational(0, 1)
    num = (2, 2, 1 + z + iz, 1 + z - iz, 1 - z + iz, 1 - z - iz)
    den = (Fraction(3, 2), 2 + z, 2 - z, 2 + iz, 2 - iz)
    return HypergeometricSpec(num, den, Fraction(-1, 4))


# ---------------------------------------------------------------------------
# the reflected summand


@dataclass(frozen=True)
class ReflectedTerm:
    n: int
    k: int
    value: Fraction

    @property
    def regime(self) -> str:
        if self.k >= self.n:
            return "series"
        return "zero" if self.k >= 0 else "reflected"


def tnk(n: int, k: int) -> Fraction:
    """t_n(k) for every integer k (n >= 1)."""
    if n < 1:
        raise ValueError("n must be positive")
    if k >= n:
        sign = 1 if k % 2 else -1
        return Fraction(5 * sign, 2 * k**3 * central_binomial(k)) * cnk(n, k)
    if k >= 0:
        return Fraction(0)
    m = -k
    n4 = 4 * n**4
    prod = Fraction(1)
    for j in range(1, m):
        prod *= Fraction(n**4 - j**4, n4 + j**4)
        if not prod:
            return prod
    return -Fraction(5, 2 * n) * central_binomial(m) * Fraction(m * m, n4 + m**4) * prod


def reflected_term(n: int, k: int) -> ReflectedTerm:
    return ReflectedTerm(n, k, tnk(n, k))


def alpha_ratio(n: int, k: int) -> Fraction:
    """-2k(2k+1)((k+1)^4 - n^4) / ((k+1)^2 (k^4 + 4n^4)), extended to all k != -1."""
    if k == -1:
        raise PoleError("alpha_n(k) has a pole at k = -1")
    return Fraction(-2 * k * (2 * k + 1) * ((k + 1) ** 4 - n**4), (k + 1) ** 2 * (k**4 + 4 * n**4))


# ---------------------------------------------------------------------------
# Gosper certificate


def bareiss_solve(matrix: list[list[int]], rhs: list[int]) -> list[Fraction] | None:
    """Solve an (over)determined integer system exactly; None if inconsistent.

    Fraction-free elimination on the augmented matrix, then back substitution.
    Free unknowns (rank deficiency) are set to zero.
    """
    rows = [list(map(int, r)) + [int(b)] for r, b in zip(matrix, rhs)]
    ncols = len(matrix[0]) if matrix else 0
    prev = 1
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            for j in range(c + 1, ncols + 1):
                rows[i][j] = (rows[r][c] * rows[i][j] - rows[i][c] * rows[r][j]) // prev
            rows[i][c] = 0
        prev = rows[r][c]
        pivots.append(c)
        r += 1
    if any(row[ncols] for row in rows[r:]):
        return None
    sol = [Fraction(0)] * ncols
    for i in range(r - 1, -1, -1):
        c = pivots[i]
        acc = Fraction(rows[i][ncols])
        for j in range(c + 1, ncols):
            acc -= rows[i][j] * sol[j]
        sol[c] = acc / rows[i][c]
    return sol


def _poly_gcd(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    while not b.is_zero():
        a, b = b, divmod(a, b)[1]
    return a


def _root_bound(p: RationalPolynomial) -> Fraction:
    lead = abs(p.leading())
    return 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0))


@dataclass
class GosperSystem:
    n: int
    p: RationalPolynomial
    q: RationalPolynomial
    r: RationalPolynomial
    s: RationalPolynomial | None = None
    checks: dict = field(default_factory=dict)

    def T(self, k: int) -> Fraction:
        """T_n(k) = r(k) s(k) t_n(k) / p(k); needs p(k) != 0."""
        pk = self.p(k)
        if pk == 0:
            raise PoleError(f"p_{self.n}({k}) = 0")
        return self.r(k) * self.s(k) * tnk(self.n, k) / pk

    def T0(self) -> Fraction:
        """T_n(0), reached from k = -1 where p does not vanish."""
        return self.T(-1) + tnk(self.n, -1)

    @property
    def ok(self) -> bool:
        return self.s is not None and all(self.checks.values())


def _gosper_polys(n: int):
    x = RationalPolynomial.x()
    p = x * x
    for j in range(1, n):
        p = p * (x - j) * ((x + j) ** 2 + n * n)
    q = (x - n) ** 2 + n * n
    r = RationalPolynomial([-2 * n, -2]) * RationalPolynomial([-1, 2])  # -2(k+n)(2k-1)
    return p, q, r


def gosper_solve(n: int, certificate_points: int = 20) -> GosperSystem:
    """Solve p(k) = s(k+1) q(k) - r(k) s(k) with deg s <= 3n-3 and check the certificate."""
    if n < 1:
        raise ValueError("n must be positive")
    p, q, r = _gosper_polys(n)
    ds = 3 * n - 3
    x = RationalPolynomial.x()
    # column i: contribution of the monomial k^i in s
    columns = []
    for i in range(ds + 1):
        mono = x**i
        columns.append(mono.shift(1) * q - r * mono)
    nrows = max(p.degree, max(c.degree for c in columns)) + 1

    def coeff(poly, j):
        return poly.coeffs[j] if j < len(poly.coeffs) else Fraction(0)

    matrix = [[int(coeff(col, j)) for col in columns] for j in range(nrows)]
    rhs = [int(coeff(p, j)) for j in range(nrows)]
    sol = bareiss_solve(matrix, rhs)
    system = GosperSystem(n, p, q, r)
    if sol is None:
        raise ConjectureViolation(f"no Gosper polynomial of degree <= {ds} for n = {n}", index=n)
    s = RationalPolynomial(sol)
    system.s = s
    checks = system.checks
    checks["equation"] = s.shift(1) * q - r * s == p
    checks["degree"] = s.degree <= ds
    # q(k) and r(k+h) have no common factor for any integer h
    bound = int(_root_bound(q) + _root_bound(r)) + 1
    checks["no_shift_factor"] = all(_poly_gcd(q, r.shift(h)).degree == 0 for h in range(-bound, bound + 1))
    # t(k+1)/t(k) = p(k+1) q(k) / (p(k) r(k+1)) wherever everything is finite and nonzero
    ratio_ok = True
    for k in range(-n, n + certificate_points):
        tk, tk1 = tnk(n, k), tnk(n, k + 1)
        if tk and p(k) and r(k + 1):
            ratio_ok &= tk1 / tk == p(k + 1) * q(k) / (p(k) * r(k + 1))
    checks["term_ratio"] = ratio_ok
    checks["telescoping"] = all(
        system.T(k + 1) - system.T(k) == tnk(n, k) for k in range(n, n + certificate_points)
    )
    checks["T_minus_n"] = system.T(-n) == 0
    reflected = sum((tnk(n, j) for j in range(-n, 0)), Fraction(0))
    checks["T0"] = system.T0() == reflected == Fraction(-1, n**3)
    return system


# ---------------------------------------------------------------------------
# reflection of the 4/5 series to negative indices


def _rpoch(a: Fraction, k: int) -> Fraction:
    """1/(a)_k for any integer k, with (a)_k = Gamma(a+k)/Gamma(a); 0 at poles."""
    if k >= 0:
        v = Fraction(1)
        for j in range(k):
            v *= a + j
        return 1 / v
    v = Fraction(1)
    for j in range(1, -k + 1):
        v *= a - j
    return v


def _poch_pm_i(k: int) -> Fraction:
    """(i)_k (-i)_k = |(i)_k|^2 for any integer k; finite and nonzero."""
    v = Fraction(1)
    if k >= 0:
        for j in range(k):
            v *= j * j + 1
        return v
    for j in range(1, -k + 1):
        v /= j * j + 1
    return v


def cor3_summand(k: int) -> Fraction:
    """t(k) = (k+1)^2 Gamma(k +- i) Gamma(1/2) (-1/4)^k / (Gamma(+-i) Gamma(3/2+k) Gamma(k+3)).

    With Gamma(1/2)/Gamma(3/2+k) = 2/(3/2)_k and 1/Gamma(k+3) = 1/(2 (3)_k).
    """
    return (
        (k + 1) ** 2
        * _poch_pm_i(k)
        * _rpoch(Fraction(3, 2), k)
        * _rpoch(Fraction(3), k)
        * Fraction(-1, 4) ** k
    )


def reflection_corollary3(check_digits: int = 30) -> Fraction:
    """sum_{k>=0} t(k) = -t(-2), since t vanishes at k = -1 and k <= -3."""
    if cor3_summand(-1) != 0 or any(cor3_summand(-k) != 0 for k in range(3, 12)):
        raise ConjectureViolation("reflected summand does not vanish where expected")
    result = -cor3_summand(-2)
    if check_digits:
        numeric = pfq_numeric(cor3_spec(), check_digits)
        err = abs(numeric.re.value - result) + abs(numeric.im.value)
        if err > Fraction(1, 10**check_digits):
            raise ConjectureViolation("reflection value disagrees with the series", detail=numeric)
    return result


# ---------------------------------------------------------------------------
# terminating specialisation z^4 = -n^4/4


def gf_termination_63(n: int, d: int) -> tuple[HPReal, Fraction]:
    """(closed form of sum_k 4k/(4k^4+n^4) to d digits, terminating right-hand side exactly)."""
    lhs, rhs = identity_65(n)
    scale = d + guard_digits(n)
    return HPReal.from_rational(rhs, scale, d), lhs


def direct_sum_63(n: int, terms: int = 10**6) -> float:
    """Plain float summation of sum_{k<=terms} 4k/(4k^4+n^4) plus the integral tail 1/(2 terms^2)."""
    n4 = n**4
    s = math.fsum(4 * k / (4 * k**4 + n4) for k in range(1, terms + 1))
    return s + 1 / (2 * terms**2)
