"""Exact rationals, Gaussian rationals and error-bounded fixed-point reals.

Exact quantities are plain :class:`fractions.Fraction` values (exported as
``BigRational``).  Numerical quantities are :class:`HPReal`: a decimal
fixed-point mantissa together with an absolute error bound counted in units
of the last place.  Every operation truncates toward zero and widens the
error bound by one ulp whenever it is inexact, so results are deterministic
and the reported bound is always conservative.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable

from .exceptions import PrecisionError

BigRational = Fraction

GUARD_ENV = "APERYZETA_GUARD_DIGITS"
DEFAULT_GUARD = 10
MAX_WORKING_DIGITS = 200_000

__all__ = [
    "BigRational",
    "GaussianRational",
    "HPReal",
    "HPComplex",
    "accumulate",
    "central_binomial",
    "pochhammer",
    "zeta_reference",
    "bernoulli_even",
    "format_decimal",
    "parse_decimal",
    "guard_digits",
]


def guard_digits(n_terms: int = 1) -> int:
    """Guard digits for a computation that combines ``n_terms`` rounded values."""
    base = int(os.environ.get(GUARD_ENV, DEFAULT_GUARD))
    return base + (math.ceil(math.log10(n_terms)) if n_terms > 1 else 0)


def _tdiv(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


def _cdiv(a: int, b: int) -> int:
    # ceiling of a/b for a >= 0, b > 0
    return -(-a // b)


def _check_scale(scale: int) -> None:
    if scale > MAX_WORKING_DIGITS:
        raise PrecisionError(
            f"working precision {scale} exceeds the limit of {MAX_WORKING_DIGITS} digits"
        )


# ---------------------------------------------------------------------------
# decimal strings


_DECIMAL_RE = re.compile(r"^\s*([+-]?)(\d+)\.(\d*)\s*$")


def _floor_log10(v: Fraction) -> int:
    e = len(str(v.numerator)) - len(str(v.denominator))
    while Fraction(10) ** e > v:
        e -= 1
    while Fraction(10) ** (e + 1) <= v:
        e += 1
    return e


def format_decimal(value, digits: int) -> str:
    """Render ``value`` with exactly ``digits`` significant digits.

    The grammar is ``[-]int.frac``; rounding at the last digit is
    round-half-even.
    """
    if digits < 1:
        raise ValueError("digits must be positive")
    v = Fraction(value)
    sign = "-" if v < 0 else ""
    v = abs(v)
    if v == 0:
        return "0." + "0" * (digits - 1)
    e = _floor_log10(v)
    scaled = round(v * Fraction(10) ** (digits - 1 - e))
    if scaled == 10**digits:
        e += 1
        scaled = 10 ** (digits - 1)
    s = str(scaled)
    if e >= 0:
        int_part = (s + "0" * max(0, e + 1 - digits))[: e + 1]
        frac = s[e + 1 :]
    else:
        int_part = "0"
        frac = "0" * (-e - 1) + s
    return f"{sign}{int_part}.{frac}"


def parse_decimal(text: str) -> Fraction:
    m = _DECIMAL_RE.match(text)
    if m is None:
        raise ValueError(f"not a decimal string: {text!r}")
    sign, ip, fp = m.groups()
    q = Fraction(int(ip + fp), 10 ** len(fp))
    return -q if sign == "-" else q


# ---------------------------------------------------------------------------
# Gaussian rationals


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _as_fraction(re)
        self.im = _as_fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(_as_fraction(x), 0)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.reciprocal()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.reciprocal() ** (-k)
        result, base = GaussianRational(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash(self.re) if self.im == 0 else hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


# ---------------------------------------------------------------------------
# fixed-point reals


@dataclass(frozen=True, slots=True)
class HPReal:
    """Fixed-point real ``mantissa * 10**-scale`` with |error| <= ``err`` ulps.

    ``digits`` records the number of correct digits the producer promised
    (it is metadata only and does not change arithmetic).
    """

    mantissa: int
    scale: int
    err: int = 0
    digits: int | None = None

    # constructors ---------------------------------------------------------

    @classmethod
    def from_rational(cls, q, scale: int, digits: int | None = None) -> "HPReal":
        _check_scale(scale)
        q = _as_fraction(q)
        num = q.numerator * 10**scale
        m = _tdiv(num, q.denominator)
        inexact = m * q.denominator != num
        return cls(m, scale, int(inexact), digits)

    @classmethod
    def zero(cls, scale: int) -> "HPReal":
        return cls(0, scale, 0)

    @classmethod
    def parse(cls, text: str) -> "HPReal":
        """Parse the rendering produced by :meth:`to_decimal` (exact, err = 0)."""
        m = _DECIMAL_RE.match(text)
        if m is None:
            raise ValueError(f"not a decimal string: {text!r}")
        sign, ip, fp = m.groups()
        mant = int(ip + fp)
        sig = len((ip + fp).lstrip("0")) or 1
        return cls(-mant if sign == "-" else mant, len(fp), 0, sig)

    # views ----------------------------------------------------------------

    @property
    def value(self) -> Fraction:
        return Fraction(self.mantissa, 10**self.scale)

    @property
    def err_bound(self) -> Fraction:
        return Fraction(self.err, 10**self.scale)

    def magnitude_bound(self) -> Fraction:
        """Upper bound on the absolute value of the true quantity."""
        return Fraction(abs(self.mantissa) + self.err, 10**self.scale)

    def contains(self, q) -> bool:
        return abs(self.value - _as_fraction(q)) <= self.err_bound

    def err_exponent(self) -> int | None:
        """Smallest e with err_bound <= 10**e (None for an exact value)."""
        if self.err == 0:
            return None
        return math.ceil(math.log10(self.err)) - self.scale if self.err > 1 else -self.scale

    def err_string(self) -> str:
        e = self.err_exponent()
        return "0" if e is None else f"1e{e}"

    def with_digits(self, digits: int) -> "HPReal":
        return HPReal(self.mantissa, self.scale, self.err, digits)

    def to_decimal(self, digits: int | None = None) -> str:
        d = digits or self.digits
        if d is None:
            d = max(1, self.scale)
        return format_decimal(self.value, d)

    def __float__(self):
        return self.mantissa / 10**self.scale if self.scale < 300 else float(self.value)

    def __str__(self):
        return self.to_decimal()

    # precision changes ------------------------------------------------------

    def rescale(self, scale: int) -> "HPReal":
        if scale == self.scale:
            return self
        if scale > self.scale:
            f = 10 ** (scale - self.scale)
            return HPReal(self.mantissa * f, scale, self.err * f, self.digits)
        f = 10 ** (self.scale - scale)
        m = _tdiv(self.mantissa, f)
        inexact = m * f != self.mantissa
        return HPReal(m, scale, _cdiv(self.err, f) + int(inexact), self.digits)

    @staticmethod
    def _align(a: "HPReal", b: "HPReal"):
        if a.scale == b.scale:
            return a, b
        s = max(a.scale, b.scale)
        return a.rescale(s), b.rescale(s)

    # arithmetic -------------------------------------------------------------

    def __neg__(self):
        return HPReal(-self.mantissa, self.scale, self.err, self.digits)

    def __abs__(self):
        return HPReal(abs(self.mantissa), self.scale, self.err, self.digits)

    def __add__(self, other):
        if isinstance(other, HPReal):
            a, b = HPReal._align(self, other)
            return HPReal(a.mantissa + b.mantissa, a.scale, a.err + b.err)
        if isinstance(other, (int, Fraction)):
            return self + HPReal.from_rational(other, self.scale)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (HPReal, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, HPReal):
            a, b = HPReal._align(self, other)
            one = 10**a.scale
            prod = a.mantissa * b.mantissa
            m = _tdiv(prod, one)
            err = abs(a.mantissa) * b.err + abs(b.mantissa) * a.err + a.err * b.err
            return HPReal(m, a.scale, _cdiv(err, one) + int(m * one != prod))
        if isinstance(other, int):
            return HPReal(self.mantissa * other, self.scale, self.err * abs(other))
        if isinstance(other, Fraction):
            num = self.mantissa * other.numerator
            m = _tdiv(num, other.denominator)
            err = _cdiv(self.err * abs(other.numerator), other.denominator)
            return HPReal(m, self.scale, err + int(m * other.denominator != num))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            if other == 0:
                raise ZeroDivisionError("HPReal division by zero")
            return self * Fraction(1, other)
        if isinstance(other, Fraction):
            if other == 0:
                raise ZeroDivisionError("HPReal division by zero")
            return self * (1 / other)
        if isinstance(other, HPReal):
            a, b = HPReal._align(self, other)
            if abs(b.mantissa) <= b.err:
                raise PrecisionError("divisor is not bounded away from zero")
            one = 10**a.scale
            num = a.mantissa * one
            m = _tdiv(num, b.mantissa)
            am, bm = abs(a.mantissa), abs(b.mantissa)
            err = _cdiv((a.err * bm + am * b.err) * one, bm * (bm - b.err))
            return HPReal(m, a.scale, err + int(m * b.mantissa != num))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return HPReal.from_rational(other, self.scale) / self
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = HPReal.from_rational(1, self.scale)
        for _ in range(k):
            result = result * self
        return result


# ---------------------------------------------------------------------------
# complex


def _as_hpreal(x, scale: int) -> HPReal:
    if isinstance(x, HPReal):
        return x.rescale(scale) if x.scale < scale else x
    return HPReal.from_rational(_as_fraction(x), scale)


@dataclass(frozen=True, slots=True)
class HPComplex:
    """Complex value whose parts are independently error-bounded HPReals."""

    re: HPReal
    im: HPReal

    @classmethod
    def coerce(cls, x, scale: int) -> "HPComplex":
        if isinstance(x, HPComplex):
            return x
        if isinstance(x, HPReal):
            return cls(x, HPReal.zero(x.scale))
        if isinstance(x, complex):
            return cls(
                HPReal.from_rational(Fraction(x.real), scale),
                HPReal.from_rational(Fraction(x.imag), scale),
            )
        g = GaussianRational.coerce(x)
        return cls(HPReal.from_rational(g.re, scale), HPReal.from_rational(g.im, scale))

    @property
    def scale(self) -> int:
        return max(self.re.scale, self.im.scale)

    @property
    def err_bound(self) -> Fraction:
        return max(self.re.err_bound, self.im.err_bound)

    def conjugate(self) -> "HPComplex":
        return HPComplex(self.re, -self.im)

    def abs_squared(self) -> HPReal:
        return self.re * self.re + self.im * self.im

    def modulus_upper(self) -> float:
        """Float upper bound on |true value| (slightly inflated for rounding)."""
        r = float(self.re.magnitude_bound())
        i = float(self.im.magnitude_bound())
        return math.hypot(r, i) * (1 + 1e-12) + 1e-300

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def _lift(self, other):
        if isinstance(other, HPComplex):
            return other
        if isinstance(other, (HPReal, int, Fraction, GaussianRational, complex)):
            return HPComplex.coerce(other, self.scale)
        return None

    def __neg__(self):
        return HPComplex(-self.re, -self.im)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return HPComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return HPComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, HPReal)):
            return HPComplex(self.re * other, self.im * other)
        if isinstance(other, GaussianRational):
            if other.im == 0:
                return self * other.re
            return HPComplex(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, HPComplex):
            return HPComplex(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, HPReal)):
            return HPComplex(self.re / other, self.im / other)
        if isinstance(other, GaussianRational):
            return self * other.reciprocal()
        if isinstance(other, HPComplex):
            den = other.abs_squared()
            num = self * other.conjugate()
            return HPComplex(num.re / den, num.im / den)
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = HPComplex.coerce(1, self.scale)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result


# ---------------------------------------------------------------------------
# operations


def central_binomial(k: int) -> int:
    """C(2k, k) by the running update c <- c*(4i+2)/(i+1)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    c = 1
    for i in range(k):
        c = c * (4 * i + 2) // (i + 1)
    return c


def accumulate(terms: Iterable[HPReal], digits: int) -> HPReal:
    """Sum ``terms`` left to right at ``digits`` plus guard digits.

    The returned error bound is the sum of the term bounds plus one ulp for
    every term that had to be truncated to the working scale.
    """
    terms = list(terms)
    scale = digits + guard_digits(max(len(terms), 1))
    mant, err = 0, 0
    for t in terms:
        t = t.rescale(scale) if t.scale != scale else t
        mant += t.mantissa
        err += t.err
    return HPReal(mant, scale, err, digits)


def pochhammer(a, k: int):
    """Rising factorial (a)_k = a (a+1) ... (a+k-1)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if isinstance(a, HPComplex):
        result = HPComplex.coerce(1, a.scale)
    elif isinstance(a, HPReal):
        result = HPReal.from_rational(1, a.scale)
    elif isinstance(a, GaussianRational):
        result = GaussianRational(1)
    else:
        a = _as_fraction(a)
        result = Fraction(1)
    for i in range(k):
        result = result * (a + i)
    return result


_TANGENT: list[int] = [0, 1]


def bernoulli_even(count: int) -> list[Fraction]:
    """[B_2, B_4, ..., B_{2*count}] from tangent numbers (integer recurrence)."""
    global _TANGENT
    if len(_TANGENT) <= count:
        n = max(count, 2 * (len(_TANGENT) - 1))
        t = [0] * (n + 1)
        t[1] = 1
        for k in range(2, n + 1):
            t[k] = (k - 1) * t[k - 1]
        for k in range(2, n + 1):
            for j in range(k, n + 1):
                t[j] = (j - k) * t[j - 1] + (j - k + 2) * t[j]
        _TANGENT = t
    out = []
    for k in range(1, count + 1):
        q = 4**k
        b = Fraction(2 * k * _TANGENT[k], q * (q - 1))
        out.append(b if k % 2 else -b)
    return out


def clear_caches() -> None:
    """Drop memoised Bernoulli data (used to time cold evaluations)."""
    global _TANGENT
    _TANGENT = [0, 1]


def _em_cutoff(s: int, w: int) -> int:
    # Small s: M ~ w balances the direct sum against the Bernoulli terms.
    # Large s: M**(1-s) alone is already below 10**-w.
    if s - 1 >= w + 2:
        return 2
    return max(2, min(w, math.ceil(10 ** ((w + 2) / (s - 1)))))


def zeta_reference(s: int, digits: int) -> HPReal:
    """zeta(s) from the defining sum with an Euler-Maclaurin tail.

    ``sum_{k<M} k^-s + M^(1-s)/(s-1) + M^-s/2 + sum_j B_2j/(2j)! (s)_{2j-1} M^(1-s-2j)``.
    Every even derivative of x^-s is positive, so the remainder after any
    number of correction terms is bounded by the first omitted one; the
    loop stops as soon as that term drops below 10^-(digits+guard).
    """
    if s < 2:
        raise ValueError("s must be >= 2")
    if digits < 1:
        raise ValueError("digits must be >= 1")
    w = digits + guard_digits(4 * digits + 50)
    _check_scale(w)
    one = 10**w
    threshold = Fraction(1, one)
    M = _em_cutoff(s, w)
    while True:
        total, err = 0, 0
        for k in range(1, M):
            q, r = divmod(one, k**s)
            total += q
            err += r != 0
        for tail in (Fraction(1, (s - 1) * M ** (s - 1)), Fraction(1, 2 * M**s)):
            q, r = divmod(tail.numerator * one, tail.denominator)
            total += q
            err += r != 0
        count = max(8, w // 2)
        bern = bernoulli_even(count)
        # T_j = B_2j/(2j)! * s(s+1)...(s+2j-2) / M^(s+2j-1)
        fact, rising, mpow = 2, s, M ** (s + 1)
        prev = None
        j = 1
        ok = False
        while True:
            if j > len(bern):
                count *= 2
                bern = bernoulli_even(count)
            term = bern[j - 1] * rising / (fact * mpow)
            mag = abs(term)
            if mag < threshold:
                err += _cdiv(mag.numerator * one, mag.denominator)
                ok = True
                break
            if prev is not None and mag >= prev:
                break
            q = _tdiv(term.numerator * one, term.denominator)
            total += q
            err += q * term.denominator != term.numerator * one
            prev = mag
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            fact *= (2 * j + 1) * (2 * j + 2)
            mpow *= M * M
            j += 1
        if ok:
            return HPReal(total, w, err, digits)
        M *= 2
