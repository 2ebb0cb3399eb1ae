"""Partitions and symmetric functions of the alphabet {1/1^s, ..., 1/(k-1)^s}."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exceptions import PoleError

__all__ = [
    "Partition",
    "SymValue",
    "SymmetricAccumulator",
    "partitions_of",
    "partition_count",
    "power_sum",
    "elementary",
    "complete",
    "partition_product",
    "ek_eval",
    "ek_series",
]


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError("partition parts must be positive")
        object.__setattr__(self, "parts", tuple(sorted(parts, reverse=True)))

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self):
        return f"{self.weight}=" + "+".join(map(str, self.parts))

    def power_label(self) -> str:
        """'P0', 'P2', 'P1^2', 'P1*P2' ... in the notation of the zeta tables."""
        if not self.parts:
            return "P0"
        counts: dict[int, int] = {}
        for p in self.parts:
            counts[p] = counts.get(p, 0) + 1
        return "*".join(
            f"P{p}" if c == 1 else f"P{p}^{c}" for p, c in sorted(counts.items())
        )


@dataclass(frozen=True)
class SymValue:
    kind: str  # "P", "e" or "h"
    r: int
    s: int
    k: int
    value: Fraction


def partitions_of(n: int) -> list[Partition]:
    """All partitions of n in reverse-lexicographic order: (4), (3,1), (2,2), ..."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out: list[Partition] = []

    def rec(remaining: int, largest: int, prefix: list[int]):
        if remaining == 0:
            out.append(Partition(tuple(prefix)))
            return
        for p in range(min(remaining, largest), 0, -1):
            prefix.append(p)
            rec(remaining - p, p, prefix)
            prefix.pop()

    rec(n, n, [])
    return out


@lru_cache(maxsize=None)
def partition_count(n: int) -> int:
    """p(n) by Euler's pentagonal recurrence."""
    if n < 0:
        return 0
    if n == 0:
        return 1
    total, j = 0, 1
    while True:
        g1 = j * (3 * j - 1) // 2
        if g1 > n:
            break
        sign = 1 if j % 2 else -1
        total += sign * partition_count(n - g1)
        g2 = j * (3 * j + 1) // 2
        if g2 <= n:
            total += sign * partition_count(n - g2)
        j += 1
    return total


class SymmetricAccumulator:
    """Degree-truncated e_r, h_r and P_r of a growing alphabet.

    Works with any ring elements supporting + and * (Fraction, HPReal ...).
    ``push(x)`` appends one letter; afterwards ``e[r]``, ``h[r]``, ``p[r]`` hold
    the symmetric functions of all letters pushed so far, for r <= degree.
    """

    def __init__(self, degree: int, zero=Fraction(0), one=Fraction(1)):
        self.degree = degree
        self.e = [one] + [zero] * degree
        self.h = [one] + [zero] * degree
        self.p = [one] + [zero] * degree

    def push(self, x) -> None:
        e, h, p = self.e, self.h, self.p
        for r in range(self.degree, 0, -1):
            e[r] = e[r] + x * e[r - 1]
        for r in range(1, self.degree + 1):
            h[r] = h[r] + x * h[r - 1]
        xr = x
        for r in range(1, self.degree + 1):
            p[r] = p[r] + xr
            if r < self.degree:
                xr = xr * x


def _alphabet(s: int, k: int):
    return (Fraction(1, j**s) for j in range(1, k))


def power_sum(r: int, s: int, k: int) -> Fraction:
    """P_r^(s)(k) = sum_{j<k} j^(-rs); P_0 = 1."""
    if r < 0 or s < 1 or k < 1:
        raise ValueError("need r >= 0, s >= 1, k >= 1")
    if r == 0:
        return Fraction(1)
    return sum((Fraction(1, j ** (r * s)) for j in range(1, k)), Fraction(0))


def elementary(r: int, s: int, k: int) -> Fraction:
    """[t^r] prod_{j<k} (1 + t/j^s)."""
    if r < 0:
        raise ValueError("r must be non-negative")
    if r > k - 1:
        return Fraction(0)
    acc = SymmetricAccumulator(r)
    for x in _alphabet(s, k):
        acc.push(x)
    return acc.e[r]


def complete(r: int, s: int, k: int) -> Fraction:
    """[t^r] prod_{j<k} 1/(1 - t/j^s)."""
    if r < 0 or k < 1:
        raise ValueError("need r >= 0, k >= 1")
    acc = SymmetricAccumulator(r)
    for x in _alphabet(s, k):
        acc.push(x)
    return acc.h[r]


def partition_product(alpha: Partition, s: int, k: int) -> Fraction:
    result = Fraction(1)
    for part in alpha.parts:
        result *= power_sum(part, s, k)
    return result


def ek_eval(k: int, x) -> Fraction:
    """E_k(x) = prod_{j<k} (j^4 + 4x)/(j^4 - x)."""
    if k < 1:
        raise ValueError("k must be positive")
    x = Fraction(x)
    result = Fraction(1)
    for j in range(1, k):
        j4 = j**4
        if x == j4:
            raise PoleError(f"E_{k} has a pole at x = {j4}")
        result *= (j4 + 4 * x) / (j4 - x)
    return result


def ek_series(k: int, order: int) -> list[Fraction]:
    """Taylor coefficients of E_k at 0, through x^order, via sum_r 4^r h_{n-r} e_r."""
    acc = SymmetricAccumulator(order)
    for x in _alphabet(4, k):
        acc.push(x)
    return [
        sum((4**r * acc.h[n - r] * acc.e[r] for r in range(n + 1)), Fraction(0))
        for n in range(order + 1)
    ]
