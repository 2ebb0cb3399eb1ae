"""Integer-relation detection and the lambda-basis rediscovery experiments."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Sequence

from .exceptions import PrecisionError
from .precision import HPReal, zeta_reference
from .series import LambdaSpec, lambda_sum
from .symfun import partition_count, partitions_of

__all__ = [
    "InsufficientPrecision",
    "Relation",
    "NoRelation",
    "DiscoveryBasis",
    "RowDiscovery",
    "lll_reduce",
    "integer_relation",
    "discovery_basis",
    "rediscover_row",
    "basis_values",
    "negative_search",
    "negative_search_zeta5",
    "append_ledger",
]

DELTA = Fraction(99, 100)
GUARD = 10


class InsufficientPrecision(PrecisionError):
    pass


@dataclass(frozen=True)
class Relation:
    coefficients: tuple[int, ...]
    residual: HPReal
    basis_labels: tuple[str, ...]
    digits: int

    @property
    def height(self) -> int:
        return max(abs(c) for c in self.coefficients)

    def __bool__(self):
        return True

    def normalized(self, index: int = 0, value: Fraction = Fraction(1)) -> list[Fraction]:
        """Coefficients of the other entries when entry ``index`` is moved to the left with weight ``value``.

        For c_0 v_0 + sum c_i v_i = 0 this returns a_i with value * v_0 = sum a_i v_i.
        """
        c0 = self.coefficients[index]
        if c0 == 0:
            raise ZeroDivisionError("that entry does not take part in the relation")
        return [-Fraction(c) * value / c0 for i, c in enumerate(self.coefficients) if i != index]

    def to_json(self) -> dict:
        return {
            "found": True,
            "coefficients": [int(c) for c in self.coefficients],
            "basis": list(self.basis_labels),
            "residual": self.residual.err_string() if self.residual.mantissa == 0 else str(float(self.residual.magnitude_bound())),
            "digits": self.digits,
            "height": self.height,
        }


@dataclass(frozen=True)
class NoRelation:
    """Nothing found; any relation has max |coefficient| >= height_bound."""

    height_bound: Fraction
    digits: int
    basis_labels: tuple[str, ...] = ()
    max_height: int | None = None

    def __bool__(self):
        return False

    @property
    def log10_bound(self) -> float:
        b = self.height_bound
        return math.log10(b.numerator) - math.log10(b.denominator) if b > 0 else -math.inf

    def to_json(self) -> dict:
        return {
            "found": False,
            "basis": list(self.basis_labels),
            "digits": self.digits,
            "max_height": self.max_height,
            "height_bound_log10": round(self.log10_bound, 3),
        }


# ---------------------------------------------------------------------------
# integral LLL (all quantities stay integers)


def lll_reduce(basis: list[list[int]], delta: Fraction = DELTA) -> tuple[list[list[int]], list[int]]:
    """Reduce independent integer row vectors in place of a copy.

    Returns the reduced basis and the Gram determinants d_0 = 1, d_1, ..., d_n,
    so that |b_i*|^2 = d_{i+1}/d_i.
    """
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    if n == 0:
        return b, [1]
    num, den = delta.numerator, delta.denominator

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    # 1-based bookkeeping as in the textbook algorithm; d[0] = 1
    d = [1] + [0] * n
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    d[1] = dot(b[0], b[0])
    k, kmax = 2, 1

    def red(k, l):
        dl = d[l]
        if 2 * abs(lam[k][l]) > dl:
            q = (2 * lam[k][l] + dl) // (2 * dl)
            bk, bl = b[k - 1], b[l - 1]
            for i in range(len(bk)):
                bk[i] -= q * bl[i]
            lam[k][l] -= q * dl
            for i in range(1, l):
                lam[k][i] -= q * lam[l][i]

    def swap(k):
        b[k - 1], b[k - 2] = b[k - 2], b[k - 1]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        B = (d[k - 2] * d[k] + lm * lm) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lm * t) // d[k - 1]
            lam[i][k - 1] = (B * t + lm * lam[i][k]) // d[k]
        d[k - 1] = B

    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = dot(b[k - 1], b[j - 1])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise ValueError("basis vectors are linearly dependent")
                    d[k] = u
        red(k, k - 1)
        if den * d[k] * d[k - 2] < num * d[k - 1] ** 2 - den * lam[k][k - 1] ** 2:
            swap(k)
            k = max(2, k - 1)
            continue
        for l in range(k - 2, 0, -1):
            red(k, l)
        k += 1
    return b, d


def _isqrt_fraction_lower(x: Fraction) -> Fraction:
    """A rational lower bound for sqrt(x), x >= 0."""
    if x <= 0:
        return Fraction(0)
    scale = 10**12
    return Fraction(math.isqrt(x.numerator * scale**2 // x.denominator), scale)


def _residual(values: Sequence[HPReal], coeffs: Sequence[int]) -> HPReal:
    total = HPReal.zero(max(v.scale for v in values))
    for c, v in zip(coeffs, values):
        if c:
            total = total + v * c
    return total


def _normalise(coeffs: Sequence[int]) -> tuple[int, ...]:
    g = reduce(math.gcd, (abs(c) for c in coeffs), 0) or 1
    cs = [c // g for c in coeffs]
    lead = next((c for c in cs if c), 0)
    if lead < 0:
        cs = [-c for c in cs]
    return tuple(cs)


def integer_relation(
    values: Sequence,
    d: int,
    max_height: int | None = None,
    labels: Sequence[str] | None = None,
) -> Relation | NoRelation:
    """Search for integers c (max |c_i| <= max_height) with sum c_i v_i = 0.

    Values are HPReal (or exact numbers) known to within 10^-d.  The default
    height is the largest one the precision can resolve, 10^((d-10)/n).  The lattice
    is [I | round(10^(d-10) v)] reduced with delta = 0.99.  A candidate is
    accepted only if the recomputed |sum c_i v_i| is below 10^-(d-10).  If
    nothing is accepted, every relation has height >= the returned bound.
    """
    n = len(values)
    if n < 2:
        raise ValueError("need at least two values")
    if d < 30:
        raise InsufficientPrecision("integer_relation needs d >= 30")
    if max_height is None:
        max_height = 10 ** ((d - GUARD) // n)
    if max_height < 1:
        raise ValueError("max_height must be positive")
    if n * math.log10(max_height) > d - GUARD:
        raise InsufficientPrecision(
            f"{d} digits cannot separate {n} values at height {max_height}; need about {n * math.log10(max_height) + GUARD:.0f}"
        )
    scale = d + 10
    hv = []
    for v in values:
        h = v if isinstance(v, HPReal) else HPReal.from_rational(Fraction(v), scale)
        if h.err_bound > Fraction(1, 10**d):
            raise InsufficientPrecision(f"value error {h.err_string()} exceeds 10^-{d}")
        hv.append(h)
    labels = tuple(labels) if labels is not None else tuple(f"v{i}" for i in range(n))
    M = 10 ** (d - GUARD)
    cols = []
    for h in hv:
        num = h.mantissa * M
        den = 10**h.scale
        cols.append((2 * num + den) // (2 * den))
    rows = [[1 if i == j else 0 for j in range(n)] + [cols[i]] for i in range(n)]
    reduced, dets = lll_reduce(rows)
    threshold = Fraction(1, 10 ** (d - GUARD))
    best = None
    for row in reduced:
        coeffs = row[:n]
        if not any(coeffs) or max(abs(c) for c in coeffs) > max_height:
            continue
        res = _residual(hv, coeffs)
        if res.magnitude_bound() < threshold:
            cand = _normalise(coeffs)
            if best is None or max(map(abs, cand)) < max(map(abs, best[0])):
                best = (cand, _residual(hv, cand))
    if best is not None:
        return Relation(best[0], best[1], labels, d)
    # any nonzero lattice vector is at least min |b_i*| long; a true relation of
    # height H gives one of length <= H sqrt(n (n+1))
    min_gs = min(Fraction(dets[i + 1], dets[i]) for i in range(n))
    bound = _isqrt_fraction_lower(min_gs / (n * (n + 1)))
    return NoRelation(bound, d, labels, max_height)


# ---------------------------------------------------------------------------
# lambda bases


@dataclass(frozen=True)
class DiscoveryBasis:
    n: int
    s: int
    target: str
    entries: tuple[LambdaSpec, ...]

    @property
    def target_weight(self) -> int:
        return self.s * self.n + 3

    @property
    def labels(self) -> tuple[str, ...]:
        return (self.target,) + tuple(e.label for e in self.entries)


def discovery_basis(n: int, s: int = 4) -> DiscoveryBasis:
    """Entries lambda(s j + 3, P_alpha), alpha a partition of n - j.

    Ordered by partition weight (so the first argument decreases), partitions
    of equal weight in reverse-lexicographic order.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if s not in (2, 4):
        raise ValueError("s must be 2 or 4")
    entries = []
    for w in range(n + 1):
        j = n - w
        for alpha in partitions_of(w):
            entries.append(LambdaSpec(s * j + 3, alpha, s))
    assert len(entries) == sum(partition_count(j) for j in range(n + 1))
    target = f"zeta({s * n + 3})"
    return DiscoveryBasis(n, s, target, tuple(entries))


@dataclass(frozen=True)
class RowDiscovery:
    basis: DiscoveryBasis
    result: Relation | NoRelation
    table: tuple[tuple[str, Fraction], ...] | None

    @property
    def found(self) -> bool:
        return bool(self.result) and self.table is not None

    @property
    def coefficients(self) -> tuple[Fraction, ...] | None:
        return None if self.table is None else tuple(c for _, c in self.table)

    def to_json(self) -> dict:
        out = self.result.to_json()
        out["target"] = self.basis.target
        out["n"] = self.basis.n
        out["s"] = self.basis.s
        if self.table is not None:
            out["table"] = [[label, str(c)] for label, c in self.table]
        return out


def basis_values(basis: DiscoveryBasis, d: int) -> list[HPReal]:
    vals = [zeta_reference(basis.target_weight, d)]
    vals += [lambda_sum(e, d) for e in basis.entries]
    return vals


def rediscover_row(n: int, d: int, s: int = 4, max_height: int = 10**8) -> RowDiscovery:
    """Find (2/5) zeta(s n + 3) as a rational combination of the basis entries."""
    basis = discovery_basis(n, s)
    need = 60 + 20 * len(basis.entries)
    if d < need:
        raise InsufficientPrecision(f"row n={n} needs at least {need} digits")
    rel = integer_relation(basis_values(basis, d), d, max_height, basis.labels)
    table = None
    if rel and rel.coefficients[0] != 0:
        coeffs = rel.normalized(0, Fraction(2, 5))
        table = tuple(zip((e.label for e in basis.entries), coeffs))
    return RowDiscovery(basis, rel, table)


def negative_search(m: int, d: int, max_height: int = 10**10) -> Relation | NoRelation:
    """Look for zeta(m) = (a/b) sum (-1)^(k+1)/(k^m C(2k,k))."""
    spec = LambdaSpec(m)
    values = [zeta_reference(m, d), lambda_sum(spec, d)]
    return integer_relation(values, d, max_height, (f"zeta({m})", spec.label))


def negative_search_zeta5(d: int = 100, max_height: int = 10**10) -> Relation | NoRelation:
    if d < 50:
        raise InsufficientPrecision("the zeta(5) search needs d >= 50")
    return negative_search(5, d, max_height)


def append_ledger(path, result, **extra) -> dict:
    """Append one JSON line describing ``result`` to ``path``; returns the record."""
    record = dict(result.to_json())
    record.update(extra)
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")
    return record
