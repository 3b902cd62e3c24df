"""Genus, point counts over F_{p^k}, real Weil polynomials and maximality."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .curves import QuotientCurve, is_prime
from .multiplicity import IsogenyDecomposition
from .polynomial import (IntPolynomial, dickson_lift, frobenius_l_factor,
                         power_sums_of, real_weil_polynomial)


class PointCountError(ValueError):
    pass


@dataclass(frozen=True)
class CountResult:
    curve: QuotientCurve
    genus: int
    p: int
    k: int
    count: int
    trace_sum: int
    maximal: bool
    hws_bound: int

    @property
    def q(self) -> int:
        return self.p**self.k

    def summary(self) -> str:
        return (f"curve={self.curve.notation()} genus={self.genus} q={self.p}^{self.k} "
                f"count={self.count} bound={self.hws_bound} maximal={str(self.maximal).lower()}")


def genus(dec: IsogenyDecomposition) -> int:
    return dec.genus


def hws_bound(g: int, p: int, k: int) -> int:
    """Hasse-Weil-Serre bound ``q + 1 + g * floor(2 sqrt q)`` with ``q = p^k``."""
    q = p**k
    return q + 1 + g * isqrt(4 * q)


def _check_args(dec: IsogenyDecomposition, p: int, k: int) -> None:
    if not is_prime(p):
        raise PointCountError(f"{p} is not prime")
    if k < 1:
        raise PointCountError(f"extension degree must be positive, got {k}")
    n = dec.curve.level.n
    if n % p == 0:
        raise PointCountError(f"bad reduction: p={p} divides n={n} for {dec.curve}")


def trace_sum(dec: IsogenyDecomposition, p: int, k: int, cache: dict | None = None) -> int:
    """``sum_f m_f * S_k(f)``; ``cache`` maps (label, p, k) to S_k and may be shared."""
    total = 0
    for f in dec.forms:
        key = (f.label, p, k)
        if cache is not None and key in cache:
            s = cache[key]
        else:
            s = dickson_lift(f.charpoly(p), p, k)
            if cache is not None:
                cache[key] = s
        total += dec.terms[f.label] * s
    return total


def count_points(dec: IsogenyDecomposition, p: int, k: int, cache: dict | None = None) -> CountResult:
    _check_args(dec, p, k)
    g = dec.genus
    t = trace_sum(dec, p, k, cache)
    q = p**k
    count = q + 1 - t
    bound = hws_bound(g, p, k)
    if abs(count - q - 1) > g * isqrt(4 * q):
        raise PointCountError(f"{dec.curve}: count {count} over F_{p}^{k} violates the Hasse-Weil-Serre bound")
    return CountResult(dec.curve, g, p, k, count, t, count == bound, bound)


def l_polynomial_count(dec: IsogenyDecomposition, p: int, k: int) -> int:
    """Point count via power sums of the degree-2g L-polynomial (independent route)."""
    _check_args(dec, p, k)
    L = IntPolynomial([1])
    for f in dec.forms:
        L = L * frobenius_l_factor(f.charpoly(p), p) ** dec.terms[f.label]
    if L.degree == 0:
        return p**k + 1
    return p**k + 1 - power_sums_of(L, k)


def nice_record_threshold(g: int, p: int, k: int, upper_bound: int):
    """Predicate deciding whether a count is a nice record against ``upper_bound``.

    ``count`` is nice iff ``count >= q + 1 + (M - q - 1)/sqrt 2``, evaluated as
    ``2 (count - q - 1)^2 >= (M - q - 1)^2`` with ``count >= q + 1``.
    """
    q = p**k
    gap = upper_bound - q - 1
    if gap < 0:
        raise PointCountError(f"upper bound {upper_bound} is below q+1 = {q + 1}")

    def is_nice(count: int) -> bool:
        excess = count - q - 1
        return excess >= 0 and 2 * excess * excess >= gap * gap

    return is_nice


def smallest_nice_count(g: int, p: int, k: int, upper_bound: int) -> int:
    q = p**k
    gap = upper_bound - q - 1
    nice = nice_record_threshold(g, p, k, upper_bound)
    # ceil(gap / sqrt 2) = ceil(sqrt(gap^2 / 2))
    half = Fraction(gap * gap, 2)
    excess = isqrt(half.numerator // half.denominator)
    while not nice(q + 1 + excess):
        excess += 1
    return q + 1 + excess


def real_weil_poly_of_curve(dec: IsogenyDecomposition, p: int, k: int) -> IntPolynomial:
    _check_args(dec, p, k)
    out = IntPolynomial([1])
    for f in dec.forms:
        out = out * real_weil_polynomial(f.charpoly(p), p, k) ** dec.terms[f.label]
    return out
