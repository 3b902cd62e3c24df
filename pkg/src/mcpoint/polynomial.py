"""Exact integer polynomials and the Frobenius power sums built from them.

Everything here works on Python ints and :class:`fractions.Fraction`; no
floating point is used anywhere.  A Hecke characteristic polynomial ``C`` of
degree ``d`` stands for the ``d`` Galois conjugates ``a`` of an eigenvalue
``a_p``; each conjugate contributes a Frobenius pair ``alpha, beta`` with
``alpha + beta = a`` and ``alpha * beta = p``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence


class PolynomialError(ValueError):
    pass


@dataclass(frozen=True)
class IntPolynomial:
    """Dense univariate polynomial, coefficients in ascending degree."""

    coeffs: tuple[int, ...] = ()

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> IntPolynomial:
        out = cls([1])
        for r in roots:
            out = out * cls([-r, 1])
        return out

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return self.leading == 1

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: IntPolynomial) -> IntPolynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial(self[i] + other[i] for i in range(n))

    def __neg__(self) -> IntPolynomial:
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: IntPolynomial) -> IntPolynomial:
        return self + (-other)

    def __mul__(self, other) -> IntPolynomial:
        if isinstance(other, int):
            return IntPolynomial(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> IntPolynomial:
        if n < 0:
            raise PolynomialError("negative exponent")
        out, base = IntPolynomial([1]), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def to_list(self) -> list[int]:
        return list(self.coeffs)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = "x" if i == 1 else f"x^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


def _require_monic(C: IntPolynomial) -> int:
    if C.degree < 1:
        raise PolynomialError(f"expected a monic polynomial of degree >= 1, got {C}")
    if not C.is_monic():
        raise PolynomialError(f"polynomial is not monic: {C}")
    return C.degree


def newton_power_sums(C: IntPolynomial, max_j: int) -> list[int]:
    """Power sums ``p_1 .. p_max_j`` of the roots of the monic polynomial ``C``."""
    d = _require_monic(C)
    # elementary symmetric functions e_0..e_d of the roots
    e = [(-1) ** i * C[d - i] for i in range(d + 1)]
    p = [d]
    for k in range(1, max_j + 1):
        acc = 0
        for i in range(1, min(k, d + 1)):
            acc += (-1) ** (i - 1) * e[i] * p[k - i]
        if k <= d:
            acc += (-1) ** (k - 1) * k * e[k]
        p.append(acc)
    return p[1:]


def polynomial_from_power_sums(sums: Sequence[int]) -> IntPolynomial:
    """Monic polynomial of degree ``len(sums)`` whose roots have the given power sums.

    Raises if a coefficient comes out non-integral.
    """
    d = len(sums)
    e = [Fraction(1)]
    for m in range(1, d + 1):
        acc = Fraction(0)
        for i in range(1, m + 1):
            acc += (-1) ** (i - 1) * e[m - i] * sums[i - 1]
        e.append(acc / m)
    coeffs = [0] * (d + 1)
    for i, val in enumerate(e):
        if val.denominator != 1:
            raise PolynomialError(f"non-integral elementary symmetric function e_{i} = {val}")
        coeffs[d - i] = (-1) ** i * int(val)
    return IntPolynomial(coeffs)


@lru_cache(maxsize=4096)
def dickson_coefficients(p: int, k: int) -> tuple[int, ...]:
    """Coefficients of ``s_k(a) = alpha^k + beta^k`` as a polynomial in ``a = alpha + beta``.

    ``s_0 = 2``, ``s_1 = a``, ``s_k = a*s_{k-1} - p*s_{k-2}``.
    """
    if k < 0:
        raise PolynomialError("k must be nonnegative")
    prev, cur = IntPolynomial([2]), IntPolynomial([0, 1])
    if k == 0:
        return prev.coeffs
    x = IntPolynomial([0, 1])
    for _ in range(k - 1):
        prev, cur = cur, x * cur - prev * p
    return cur.coeffs


def _sum_over_roots(C: IntPolynomial, f: Sequence[int], sums: Sequence[int]) -> int:
    """``sum_a f(a)`` over the roots of ``C``; ``sums[j-1]`` is the j-th power sum."""
    total = f[0] * C.degree if f else 0
    for j in range(1, len(f)):
        total += f[j] * sums[j - 1]
    return total


def dickson_lift(C: IntPolynomial, p: int, k: int) -> int:
    """Sum of ``alpha^k + beta^k`` over all conjugate Frobenius pairs attached to ``C``."""
    d = _require_monic(C)
    if k < 0:
        raise PolynomialError("k must be nonnegative")
    if k == 0:
        return 2 * d
    sums = newton_power_sums(C, k)
    return _sum_over_roots(C, dickson_coefficients(p, k), sums)


def frobenius_l_factor(C: IntPolynomial, p: int) -> IntPolynomial:
    """``x^d * C(x + p/x)``, i.e. the product of ``x^2 - a x + p`` over the roots of ``C``."""
    d = _require_monic(C)
    out = IntPolynomial()
    shift = IntPolynomial([p, 0, 1])
    for i, c in enumerate(C.coeffs):
        if c:
            out = out + (shift ** i) * IntPolynomial([0] * (d - i) + [c])
    return out


def real_weil_polynomial(C: IntPolynomial, p: int, k: int) -> IntPolynomial:
    """Monic polynomial whose roots are ``s_k(a)`` for the roots ``a`` of ``C``."""
    d = _require_monic(C)
    if k < 1:
        raise PolynomialError("k must be positive")
    if k == 1:
        return C
    s = IntPolynomial(dickson_coefficients(p, k))
    sums = newton_power_sums(C, k * d)
    image_sums = []
    power = IntPolynomial([1])
    for _ in range(d):
        power = power * s
        image_sums.append(_sum_over_roots(C, power.coeffs, sums))
    return polynomial_from_power_sums(image_sums)


def power_sums_of(poly: IntPolynomial, k: int) -> int:
    """k-th power sum of the roots of a monic polynomial (``k >= 0``)."""
    if k == 0:
        return poly.degree
    return newton_power_sums(poly, k)[-1]


# --- exact root location ---------------------------------------------------

def _primitive(cs: list[int]) -> list[int]:
    g = 0
    for c in cs:
        g = gcd(g, c)
    return [c // g for c in cs] if g > 1 else cs


def _positive_prem(a: list[int], b: list[int]) -> list[int]:
    """Remainder of ``m*a`` by ``b`` for some positive integer ``m``, made primitive."""
    a = list(a)
    lb = b[-1]
    sb = 1 if lb > 0 else -1
    while len(a) >= len(b) and a:
        la = a[-1]
        shift = len(a) - len(b)
        a = [c * abs(lb) for c in a]
        for i, c in enumerate(b):
            a[shift + i] -= sb * la * c
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return _primitive(a)


def _sturm_sequence(f: list[int]) -> list[list[int]]:
    seq = [f, _primitive([i * c for i, c in enumerate(f)][1:])]
    while len(seq[-1]) > 1:
        r = _positive_prem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _sign_at(poly: list[int], x) -> int:
    if x is None or isinstance(x, str):
        s = 1 if poly[-1] > 0 else -1
        if x == "-inf" and (len(poly) - 1) % 2:
            s = -s
        return s
    acc = Fraction(0)
    for c in reversed(poly):
        acc = acc * x + c
    return (acc > 0) - (acc < 0)


def count_real_roots(P: IntPolynomial, lo=None, hi=None) -> int:
    """Number of distinct real roots in ``(lo, hi]``; ``None`` means -inf / +inf.

    Sturm sequence built from integer pseudo-remainders (positive multipliers
    only, so signs are preserved).
    """
    f = list(P.coeffs)
    if len(f) <= 1:
        return 0
    seq = _sturm_sequence(f)
    if len(seq[-1]) > 1:
        # repeated roots: restart from the squarefree part
        g = IntPolynomial(seq[-1])
        return count_real_roots(IntPolynomial(_exact_quotient(f, list(g.coeffs))), lo, hi)

    def variations(x) -> int:
        signs = [s for s in (_sign_at(q, x) for q in seq) if s]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    return variations("-inf" if lo is None else Fraction(lo)) - variations("+inf" if hi is None else Fraction(hi))


def _exact_quotient(a: list[int], b: list[int]) -> list[int]:
    """Primitive integer polynomial proportional to ``a / b``."""
    a = [Fraction(c) for c in a]
    out = [Fraction(0)] * (len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        out[shift] = factor
        for i, c in enumerate(b):
            a[shift + i] -= factor * c
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    if a:
        raise PolynomialError("inexact polynomial division")
    den = 1
    for c in out:
        den = den * c.denominator // gcd(den, c.denominator)
    return _primitive([int(c * den) for c in out])


def taylor_shift(P: IntPolynomial, t: int) -> IntPolynomial:
    """``P(x + t)``."""
    cs = list(P.coeffs)
    n = len(cs)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            cs[j] += t * cs[j + 1]
    return IntPolynomial(cs)


def sign_changes(P: IntPolynomial) -> int:
    signs = [c > 0 for c in P.coeffs if c]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def squared_roots_polynomial(C: IntPolynomial) -> IntPolynomial:
    """Monic polynomial whose roots are the squares of the roots of monic ``C``."""
    d = _require_monic(C)
    even = IntPolynomial(C.coeffs[0::2])
    odd = IntPolynomial(C.coeffs[1::2])
    y = IntPolynomial([0, 1])
    return (even * even - y * odd * odd) * (-1) ** d


def is_totally_real(C: IntPolynomial) -> bool:
    distinct = count_real_roots(C)
    seq = _sturm_sequence(list(C.coeffs))
    n_distinct = C.degree - (len(seq[-1]) - 1 if len(seq[-1]) > 1 else 0)
    return distinct == n_distinct


def check_weil_bound(C: IntPolynomial, p: int) -> None:
    """Raise unless every root of ``C`` is real and lies in ``[-2 sqrt p, 2 sqrt p]``."""
    _require_monic(C)
    if not is_totally_real(C):
        raise PolynomialError(f"{C} has non-real roots")
    # all roots a real => roots a^2 - 4p of the shifted polynomial are real,
    # so Descartes' rule counts the positive ones exactly
    if sign_changes(taylor_shift(squared_roots_polynomial(C), 4 * p)):
        raise PolynomialError(f"{C} has a root outside [-2*sqrt({p}), 2*sqrt({p})]")
