"""Borel-Cartan levels, Atkin-Lehner-type subgroups, characters and table notation.

The Atkin-Lehner-type group of ``X(n0, n_ns)`` is ``(Z/2)^r``, one generator
``W_q`` per prime power ``q`` exactly dividing ``n = n0 * n_ns``.  Elements are
stored as int bitmasks: bit ``i`` stands for ``q_{i+1}``, with the prime powers
ordered by their underlying prime.  An exact divisor ``k`` of ``n`` is the
element whose bits mark the ``q_i`` dividing ``k``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from math import gcd, prod

MAX_RANK = 12


class CurveError(ValueError):
    pass


class NotationError(CurveError):
    pass


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization as ``[(p, e), ...]`` with ``p`` ascending."""
    if n < 1:
        raise CurveError(f"cannot factor {n}")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == [(n, 1)]


def prime_power(q: int) -> tuple[int, int] | None:
    """``(p, k)`` when ``q = p^k`` with ``k >= 1``, else None."""
    if q < 2:
        return None
    f = factorize(q)
    return f[0] if len(f) == 1 else None


# --- GF(2) helpers ---------------------------------------------------------

def rref(vectors, r: int) -> tuple[int, ...]:
    """Reduced row echelon basis of the span of ``vectors`` in GF(2)^r.

    The pivot of a row is its lowest set bit; rows are sorted by pivot and
    every pivot bit is cleared from the other rows, so the result depends on
    the span only.
    """
    rows: list[int] = []
    for v in vectors:
        if v >> r:
            raise CurveError(f"vector {v:#b} does not fit in rank {r}")
        for row in rows:
            if v & (row & -row):
                v ^= row
        if v:
            piv = v & -v
            rows = [row ^ v if row & piv else row for row in rows]
            rows.append(v)
    return tuple(sorted(rows, key=lambda x: x & -x))


def span(rows) -> list[int]:
    """All elements of the span, in increasing order."""
    elems = {0}
    for row in rows:
        elems |= {e ^ row for e in elems}
    return sorted(elems)


def enumerate_rref(r: int) -> list[tuple[int, ...]]:
    """Every subspace of GF(2)^r exactly once, as its canonical RREF basis."""
    if r > MAX_RANK:
        raise CurveError(f"rank {r} exceeds {MAX_RANK}")
    out = []
    for mask in range(1 << r):
        pivots = [i for i in range(r) if mask >> i & 1]
        free_slots = []
        for c in pivots:
            free_slots.append([j for j in range(c + 1, r) if not mask >> j & 1])
        choices = [range(1 << len(fs)) for fs in free_slots]
        for pick in product(*choices):
            rows = []
            for c, fs, bits in zip(pivots, free_slots, pick):
                row = 1 << c
                for t, j in enumerate(fs):
                    if bits >> t & 1:
                        row |= 1 << j
                rows.append(row)
            out.append(tuple(rows))
    out.sort(key=lambda rows: (len(rows), rows))
    return out


def galois_number(r: int) -> int:
    """Number of subspaces of GF(2)^r."""
    total = 0
    for k in range(r + 1):
        num = den = 1
        for i in range(k):
            num *= 2 ** (r - i) - 1
            den *= 2 ** (i + 1) - 1
        total += num // den
    return total


# --- levels ----------------------------------------------------------------

@dataclass(frozen=True)
class PrimePower:
    p: int
    e: int
    nonsplit: bool

    @property
    def q(self) -> int:
        return self.p**self.e


@dataclass(frozen=True)
class BorelCartanLevel:
    n0: int
    n_ns: int

    def __post_init__(self):
        if self.n0 < 1 or self.n_ns < 1:
            raise CurveError(f"levels must be positive, got ({self.n0},{self.n_ns})")
        if gcd(self.n0, self.n_ns) != 1:
            raise CurveError(f"n0={self.n0} and n_ns={self.n_ns} are not coprime")

    @property
    def n(self) -> int:
        return self.n0 * self.n_ns

    @cached_property
    def prime_powers(self) -> tuple[PrimePower, ...]:
        return tuple(PrimePower(p, e, self.n_ns % p == 0) for p, e in factorize(self.n))

    @property
    def r(self) -> int:
        return len(self.prime_powers)

    def encode(self, k: int) -> int:
        """Bitmask of the exact divisor ``k``."""
        if k < 1 or self.n % k or gcd(k, self.n // k) != 1:
            raise CurveError(f"{k} is not an exact divisor of {self.n}")
        return sum(1 << i for i, pp in enumerate(self.prime_powers) if k % pp.p == 0)

    def decode(self, mask: int) -> int:
        return prod(pp.q for i, pp in enumerate(self.prime_powers) if mask >> i & 1)

    def relevant_levels(self) -> set[int]:
        return {d0 * dns * dns for d0 in divisors(self.n0) for dns in divisors(self.n_ns)}

    def split_level(self, N: int) -> tuple[int, int]:
        """Write a relevant level ``N`` as ``d0 * d_ns^2`` with ``d0 | n0`` and ``d_ns | n_ns``."""
        d_ns = prod(pp.p ** (valuation(N, pp.p) // 2) for pp in self.prime_powers if pp.nonsplit)
        d0, rem = divmod(N, d_ns * d_ns)
        if rem or self.n0 % d0 or self.n_ns % d_ns:
            raise CurveError(f"{N} is not a relevant level of X({self.n0},{self.n_ns})")
        return d0, d_ns

    def __str__(self) -> str:
        return f"X({self.n0},{self.n_ns})"


def relevant_levels(level: BorelCartanLevel) -> set[int]:
    return level.relevant_levels()


@dataclass(frozen=True)
class SignCharacter:
    """Character of ``(Z/2)^r``, one sign per prime-power generator."""

    signs: tuple[int, ...]

    def __call__(self, mask: int) -> int:
        out = 1
        for i, s in enumerate(self.signs):
            if mask >> i & 1:
                out *= s
        return out


@dataclass(frozen=True)
class ALSubgroup:
    level: BorelCartanLevel
    rows: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", rref(self.rows, self.level.r))

    @classmethod
    def generated_by(cls, level: BorelCartanLevel, divisors_: list[int]) -> ALSubgroup:
        return cls(level, tuple(level.encode(k) for k in divisors_))

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def order(self) -> int:
        return 1 << self.rank

    @property
    def generators(self) -> tuple[int, ...]:
        """Canonical generators as exact divisors of n."""
        return tuple(self.level.decode(row) for row in self.rows)

    def elements(self) -> list[int]:
        return span(self.rows)

    def __contains__(self, mask: int) -> bool:
        return rref(self.rows + (mask,), self.level.r) == self.rows

    def issubgroup(self, other: ALSubgroup) -> bool:
        return all(row in other for row in self.rows)

    def sort_key(self) -> tuple:
        return (self.rank, self.rows)


def k_perp(K: ALSubgroup) -> list[SignCharacter]:
    """Characters trivial on ``K``, ordered lexicographically with ``+1`` before ``-1``."""
    r = K.level.r
    out = []
    for bits in product((0, 1), repeat=r):
        chi = SignCharacter(tuple(-1 if b else 1 for b in bits))
        if all(chi(row) == 1 for row in K.rows):
            out.append(chi)
    return out


def enumerate_subgroups(level: BorelCartanLevel) -> list[ALSubgroup]:
    return [ALSubgroup(level, rows) for rows in enumerate_rref(level.r)]


@dataclass(frozen=True)
class QuotientCurve:
    level: BorelCartanLevel
    subgroup: ALSubgroup = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.subgroup is None:
            object.__setattr__(self, "subgroup", ALSubgroup(self.level))
        if self.subgroup.level != self.level:
            raise CurveError("subgroup belongs to a different level")

    @classmethod
    def parse(cls, text: str) -> QuotientCurve:
        return parse_table_notation(text)

    def notation(self) -> str:
        return format_table_notation(self)

    def sort_key(self) -> tuple:
        return (self.level.n0, self.level.n_ns) + self.subgroup.sort_key()

    def __str__(self) -> str:
        return self.notation()


_NOTATION = re.compile(r"^\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*\{(.*)\}$")


def parse_table_notation(text: str) -> QuotientCurve:
    """Parse ``(n0,n_ns){i,j;k}`` with 1-based indices into the ordered prime powers.

    Whitespace and TeX-escaped braces (``\\{ ... \\}``) are accepted.
    """
    cleaned = text.strip().replace("\\{", "{").replace("\\}", "}")
    m = _NOTATION.match(cleaned)
    if not m:
        raise NotationError(f"malformed curve notation: {text!r}")
    level = BorelCartanLevel(int(m.group(1)), int(m.group(2)))
    body = m.group(3).strip()
    rows = []
    if body:
        for chunk in body.split(";"):
            parts = [s.strip() for s in chunk.split(",")]
            if not all(s.isdigit() for s in parts):
                raise NotationError(f"malformed generator {chunk.strip()!r} in {text!r}")
            idx = [int(s) for s in parts]
            if len(set(idx)) != len(idx):
                raise NotationError(f"repeated index in generator {chunk.strip()!r}")
            mask = 0
            for i in idx:
                if not 1 <= i <= level.r:
                    raise NotationError(f"index {i} out of range 1..{level.r} for {level}")
                mask |= 1 << (i - 1)
            rows.append(mask)
    return QuotientCurve(level, ALSubgroup(level, tuple(rows)))


def format_table_notation(c: QuotientCurve) -> str:
    gens = []
    for row in c.subgroup.rows:
        gens.append(",".join(str(i + 1) for i in range(c.level.r) if row >> i & 1))
    return f"({c.level.n0},{c.level.n_ns}){{{';'.join(gens)}}}"
