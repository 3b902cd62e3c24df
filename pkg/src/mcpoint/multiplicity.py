"""Multiplicities of newform factors in Jacobians of Borel-Cartan quotients.

For a quotient ``X(n0, n_ns)/K`` and a newform class ``f`` of level
``d0 * d_ns^2`` the multiplicity of ``A_f`` is

    m_f = sum over characters chi trivial on K of
          prod_{p^e || n_ns} (1/2 + 1/2 eps_f(p) chi(W_{p^e}))
        * prod_{p^e || n0}   ((v+1)/2 + eps_f(p) chi(W_{p^e}) (1 + (-1)^v)/4)

with ``v = val_p(n0/d0)`` and ``eps_f(p)`` the Atkin-Lehner sign of ``f`` at
the p-part of its level.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .curves import ALSubgroup, BorelCartanLevel, QuotientCurve, k_perp, valuation
from .newforms import NewformRecord, NewformStore

log = logging.getLogger(__name__)

# How to read eps_f(p) when p does not divide the level of f.
#   "trivial": +1, the eigenvalue of W_{p^0} = identity (default)
#   "strict":  only an explicit al_extended entry is accepted
UNRAMIFIED_POLICIES = ("trivial", "strict")


class MultiplicityError(ValueError):
    pass


@dataclass(frozen=True)
class IsogenyDecomposition:
    curve: QuotientCurve
    terms: Mapping[str, int]
    dims: Mapping[str, int]
    forms: tuple[NewformRecord, ...] = field(default=(), compare=False, repr=False)
    dropped: int = field(default=0, compare=False)

    @property
    def genus(self) -> int:
        return sum(m * self.dims[label] for label, m in self.terms.items())


def _local_factors(f: NewformRecord, level: BorelCartanLevel, policy: str):
    """Per prime-power index: (constant, coefficient of chi(W_q)) as Fractions."""
    d0, _ = level.split_level(f.level)
    out = []
    for pp in level.prime_powers:
        if pp.nonsplit:
            const, coef = Fraction(1, 2), Fraction(1, 2)
        else:
            v = valuation(level.n0 // d0, pp.p)
            const = Fraction(v + 1, 2)
            coef = Fraction(1, 2) if v % 2 == 0 else Fraction(0)
        if coef:
            coef *= epsilon(f, pp.p, policy)
        out.append((const, coef))
    return out


def epsilon(f: NewformRecord, p: int, policy: str = "trivial") -> int:
    """Atkin-Lehner sign of ``f`` at the prime ``p``."""
    if policy not in UNRAMIFIED_POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    if f.level % p == 0:
        q = p ** valuation(f.level, p)
        try:
            return f.al_signs[q]
        except KeyError:
            raise MultiplicityError(f"{f.label}: missing Atkin-Lehner sign at {q}") from None
    for q, s in f.al_extended.items():
        if q % p == 0:
            return s
    if policy == "strict":
        raise MultiplicityError(f"{f.label}: no sign for p={p}, which does not divide level {f.level}")
    return 1


def multiplicity(f: NewformRecord, level: BorelCartanLevel, K: ALSubgroup,
                 policy: str = "trivial") -> int:
    if K.level != level:
        raise MultiplicityError("subgroup belongs to a different level")
    if f.level not in level.relevant_levels():
        raise MultiplicityError(f"{f.label}: level {f.level} is not relevant for {level}")
    factors = _local_factors(f, level, policy)
    total = Fraction(0)
    for chi in k_perp(K):
        term = Fraction(1)
        for i, (const, coef) in enumerate(factors):
            term *= const + coef * chi.signs[i]
            if not term:
                break
        total += term
    if total.denominator != 1 or total < 0:
        raise MultiplicityError(f"{f.label}: multiplicity {total} is not a nonnegative integer")
    return int(total)


def decompose(curve: QuotientCurve, store: NewformStore, policy: str = "trivial") -> IsogenyDecomposition:
    level = curve.level
    terms: dict[str, int] = {}
    dims: dict[str, int] = {}
    forms = []
    dropped = 0
    for N in sorted(level.relevant_levels()):
        for f in store.newforms_of_level(N):
            m = multiplicity(f, level, curve.subgroup, policy)
            if m == 0:
                dropped += 1
                continue
            terms[f.label] = m
            dims[f.label] = f.dim
            forms.append(f)
    if dropped:
        log.debug("%s: %d newform classes with zero multiplicity", curve, dropped)
    return IsogenyDecomposition(curve, terms, dims, tuple(forms), dropped)
