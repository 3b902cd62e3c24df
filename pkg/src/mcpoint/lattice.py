"""Integer combinations of quotient Jacobians for a ``(Z/2)^r`` action.

Subgroups of ``(Z/2)^r`` are labelled by their canonical RREF basis (tuple of
bitmasks).  A :class:`FormalCombination` is an element of the Grothendieck
group spanned by the Jacobians ``J_W``; coefficients may be negative.

Relative to a basis ``b_1..b_r`` the central identity is

    J_{K + <b_1+...+b_s>} = (1+(-1)^s)/2 * J_K
                            + sum_{j=1..s} (-1)^(j+s) 2^(j-1) sum_{|I|=j} J_{K+I}

which lets every ``J_W`` be rewritten over the ``2^r`` subgroups ``<S>``,
``S`` a subset of the basis.  Genera and point counts are additive, so they
follow the same rewriting.
"""
from __future__ import annotations

from collections import Counter
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .curves import rref

Label = tuple[int, ...]


class LatticeError(ValueError):
    pass


class FormalCombination:
    """Finite integer combination of subgroup labels; zero coefficients are dropped."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Label, int] | Iterable[tuple[Label, int]] = ()):
        acc: Counter = Counter()
        items = terms.items() if isinstance(terms, Mapping) else terms
        for label, c in items:
            acc[tuple(label)] += c
        self.terms = {k: v for k, v in sorted(acc.items()) if v}

    def __add__(self, other: FormalCombination) -> FormalCombination:
        return FormalCombination(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self) -> FormalCombination:
        return FormalCombination({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: FormalCombination) -> FormalCombination:
        return self + (-other)

    def __mul__(self, n: int) -> FormalCombination:
        return FormalCombination({k: n * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, FormalCombination) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def __getitem__(self, label: Label) -> int:
        return self.terms.get(tuple(label), 0)

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient_sum(self) -> int:
        return sum(self.terms.values())

    def evaluate(self, values: Mapping[Label, int]) -> int:
        try:
            return sum(c * values[label] for label, c in self.terms.items())
        except KeyError as exc:
            raise LatticeError(f"no value for subgroup {exc.args[0]}") from None

    def __repr__(self) -> str:
        inner = ", ".join(f"{c:+d}*<{','.join(map(str, lab))}>" for lab, c in self.terms.items())
        return f"FormalCombination({inner})"


def label(vectors: Iterable[int], r: int) -> Label:
    return rref(list(vectors), r)


def expand_sum_element(r: int, K: Iterable[int], s: int,
                       basis: Sequence[int] | None = None) -> FormalCombination:
    """Rewrite ``J_{K + <b_1+...+b_s>}`` over the subgroups ``K + <I>``, ``I`` a subset of ``b_1..b_s``."""
    if not 0 <= s <= r:
        raise LatticeError(f"s={s} out of range 0..{r}")
    basis = list(basis) if basis is not None else [1 << i for i in range(r)]
    K = list(K)
    terms: list[tuple[Label, int]] = []
    lead = (1 + (-1) ** s) // 2
    if lead:
        terms.append((label(K, r), lead))
    for j in range(1, s + 1):
        coef = (-1) ** (j + s) * 2 ** (j - 1)
        for I in combinations(basis[:s], j):
            terms.append((label(K + list(I), r), coef))
    return FormalCombination(terms)


def _coordinate_table(basis: Sequence[int]) -> dict[int, int]:
    """Map each vector of the span to its coordinates (bitmask over basis indices)."""
    table = {0: 0}
    for i, b in enumerate(basis):
        table.update({v ^ b: m | 1 << i for v, m in list(table.items())})
    return table


def reduce_to_basis(r: int, W: Iterable[int], basis: Sequence[int] | None = None) -> FormalCombination:
    """Express ``J_W`` as an integer combination of ``J_<S>`` for subsets ``S`` of ``basis``.

    Labels of the result are RREF labels of ``<S>``; use :func:`subset_mask`
    to translate them back to subsets of the basis.
    """
    basis = list(basis) if basis is not None else [1 << i for i in range(r)]
    if len(basis) != r or len(rref(basis, r)) != r:
        raise LatticeError("B is not a basis")
    coords = _coordinate_table(basis)
    gens = list(label(W, r))
    # state: (pending generators as coordinate masks, collected basis-subset mask)
    states: Counter = Counter({(tuple(coords[g] for g in gens), 0): 1})
    done: Counter = Counter()
    while states:
        nxt: Counter = Counter()
        for (pending, collected), c in states.items():
            if not c:
                continue
            if not pending:
                done[collected] += c
                continue
            *rest, w = pending
            w &= ~collected
            rest = tuple(rest)
            if w == 0:
                nxt[(rest, collected)] += c
                continue
            support = [i for i in range(r) if w >> i & 1]
            s = len(support)
            if s == 1:
                nxt[(rest, collected | w)] += c
                continue
            lead = (1 + (-1) ** s) // 2
            if lead:
                nxt[(rest, collected)] += c * lead
            for j in range(1, s + 1):
                coef = (-1) ** (j + s) * 2 ** (j - 1)
                for I in combinations(support, j):
                    mask = sum(1 << i for i in I)
                    nxt[(rest, collected | mask)] += c * coef
        states = nxt
    return FormalCombination(
        (label([basis[i] for i in range(r) if S >> i & 1], r), c) for S, c in done.items())


def subset_mask(lab: Label, basis: Sequence[int], r: int) -> int:
    """Bitmask (over basis indices) of the subset ``S`` with ``<S>`` labelled ``lab``."""
    mask = 0
    for i, b in enumerate(basis):
        if rref(list(lab) + [b], r) == tuple(lab):
            mask |= 1 << i
    if label([basis[i] for i in range(len(basis)) if mask >> i & 1], r) != tuple(lab):
        raise LatticeError(f"subgroup {lab} is not generated by a subset of the basis")
    return mask


def _evaluate(data: Mapping[int, int], r: int, W: Iterable[int], basis: Sequence[int] | None, what: str) -> int:
    basis = list(basis) if basis is not None else [1 << i for i in range(r)]
    missing = [S for S in range(1 << r) if S not in data]
    if missing:
        raise LatticeError(f"basis data incomplete: missing subsets {missing}")
    comb = reduce_to_basis(r, W, basis)
    total = sum(c * data[subset_mask(lab, basis, r)] for lab, c in comb.terms.items())
    if total < 0:
        raise LatticeError(f"negative {what} {total}: inconsistent basis data")
    return total


def genus_from_basis(data: Mapping[int, int], r: int, W: Iterable[int],
                     basis: Sequence[int] | None = None) -> int:
    """Genus of ``X/W`` from the genera of ``X/<S>``; ``data`` is keyed by subset bitmask."""
    return _evaluate(data, r, W, basis, "genus")


def points_from_basis(data: Mapping[int, int], r: int, W: Iterable[int],
                      basis: Sequence[int] | None = None) -> int:
    """Point count of ``X/W`` over a fixed field from the counts of ``X/<S>``."""
    return _evaluate(data, r, W, basis, "point count")


def base_case_relation(g_x: int, g_sigma: int, g_tau: int, g_sum: int, g_both: int) -> bool:
    """Dimension shadow of ``J x J_{<s,t>}^2 ~ J_<s> x J_<t> x J_<s+t>``."""
    return g_x + 2 * g_both == g_sigma + g_tau + g_sum
