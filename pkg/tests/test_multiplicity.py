import random
from fractions import Fraction

import pytest

from mcpoint.curves import ALSubgroup, BorelCartanLevel, QuotientCurve, enumerate_subgroups, valuation
from mcpoint.multiplicity import MultiplicityError, decompose, epsilon, multiplicity
from mcpoint.newforms import NewformRecord
from mcpoint.points import count_points

import oracles


def fake_form(level, signs, ext=()):
    from mcpoint.curves import factorize
    al = {p**e: signs.get(p, 1) for p, e in factorize(level)} if level > 1 else {}
    return NewformRecord(f"{level}.2.a.x", level, 1, al, {}, dict(ext))


def explicit_factors(f, L):
    d0, _ = L.split_level(f.level)
    out = []
    for pp in L.prime_powers:
        eps = epsilon(f, pp.p)
        if pp.nonsplit:
            out.append((Fraction(1, 2), Fraction(eps, 2)))
        else:
            v = valuation(L.n0 // d0, pp.p)
            out.append((Fraction(v + 1, 2), Fraction(eps * (1 + (-1) ** v), 4)))
    return out


def random_case(rng):
    primes = rng.sample([2, 3, 5, 7, 11, 13], rng.randint(1, 4))
    n0 = n_ns = 1
    for p in primes:
        if rng.random() < 0.6:
            n0 *= p ** rng.randint(1, 3)
        else:
            n_ns *= p ** rng.randint(1, 2)
    L = BorelCartanLevel(n0, n_ns)
    N = rng.choice(sorted(L.relevant_levels()))
    f = fake_form(N, {p: rng.choice((1, -1)) for p in primes})
    return L, f


def test_trivial_subgroup_multiplicity_is_divisor_count():
    rng = random.Random(7)
    for _ in range(1000):
        L, f = random_case(rng)
        d0, _ = L.split_level(f.level)
        expected = 1
        for pp in L.prime_powers:
            if not pp.nonsplit:
                expected *= valuation(L.n0 // d0, pp.p) + 1
        assert multiplicity(f, L, ALSubgroup(L)) == expected
        flipped = fake_form(f.level, {q: -s for q, s in f.al_signs.items()})
        assert multiplicity(flipped, L, ALSubgroup(L)) == expected


def test_exhaustive_character_sum_agrees():
    rng = random.Random(11)
    for _ in range(300):
        L, f = random_case(rng)
        K = rng.choice(enumerate_subgroups(L))
        oracle = oracles.multiplicity_by_characters(L.r, K.elements(), explicit_factors(f, L))
        assert oracle.denominator == 1
        assert multiplicity(f, L, K) == oracle


def test_epsilon_policies():
    f = fake_form(11, {11: -1})
    assert epsilon(f, 11) == -1
    assert epsilon(f, 7) == 1
    with pytest.raises(MultiplicityError):
        epsilon(f, 7, "strict")
    g = fake_form(11, {11: -1}, ext={49: -1})
    assert epsilon(g, 7, "strict") == -1
    with pytest.raises(ValueError):
        epsilon(f, 7, "bogus")


def test_irrelevant_level_rejected():
    L = BorelCartanLevel(6, 7)
    with pytest.raises(MultiplicityError):
        multiplicity(fake_form(7, {7: 1}), L, ALSubgroup(L))


def test_genus_seven_companion_multiplicities(store):
    dec = decompose(QuotientCurve.parse("(6,7){2;3}"), store)
    assert dict(dec.terms) == {"98.2.a.b": 1, "147.2.a.d": 2, "294.2.a.e": 1}
    assert [dec.dims[k] for k in dec.terms] == [2, 2, 1]


def test_all_multiplicities_integral_on_covered_curves(store):
    from mcpoint.scanner import level_pairs
    checked = 0
    for pair in level_pairs(300):
        L = BorelCartanLevel(*pair)
        for K in enumerate_subgroups(L):
            dec = decompose(QuotientCurve(L, K), store)  # raises if any m_f is non-integral
            assert all(m > 0 for m in dec.terms.values())
            checked += 1
    assert checked > 1000


def borel_oracle(traces, N, K, p=None):
    L = BorelCartanLevel(N, 1)
    rows = traces[str(N)]["traces"]
    key = "1" if p is None else str(p)
    s = sum(rows[str(L.decode(w))][key] for w in K.elements())
    assert s % K.order == 0
    return s // K.order


def test_genus_and_counts_against_full_space_traces(store, al_traces):
    checked = 0
    for N in range(1, 201):
        if al_traces[str(N)]["dim"] == 0:
            continue
        L = BorelCartanLevel(N, 1)
        for K in enumerate_subgroups(L):
            dec = decompose(QuotientCurve(L, K), store)
            assert dec.genus == borel_oracle(al_traces, N, K), (N, K.rows)
            for p in (2, 3, 5, 7, 11, 13):
                if N % p:
                    count = count_points(dec, p, 1).count
                    assert count == p + 1 - borel_oracle(al_traces, N, K, p), (N, K.rows, p)
            checked += 1
    assert checked > 300
