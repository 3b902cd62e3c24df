from math import isqrt

import pytest

from mcpoint.curves import BorelCartanLevel, QuotientCurve, enumerate_subgroups
from mcpoint.multiplicity import decompose
from mcpoint.points import (PointCountError, count_points, hws_bound, l_polynomial_count,
                            nice_record_threshold, real_weil_poly_of_curve, smallest_nice_count)
from mcpoint.polynomial import IntPolynomial

from conftest import load_data


def test_hws_bound_values():
    assert hws_bound(12, 11, 5) == 170676
    assert hws_bound(7, 11, 5) == 166666
    assert hws_bound(2, 2, 1) == 7
    assert hws_bound(0, 3, 2) == 10


def test_two_routes_agree(store):
    for pair in [(6, 7), (1, 11), (35, 3), (13, 15)]:
        L = BorelCartanLevel(*pair)
        if not L.relevant_levels() <= store.coverage:
            continue
        for K in enumerate_subgroups(L):
            dec = decompose(QuotientCurve(L, K), store)
            for p in (2, 3, 5, 11, 13, 17, 19):
                if L.n % p == 0:
                    continue
                for k in (1, 2, 3):
                    res = count_points(dec, p, k)
                    assert res.count == l_polynomial_count(dec, p, k)
                    assert abs(res.count - p**k - 1) <= res.genus * isqrt(4 * p**k)


def test_real_weil_polynomial_consistent_with_count(store):
    dec = decompose(QuotientCurve.parse("(6,7){1,2;3}"), store)
    h = real_weil_poly_of_curve(dec, 11, 5)
    assert h == IntPolynomial([802, 1]) ** 7
    assert 11**5 + 1 + h[6] == count_points(dec, 11, 5).count


def test_bad_reduction_and_argument_errors(store):
    dec = decompose(QuotientCurve.parse("(6,7){}"), store)
    for p in (2, 3, 7):
        with pytest.raises(PointCountError, match="bad reduction"):
            count_points(dec, p, 1)
    with pytest.raises(PointCountError):
        count_points(dec, 4, 1)
    with pytest.raises(PointCountError):
        count_points(dec, 5, 0)


def test_genus_zero_curve(store):
    dec = decompose(QuotientCurve.parse("(11,1){1}"), store)
    assert dec.genus == 0
    res = count_points(dec, 2, 3)
    assert res.count == 9 and res.maximal


def test_cache_shared_across_subgroups(store):
    L = BorelCartanLevel(6, 7)
    cache = {}
    fresh = []
    for K in enumerate_subgroups(L):
        dec = decompose(QuotientCurve(L, K), store)
        fresh.append(count_points(dec, 11, 5).count)
        assert count_points(dec, 11, 5, cache).count == fresh[-1]
    assert len(cache) == sum(len(store.newforms_of_level(N)) for N in L.relevant_levels())


def test_nice_threshold():
    # M = q + 1 + 100 gives threshold q + 1 + ceil(100 / sqrt 2) = q + 1 + 71
    q = 11**2
    nice = nice_record_threshold(5, 11, 2, q + 1 + 100)
    assert not nice(q + 1 + 70) and nice(q + 1 + 71)
    assert smallest_nice_count(5, 11, 2, q + 1 + 100) == q + 1 + 71
    assert smallest_nice_count(5, 11, 2, q + 1) == q + 1
    with pytest.raises(PointCountError):
        nice_record_threshold(5, 11, 2, q)


def test_every_table_row_in_coverage(store):
    rows = load_data("best_counts.json")
    checked = 0
    for row in rows:
        curve = QuotientCurve.parse(row["curve"])
        if not curve.level.relevant_levels() <= store.coverage:
            continue
        dec = decompose(curve, store)
        res = count_points(dec, row["p"], row["k"])
        assert (res.genus, res.count) == (row["genus"], row["count"]), row
        checked += 1
    assert checked == 746
