import json
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_counts
from shorprob.closedform import ClosedFormTerms
from shorprob.errors import InvalidInput, ResourceLimit
from shorprob.numtheory import factorize
from shorprob.oracle import (
    OracleCensus,
    census,
    census_limit,
    census_range,
    element_record,
    iter_records,
    oracle_probabilities,
)


def test_element_record_examples():
    f = factorize(15)
    r = element_record(2, f)
    assert (r.order, r.half_power, r.success, r.factors_found) == (4, 4, True, {3, 5})
    r = element_record(14, f)
    assert (r.order, r.half_power, r.is_minus_one, r.success) == (2, 14, True, False)
    r = element_record(5, f)
    assert (r.gcd_with_n, r.order, r.success) == (5, None, False)


def test_element_record_range():
    with pytest.raises(InvalidInput):
        element_record(15, factorize(15))
    with pytest.raises(InvalidInput):
        element_record(-1, factorize(15))


def test_element_record_invariants():
    for n in range(2, 400):
        f = factorize(n)
        for r in iter_records(f):
            assert (r.order is not None) == (r.gcd_with_n == 1)
            assert (r.half_power is not None) == r.order_is_even
            if r.half_power is not None:
                assert r.half_power == pow(r.a, r.order // 2, n)
            assert r.success == (r.gcd_with_n == 1 and r.order_is_even and not r.is_minus_one)
            if r.success:
                assert r.factors_found
            for d in r.factors_found:
                assert 1 < d < n and n % d == 0


def test_record_json_shape():
    rec = element_record(2, factorize(15)).to_json()
    assert json.loads(json.dumps(rec)) == {
        "a": 2,
        "gcd_with_n": 1,
        "order": 4,
        "order_is_even": True,
        "half_power": 4,
        "is_minus_one": False,
        "success": True,
        "factors_found": [3, 5],
    }


@pytest.mark.parametrize(
    "n, coprime, even, minus, success",
    [(15, 8, 7, 1, 6), (12, 4, 3, 1, 2), (2, 1, 0, 0, 0)],
)
def test_census_examples(n, coprime, even, minus, success):
    c = census(factorize(n))
    assert (c.coprime_count, c.even_order_count, c.minus_one_count, c.success_count) == (
        coprime,
        even,
        minus,
        success,
    )
    assert c.total == n


def test_census_matches_naive_enumeration():
    for n in range(2, 700):
        c = census(factorize(n))
        assert (c.coprime_count, c.even_order_count, c.minus_one_count, c.success_count) == naive_counts(n)


def test_census_matches_records():
    for n in range(2, 300):
        f = factorize(n)
        recs = list(iter_records(f))
        c = census(f)
        assert c.success_count == sum(r.success for r in recs)
        assert c.minus_one_count == sum(r.is_minus_one for r in recs)
        assert c.gcd_shortcut_count == sum(1 < r.gcd_with_n < n for r in recs)


def test_census_invariants():
    for n in range(2, 2000):
        f = factorize(n)
        c = census(f)
        assert c.odd_order_count + c.even_order_count == c.coprime_count
        assert c.success_count == c.even_order_count - c.minus_one_count
        assert c.gcd_shortcut_count == n - c.coprime_count - 1
        t = ClosedFormTerms.of(f)
        assert c.odd_order_count == t.mprime_product


def test_census_limit(monkeypatch):
    with pytest.raises(ResourceLimit):
        census(factorize(101), limit=100)
    monkeypatch.setenv("SHOR_CENSUS_LIMIT", "50")
    assert census_limit() == 50
    with pytest.raises(ResourceLimit):
        census(factorize(51))
    monkeypatch.setenv("SHOR_CENSUS_LIMIT", "lots")
    with pytest.raises(InvalidInput):
        census_limit()


def test_merge_requires_same_n():
    with pytest.raises(InvalidInput):
        OracleCensus(3) + OracleCensus(4)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 20_000), st.integers(1, 5000))
def test_partition_independence(n, chunk):
    f = factorize(n)
    assert census(f, chunk_size=chunk) == census(f)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5000), st.data())
def test_merge_is_addition_over_any_split(n, data):
    f = factorize(n)
    cuts = sorted(data.draw(st.lists(st.integers(0, n), max_size=5)))
    bounds = [0, *cuts, n]
    parts = [census_range(f, lo, hi) for lo, hi in zip(bounds, bounds[1:])]
    total = OracleCensus(n)
    for p in reversed(parts):
        total = p + total
    assert total == census(f)


def test_process_pool_matches_serial():
    f = factorize(2 * 3 * 5 * 7 * 11 * 13)
    serial = census(f)
    assert census(f, workers=2, chunk_size=1000) == serial
    assert census(f, workers=3, chunk_size=4097) == serial


def test_scalar_path_for_huge_moduli():
    # moduli past the int64 batch limit go element by element
    from shorprob.oracle import _census_batch, _census_scalar

    for n in (97, 360, 1001, 4096):
        f = factorize(n)
        assert _census_scalar(f, 0, n) == _census_batch(f, 0, n)
    big = factorize((2**31 - 1) * 3)
    part = census_range(big, 0, 200)
    assert part.total == 200 and part.coprime_count == sum(
        1 for a in range(200) if math.gcd(a, big.n) == 1
    )


def test_oracle_probabilities_examples():
    p = oracle_probabilities(census(factorize(15)))
    assert p.as_tuple() == (F(8, 15), F(7, 8), F(6, 7), F(2, 5))
    p = oracle_probabilities(census(factorize(2)))
    assert p.as_tuple() == (F(1, 2), F(0), F(0), F(0))
    assert oracle_probabilities(census(factorize(9))).p_good_given_even == 0
