import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padic_hl.sigcore import (
    Signature,
    concat,
    enumerate_signatures,
    interlace,
    negate,
    parse_signature,
    shift,
    stats,
    transform,
)

signatures = st.lists(st.integers(-4, 4), max_size=4).map(lambda xs: Signature(sorted(xs, reverse=True)))


def test_stats_examples():
    s = stats((2, 2, 0))
    assert (s.size, s.weighted, s.mults, s.length) == (4, 2, {2: 2, 0: 1}, 2)
    s = stats(())
    assert (s.size, s.weighted, s.mults, s.length) == (0, 0, {}, 0)
    s = stats((3, 1, -1))
    assert (s.size, s.weighted, s.mults) == (3, -1, {3: 1, 1: 1, -1: 1})


def test_interlace_examples():
    assert interlace("P", (1,), (2, 0))
    assert interlace("Q", (1, 0), (2, 1))
    assert not interlace("Q", (0, 0), (2, 2))
    assert not interlace("P", (3,), (2, 0))


def test_interlace_length_mismatch():
    with pytest.raises(ValueError):
        interlace("P", (1, 0), (2, 0))
    with pytest.raises(ValueError):
        interlace("Q", (1,), (2, 0))


def test_transform_examples():
    assert shift((1, 0), 2) == (3, 2)
    assert negate((2, 0)) == (0, -2)
    assert concat((3, 2), (1,)) == (3, 2, 1)
    assert transform((1, 0), "shift", 2) == (3, 2)
    assert transform((2, 0), "negate") == (0, -2)
    assert transform((3, 2), "concat", (1,)) == (3, 2, 1)


def test_concat_needs_resort_permission():
    with pytest.raises(ValueError):
        concat((1,), (3,))
    assert concat((1,), (3,), resort=True) == (3, 1)


def test_signature_rejects_increasing_parts():
    with pytest.raises(ValueError):
        Signature((0, 1))


def test_enumerate_examples():
    assert list(enumerate_signatures(2, 0, 1)) == [(1, 1), (1, 0), (0, 0)]
    assert list(enumerate_signatures(1, 0, 3, size=2)) == [(2,)]
    assert set(enumerate_signatures(3, 0, 2, size=3)) == {(2, 1, 0), (1, 1, 1)}


def test_enumerate_guard_is_an_error():
    with pytest.raises(ValueError):
        list(enumerate_signatures(10, 0, 10))
    with pytest.raises(ValueError):
        list(enumerate_signatures(2, 3, 1))


@pytest.mark.parametrize("n", [0, 1, 2, 3])
@pytest.mark.parametrize("low,high", [(0, 4), (-2, 2), (1, 1)])
def test_enumerate_matches_nested_loops(n, low, high):
    got = list(enumerate_signatures(n, low, high))
    brute = sorted(
        {Signature(c) for c in itertools.product(range(low, high + 1), repeat=n) if list(c) == sorted(c, reverse=True)},
        reverse=True,
    )
    assert got == brute
    assert len(set(got)) == len(got)
    for size in range(n * low, n * high + 1):
        assert list(enumerate_signatures(n, low, high, size=size)) == [s for s in brute if sum(s) == size]


def test_json_and_parse_round_trip():
    lam = Signature((3, 1, 0))
    assert lam.to_json() == [3, 1, 0]
    assert parse_signature("3,1,0") == lam
    assert parse_signature("(3,1,0)") == lam
    assert parse_signature("") == ()


@given(signatures, st.integers(-3, 3))
def test_shift_changes_size_by_length(lam, d):
    assert stats(shift(lam, d)).size == stats(lam).size + d * len(lam)


@given(signatures)
def test_negate_is_an_involution(lam):
    assert negate(negate(lam)) == lam
    assert stats(negate(lam)).size == -stats(lam).size


@pytest.mark.parametrize("n", [1, 2, 3])
def test_interlacing_matches_inequalities_exhaustively(n):
    for outer in enumerate_signatures(n, -1, 2):
        for inner in enumerate_signatures(n - 1, -1, 2):
            want = all(outer[i] >= inner[i] >= outer[i + 1] for i in range(n - 1))
            assert interlace("P", inner, outer) == want
        for inner in enumerate_signatures(n, -1, 2):
            want = all(outer[i] >= inner[i] for i in range(n)) and all(inner[i] >= outer[i + 1] for i in range(n - 1))
            assert interlace("Q", inner, outer) == want
