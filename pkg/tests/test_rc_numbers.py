import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sclforge.presentations import SequenceError, family_presentation
from sclforge.rc_numbers import (
    ALL_NUMBERS,
    EMPTY_SET,
    EVEN_NUMBERS,
    ODD_NUMBERS,
    CutEnumerator,
    MembershipOracle,
    MonotoneApprox,
    add_approx,
    cut_to_monotone,
    decimal_digits,
    oracle_from_list,
    rational_approx,
    specker_cut,
    specker_partial,
)

EVENS_LIMIT = Fraction(2, 3)  # geometric series over odd indices


def test_partial_sums_examples():
    assert specker_partial(EMPTY_SET, 4) == Fraction(15, 16)
    assert specker_partial(ALL_NUMBERS, 17) == 0
    assert specker_partial(EVEN_NUMBERS, 6) == Fraction(21, 32)


def test_partial_sums_monotone_and_bounded():
    prev = Fraction(0)
    for k in range(0, 30):
        cur = specker_partial(EVEN_NUMBERS, k)
        assert cur >= prev
        assert EVENS_LIMIT - cur <= Fraction(1, 2 ** k)
        prev = cur


def test_cut_values_strictly_above_limit():
    limits = {
        "empty": (EMPTY_SET, Fraction(1)),
        "all": (ALL_NUMBERS, Fraction(0)),
        "evens": (EVEN_NUMBERS, EVENS_LIMIT),
    }
    for oracle, limit in limits.values():
        cut = specker_cut(oracle)
        for j in range(1, 41):
            assert cut.rational(j) > limit
        assert cut.rational(40) - limit < Fraction(1, 2 ** 20)


def test_cut_to_monotone_spec_stream():
    cut = CutEnumerator.from_values(
        [Fraction(3, 2), Fraction(7, 5), Fraction(7, 5), Fraction(4, 3)]
    )
    mono = cut_to_monotone(cut, prefix=4)
    assert [mono.pair(i) for i in (1, 2, 3, 4)] == [(3, 2), (7, 5), (14, 10), (16, 12)]
    assert [mono.value(i) for i in (1, 2, 3, 4)] == [
        Fraction(3, 2),
        Fraction(7, 5),
        Fraction(7, 5),
        Fraction(4, 3),
    ]


def test_cut_to_monotone_constant_stream():
    mono = cut_to_monotone(CutEnumerator(lambda j: Fraction(1)))
    assert [mono.pair(i) for i in (1, 2, 3)] == [(1, 1), (2, 2), (3, 3)]


def test_cut_to_monotone_brackets_series_limit():
    mono = cut_to_monotone(specker_cut(EVEN_NUMBERS))
    v = mono.value(40)
    assert EVENS_LIMIT < v < EVENS_LIMIT + Fraction(1, 2 ** 20)


def test_cut_to_monotone_flags_non_positive():
    cut = CutEnumerator.from_values([Fraction(1, 2), Fraction(-1, 3)])
    mono = cut_to_monotone(cut, prefix=2)
    assert mono.pair(2)[0] < 0
    assert mono.warnings
    with pytest.raises(ValueError):
        mono.to_seq_pair()


def test_monotone_feeds_family_presentation():
    mono = cut_to_monotone(specker_cut(EVEN_NUMBERS), prefix=2)
    pres = family_presentation(mono.to_seq_pair(), l_override=1)
    assert pres.relator(2)


def test_rational_approx_examples():
    half = rational_approx(1, 2)
    assert [half.pair(i) for i in (1, 2, 3)] == [(1, 2), (2, 4), (3, 6)]
    zero = rational_approx(0, 1)
    assert [zero.pair(i) for i in (1, 2, 3)] == [(1, 1), (1, 2), (1, 3)]
    assert zero.value(1000) == Fraction(1, 1000)
    five_thirds = rational_approx(5, 3)
    assert [five_thirds.pair(i) for i in (1, 2, 3)] == [(5, 3), (10, 6), (15, 9)]
    with pytest.raises(ValueError):
        rational_approx(-1, 2)


def test_add_approx_examples():
    s = add_approx(rational_approx(1, 2), rational_approx(1, 3))
    assert all(s.value(i) == Fraction(5, 6) for i in range(1, 8))

    shifted = add_approx(rational_approx(1, 2), rational_approx(0, 1))
    for i in range(1, 8):
        assert shifted.value(i) == Fraction(1, 2) + Fraction(1, i)

    double = add_approx(
        cut_to_monotone(specker_cut(EVEN_NUMBERS)),
        cut_to_monotone(specker_cut(EVEN_NUMBERS)),
    )
    assert abs(double.value(40) - Fraction(4, 3)) <= Fraction(1, 2 ** 18)


def test_computable_target_error_bound():
    for oracle in (EMPTY_SET, EVEN_NUMBERS, ODD_NUMBERS, oracle_from_list([1, 2, 5])):
        limit = specker_partial(oracle, 80) + sum(
            Fraction(1, 2 ** i) for i in range(81, 400) if i not in oracle
        )
        mono = cut_to_monotone(specker_cut(oracle))
        for k in (5, 10, 20):
            assert Fraction(0) <= mono.value(k) - limit <= Fraction(1, 2 ** (k - 1))


finite_cuts = st.lists(
    st.fractions(min_value=Fraction(0), max_value=Fraction(50), max_denominator=40),
    min_size=1,
    max_size=30,
)


@given(finite_cuts)
@settings(max_examples=60)
def test_monotone_invariants_random_cuts(values):
    values = [v + Fraction(1, 97) for v in values]  # keep strictly positive
    mono = cut_to_monotone(CutEnumerator.from_values(values))
    prev_pair = None
    running = None
    for i in range(1, len(values) + 1):
        m, n = mono.pair(i)
        assert m >= 1 and n >= 1
        running = values[i - 1] if running is None else min(running, values[i - 1])
        assert mono.value(i) == running
        if prev_pair is not None:
            assert n > prev_pair[1]
            assert Fraction(m, n) <= Fraction(*prev_pair)
        prev_pair = (m, n)
    assert not mono.warnings


def test_long_random_stream_invariants():
    rng = random.Random(99)
    def produce(j):
        return Fraction(rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 4))
    mono = cut_to_monotone(CutEnumerator(produce))
    prev = None
    for i in range(1, 2001):
        m, n = mono.pair(i)
        if prev is not None:
            assert n > prev[1]
            assert Fraction(m, n) <= Fraction(*prev)
        prev = (m, n)


def test_decimal_digits():
    assert decimal_digits(Fraction(2, 3), 6) == "0.666666"
    assert decimal_digits(Fraction(-1, 8), 4) == "-0.1250"
    assert decimal_digits(Fraction(5), 2) == "5.00"
