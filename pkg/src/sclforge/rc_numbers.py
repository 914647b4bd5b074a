"""Rational enumeration streams for right-computable targets.

A number is handled through the set of rationals strictly above it: a cut
enumerator emits such rationals (repetitions allowed), and the conversion
below turns the running minimum into a stream of unreduced pairs ``(m, n)``
with strictly increasing ``n`` and non-increasing value, which is exactly
the input shape the relator family consumes. Everything is an exact
Fraction; indices start at 1.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .presentations import SeqPair, SequenceError


class MembershipOracle:
    """Total decision function for a subset of the positive integers."""

    def __init__(self, decide: Callable[[int], bool], name: str = ""):
        self._decide = decide
        self.name = name

    def __contains__(self, i: int) -> bool:
        return bool(self._decide(i))

    def __repr__(self) -> str:
        return f"MembershipOracle({self.name or '...'})"


EMPTY_SET = MembershipOracle(lambda i: False, "empty")
ALL_NUMBERS = MembershipOracle(lambda i: True, "all")
EVEN_NUMBERS = MembershipOracle(lambda i: i % 2 == 0, "evens")
ODD_NUMBERS = MembershipOracle(lambda i: i % 2 == 1, "odds")


def oracle_from_list(items) -> MembershipOracle:
    s = frozenset(items)
    return MembershipOracle(lambda i: i in s, f"list:{sorted(s)}")


class CutEnumerator:
    """Memoized stream ``j -> q_j`` of rationals above a hidden target."""

    def __init__(self, produce: Callable[[int], Fraction], name: str = ""):
        self._produce = produce
        self._memo: list[Fraction] = []
        self.name = name

    def rational(self, j: int) -> Fraction:
        if j < 1:
            raise ValueError("cut indices start at 1")
        while len(self._memo) < j:
            q = Fraction(self._produce(len(self._memo) + 1))
            self._memo.append(q)
        return self._memo[j - 1]

    def running_min(self, j: int) -> Fraction:
        return min(self.rational(i) for i in range(1, j + 1))

    @classmethod
    def from_values(cls, values, name: str = "") -> "CutEnumerator":
        values = [Fraction(v) for v in values]

        def produce(j: int) -> Fraction:
            if j > len(values):
                raise ValueError(f"finite cut of length {len(values)} exhausted")
            return values[j - 1]

        return cls(produce, name=name)


class MonotoneApprox(SeqPair):
    """Pair stream with the same invariants as SeqPair plus value helpers.

    Non-positive running values are recorded in ``warnings`` and the raw
    pairs are still produced; ``to_seq_pair`` refuses such streams since
    downstream constructions need positive entries.
    """

    def __init__(self, produce, name: str = ""):
        super().__init__(produce, name=name)
        self.warnings: list[str] = []

    def _check(self, j, m, n):
        if n < 1:
            raise SequenceError(j, f"denominator {n} is not positive")
        if m < 1:
            self.warnings.append(f"index {j}: non-positive numerator {m}")
        if self._memo:
            pm, pn = self._memo[-1]
            if n <= pn:
                raise SequenceError(j, f"n must increase strictly ({pn} then {n})")
            if Fraction(m, n) > Fraction(pm, pn):
                raise SequenceError(j, f"value increased ({pm}/{pn} then {m}/{n})")

    def to_seq_pair(self) -> SeqPair:
        if self.warnings:
            raise ValueError(f"stream produced non-positive values: {self.warnings[0]}")
        return SeqPair(self.pair, name=self.name)


# ---------------------------------------------------------------------------
# geometric-series targets from a membership oracle
# ---------------------------------------------------------------------------


def specker_partial(oracle: MembershipOracle, k: int) -> Fraction:
    """Partial sum over indices ``1..k`` outside the set, weight ``2^-i``."""
    if k < 0:
        raise ValueError("depth must be >= 0")
    total = Fraction(0)
    for i in range(1, k + 1):
        if i not in oracle:
            total += Fraction(1, 2 ** i)
    return total


def specker_cut(oracle: MembershipOracle) -> CutEnumerator:
    """Enumerate rationals strictly above the series limit.

    Term ``j`` is the depth-``j`` partial sum plus the tail bound ``2^-j``
    plus a vanishing strictness margin, so every value lies strictly above
    the limit and the infimum equals it.
    """

    def produce(j: int) -> Fraction:
        return specker_partial(oracle, j) + Fraction(1, 2 ** j) + Fraction(1, 2 ** (2 * j))

    return CutEnumerator(produce, name=f"specker({oracle.name})")


# ---------------------------------------------------------------------------
# stream conversions
# ---------------------------------------------------------------------------


def cut_to_monotone(cut: CutEnumerator, prefix: int = 0) -> MonotoneApprox:
    """Convert a cut stream into a monotone pair stream.

    Entry ``i`` carries the running minimum of the first ``i`` cut values as
    an unreduced fraction, scaled by the least positive integer that makes
    the denominator exceed the previous one. ``prefix`` entries are
    materialized eagerly (the stream stays unbounded either way).
    """
    state: list[Fraction] = []  # running minima, 1-based

    def produce(i: int) -> tuple[int, int]:
        while len(state) < i:
            j = len(state) + 1
            q = cut.rational(j)
            state.append(min(q, state[-1]) if state else q)
        value = state[i - 1]
        prev_n = approx.pair(i - 1)[1] if i > 1 else 0
        scale = prev_n // value.denominator + 1
        return scale * value.numerator, scale * value.denominator

    approx = MonotoneApprox(produce, name=f"monotone({cut.name})")
    if prefix:
        approx.pair(prefix)
    return approx


def rational_approx(p: int, q: int) -> MonotoneApprox:
    """Constant stream for a non-negative rational target.

    Zero has no positive constant representation, so it is approximated by
    the pairs ``(1, i)`` whose values decrease to zero.
    """
    if q < 1:
        raise ValueError("denominator must be >= 1")
    if p < 0:
        raise ValueError("target must be non-negative")
    if p == 0:
        return MonotoneApprox(lambda i: (1, i), name="zero")
    return MonotoneApprox(lambda i: (i * p, i * q), name=f"const({p}/{q})")


def add_approx(x: MonotoneApprox, y: MonotoneApprox) -> MonotoneApprox:
    """Pointwise sum stream; entry values are ``x_i + y_i`` re-encoded."""
    out_pairs: list[tuple[int, int]] = []

    def produce(i: int) -> tuple[int, int]:
        value = x.value(i) + y.value(i)
        prev_n = out_pairs[i - 2][1] if i > 1 else 0
        scale = prev_n // value.denominator + 1
        pair = (scale * value.numerator, scale * value.denominator)
        while len(out_pairs) < i:
            out_pairs.append(pair)
        return pair

    return MonotoneApprox(produce, name=f"sum({x.name},{y.name})")


def decimal_digits(value: Fraction, digits: int = 40) -> str:
    """Fixed-point decimal rendering, truncated toward zero."""
    sign = "-" if value < 0 else ""
    value = abs(value)
    whole = value.numerator // value.denominator
    rem = value.numerator - whole * value.denominator
    frac = rem * 10 ** digits // value.denominator
    return f"{sign}{whole}.{frac:0{digits}d}"
