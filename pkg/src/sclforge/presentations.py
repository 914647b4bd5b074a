"""Recursive presentations as relator streams, and the explicit relator
family over the 13-generator alphabet ``t a b c s1 .. s9``.

The family relator with parameters ``(m, n, index)`` is the product of a
``t``-power, a commutator block to the ``2m``-th power, and a triple
commutator block whose runs carry the exponent ``6 * 5^index * 7^m * 11^n``;
the exponent is injective over parameter triples by prime factorisation and
keeps distinct relators from sharing long pieces.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .words import (
    Alphabet,
    CyclicWord,
    PowerWord,
    max_common_piece,
    parse_word,
    print_word,
)

FAMILY_GENERATORS = ("t", "a", "b", "c") + tuple(f"s{i}" for i in range(1, 10))


class SequenceError(ValueError):
    """A pair stream broke monotonicity or positivity; carries the index."""

    def __init__(self, index: int, message: str):
        super().__init__(f"index {index}: {message}")
        self.index = index


class PresentationError(ValueError):
    pass


class SeqPair:
    """Memoized stream of pairs ``(m_i, n_i)``, indices from 1.

    Enforces at production time: both entries positive, ``n`` strictly
    increasing, and ``m_i/n_i`` non-increasing by exact comparison.
    """

    def __init__(self, produce: Callable[[int], tuple[int, int]], name: str = ""):
        self._produce = produce
        self._memo: list[tuple[int, int]] = []
        self.name = name

    @classmethod
    def from_lists(cls, ms: Iterable[int], ns: Iterable[int], name: str = "") -> "SeqPair":
        ms, ns = list(ms), list(ns)
        if len(ms) != len(ns):
            raise ValueError("m and n lists must have equal length")

        def produce(i: int) -> tuple[int, int]:
            if i > len(ms):
                raise SequenceError(i, f"finite sequence of length {len(ms)} exhausted")
            return ms[i - 1], ns[i - 1]

        return cls(produce, name=name)

    def pair(self, i: int) -> tuple[int, int]:
        if i < 1:
            raise SequenceError(i, "indices start at 1")
        while len(self._memo) < i:
            j = len(self._memo) + 1
            m, n = self._produce(j)
            self._check(j, m, n)
            self._memo.append((m, n))
        return self._memo[i - 1]

    def value(self, i: int) -> Fraction:
        m, n = self.pair(i)
        return Fraction(m, n)

    def prefix(self, k: int) -> list[tuple[int, int]]:
        return [self.pair(i) for i in range(1, k + 1)]

    def _check(self, j: int, m: int, n: int):
        if m < 1 or n < 1:
            raise SequenceError(j, f"pair ({m}, {n}) is not positive")
        if self._memo:
            pm, pn = self._memo[-1]
            if n <= pn:
                raise SequenceError(j, f"n must increase strictly ({pn} then {n})")
            if Fraction(m, n) > Fraction(pm, pn):
                raise SequenceError(
                    j, f"value m/n increased ({pm}/{pn} then {m}/{n})"
                )


# ---------------------------------------------------------------------------
# the relator family
# ---------------------------------------------------------------------------


def family_alphabet() -> Alphabet:
    return Alphabet(FAMILY_GENERATORS)


def block_exponent(index: int, m: int, n: int) -> int:
    """The run exponent used in the triple commutator block."""
    if index < 1 or m < 1 or n < 1:
        raise ValueError("family parameters must be >= 1")
    return 6 * 5 ** index * 7 ** m * 11 ** n


def commutator_block(alphabet: Alphabet, n: int) -> PowerWord:
    """The 6-run word ``a^n b^n c^n a^-n b^-n c^-n``; letter length 6n."""
    if n < 1:
        raise ValueError("block power must be >= 1")
    a, b, c = (alphabet.index(x) for x in ("a", "b", "c"))
    return alphabet.word([(a, n), (b, n), (c, n), (a, -n), (b, -n), (c, -n)])


def triple_commutator_block(
    alphabet: Alphabet, index: int, m: int, n: int, l_override: Optional[int] = None
) -> tuple[PowerWord, int]:
    """The 18-run word over ``s1..s9`` and the exponent it uses.

    Equals a product of three commutators of two-run words; the exponent is
    ``block_exponent(index, m, n)`` unless overridden for desk-scale work.
    """
    l = block_exponent(index, m, n) if l_override is None else l_override
    if l < 1:
        raise ValueError("exponent override must be >= 1")
    runs = []
    for base in (1, 4, 7):
        ids = [alphabet.index(f"s{base + k}") for k in range(3)]
        runs.extend((g, l) for g in ids)
        runs.extend((g, -l) for g in ids)
    return alphabet.word(runs), l


def family_relator(
    alphabet: Alphabet, m: int, n: int, index: int, l_override: Optional[int] = None
) -> CyclicWord:
    """Relator ``t^n (commutator block)^(2m) (triple commutator block)``."""
    if m < 1 or n < 1 or index < 1:
        raise ValueError("family parameters must be >= 1")
    t = alphabet.gen("t", n)
    w = commutator_block(alphabet, index)
    s, l = triple_commutator_block(alphabet, index, m, n, l_override)
    word = t * w ** (2 * m) * s
    expected = n + 12 * m * index + 18 * l
    if word.letter_length() != expected:
        raise AssertionError("unexpected cancellation while assembling relator")
    return CyclicWord.of(word)


@dataclass
class FamilyParams:
    seq: SeqPair
    l_override: Optional[int] = None
    k: Optional[int] = None  # declared prefix size for file round trips


class Presentation:
    """Alphabet plus an indexed relator stream with a memoized prefix.

    The prefix cache is append-only behind a lock; reads of materialized
    entries are lock-free. The producer is called once per index.
    """

    def __init__(
        self,
        alphabet: Alphabet,
        relator_fn: Callable[[int], CyclicWord],
        size: Optional[int] = None,
        family: Optional[FamilyParams] = None,
    ):
        self.alphabet = alphabet
        self._relator_fn = relator_fn
        self._cache: list[CyclicWord] = []
        self._lock = threading.Lock()
        self.size = size
        self.family = family

    @property
    def l_override(self) -> Optional[int]:
        return self.family.l_override if self.family else None

    @classmethod
    def from_relators(cls, alphabet: Alphabet, relators: Iterable[CyclicWord]) -> "Presentation":
        rels = list(relators)
        for r in rels:
            if not r:
                raise PresentationError("relator reduces to the empty word")

        def fn(i: int) -> CyclicWord:
            return rels[i - 1]

        return cls(alphabet, fn, size=len(rels))

    def relator(self, i: int) -> CyclicWord:
        if i < 1:
            raise PresentationError("relator indices start at 1")
        if self.size is not None and i > self.size:
            raise PresentationError(f"presentation has {self.size} relators, asked for {i}")
        if i > len(self._cache):
            with self._lock:
                while len(self._cache) < i:
                    j = len(self._cache) + 1
                    r = self._relator_fn(j)
                    if not r:
                        raise PresentationError(f"relator {j} reduces to the empty word")
                    self._cache.append(r)
        return self._cache[i - 1]

    def relators(self, k: int) -> list[CyclicWord]:
        return [self.relator(i) for i in range(1, k + 1)]

    def num_relators(self) -> Optional[int]:
        return self.size


def family_presentation(seq: SeqPair, l_override: Optional[int] = None) -> Presentation:
    """The presentation whose i-th relator has parameters ``(m_i, n_i, i)``."""
    alphabet = family_alphabet()

    def fn(i: int) -> CyclicWord:
        m, n = seq.pair(i)
        return family_relator(alphabet, m, n, i, l_override)

    return Presentation(alphabet, fn, size=None, family=FamilyParams(seq, l_override))


# ---------------------------------------------------------------------------
# small-cancellation check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PieceRow:
    label_a: str
    label_b: str
    same_element: bool
    piece: int
    shorter: int  # letter length of the shorter word in the pair
    ratio: Fraction


@dataclass
class PiecesReport:
    k: int
    lam: Fraction
    rows: list[PieceRow]
    relator_lengths: dict[str, int]
    l_override: Optional[int] = None

    @property
    def worst_ratio(self) -> Fraction:
        return max((r.ratio for r in self.rows), default=Fraction(0))

    @property
    def passed(self) -> bool:
        return self.worst_ratio < self.lam

    def passes_at(self, lam: Fraction) -> bool:
        return self.worst_ratio < lam

    def to_tsv(self) -> str:
        lines = ["pair\tpiece\tshorter\tratio"]
        for r in self.rows:
            kind = "self" if r.same_element else "pair"
            lines.append(
                f"{r.label_a}|{r.label_b}({kind})\t{r.piece}\t{r.shorter}\t{r.ratio}"
            )
        lines.append(f"worst\t{self.worst_ratio}\tlambda\t{self.lam}")
        lines.append(f"verdict\t{'pass' if self.passed else 'fail'}")
        return "\n".join(lines)


def check_small_cancellation(
    pres: Presentation, k: int, lam: Fraction = Fraction(1, 6)
) -> PiecesReport:
    """Check the piece condition over the symmetrized prefix ``1..k``.

    Builds all relators and inverses as cyclic words, measures the maximal
    common piece for every unordered pair and every self pair, and passes
    exactly when every piece is shorter than ``lam`` times each containing
    relator. All comparisons are exact.
    """
    if k < 1:
        raise ValueError("prefix size must be >= 1")
    elements: list[tuple[str, CyclicWord]] = []
    lengths: dict[str, int] = {}
    for i in range(1, k + 1):
        r = pres.relator(i)
        elements.append((f"r{i}", r))
        elements.append((f"r{i}^-1", r.inverse()))
    for label, w in elements:
        lengths[label] = w.letter_length()

    rows = []
    for x in range(len(elements)):
        la, wa = elements[x]
        for y in range(x, len(elements)):
            lb, wb = elements[y]
            same = x == y
            piece = max_common_piece(wa, wb, same_relator=same)
            shorter = min(wa.letter_length(), wb.letter_length())
            ratio = Fraction(piece, shorter) if shorter else Fraction(0)
            rows.append(PieceRow(la, lb, same, piece, shorter, ratio))
    return PiecesReport(
        k=k, lam=lam, rows=rows, relator_lengths=lengths, l_override=pres.l_override
    )


# ---------------------------------------------------------------------------
# presentation file format
# ---------------------------------------------------------------------------
#
#   gens: t a b c s1 ... s9
#   rel: <word>                      (zero or more)
#   family: m=1,1 n=1,2 k=2 [l_override=1]
#
# A file carries either explicit rel: lines or one family: line, not both,
# so relator indices are unambiguous.


def parse_presentation(text: str) -> Presentation:
    alphabet: Optional[Alphabet] = None
    relators: list[CyclicWord] = []
    family_line: Optional[tuple[int, str]] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("gens:"):
            if alphabet is not None:
                raise PresentationError(f"line {lineno}: duplicate gens: line")
            names = line[len("gens:"):].split()
            if not names:
                raise PresentationError(f"line {lineno}: gens: line lists no generators")
            alphabet = Alphabet(names)
        elif line.startswith("rel:"):
            if alphabet is None:
                raise PresentationError(f"line {lineno}: rel: before gens:")
            body = line[len("rel:"):].strip()
            word = parse_word(alphabet, body, line=lineno)
            core, _ = word.cyclic_reduce()
            if not core:
                raise PresentationError(f"line {lineno}: relator reduces to empty")
            relators.append(core)
        elif line.startswith("family:"):
            if family_line is not None:
                raise PresentationError(f"line {lineno}: duplicate family: line")
            family_line = (lineno, line[len("family:"):].strip())
        else:
            raise PresentationError(f"line {lineno}: unrecognised line {line!r}")

    if alphabet is None:
        raise PresentationError("missing gens: line")
    if family_line is not None:
        if relators:
            raise PresentationError("a file carries either rel: lines or a family: line")
        return _parse_family_line(alphabet, *family_line)
    return Presentation.from_relators(alphabet, relators)


def _parse_family_line(alphabet: Alphabet, lineno: int, body: str) -> Presentation:
    if alphabet.names != FAMILY_GENERATORS:
        raise PresentationError(
            f"line {lineno}: family presentations use generators {' '.join(FAMILY_GENERATORS)}"
        )
    fields = {}
    for item in body.split():
        if "=" not in item:
            raise PresentationError(f"line {lineno}: bad family field {item!r}")
        key, val = item.split("=", 1)
        fields[key] = val
    try:
        ms = [int(x) for x in fields["m"].split(",")]
        ns = [int(x) for x in fields["n"].split(",")]
        k = int(fields["k"])
    except (KeyError, ValueError) as exc:
        raise PresentationError(f"line {lineno}: family line needs m=, n=, k= ({exc})")
    l_override = None
    if "l_override" in fields:
        l_override = int(fields["l_override"])
    if len(ms) != k or len(ns) != k:
        raise PresentationError(f"line {lineno}: m and n lists must have length k={k}")
    seq = SeqPair.from_lists(ms, ns)
    pres = family_presentation(seq, l_override)
    pres.size = k
    pres.family.k = k
    return pres


def print_presentation(pres: Presentation, k: Optional[int] = None, expand: bool = False) -> str:
    """Render a presentation file; the output re-parses to an equal value."""
    lines = [f"gens: {' '.join(pres.alphabet.names)}"]
    if pres.family is not None and not expand:
        kk = k if k is not None else pres.family.k
        if kk is None:
            raise PresentationError("printing a family presentation needs a prefix size")
        pairs = pres.family.seq.prefix(kk)
        ms = ",".join(str(m) for m, _ in pairs)
        ns = ",".join(str(n) for _, n in pairs)
        line = f"family: m={ms} n={ns} k={kk}"
        if pres.family.l_override is not None:
            line += f" l_override={pres.family.l_override}"
        lines.append(line)
    else:
        kk = k if k is not None else pres.size
        if kk is None:
            raise PresentationError("printing an infinite presentation needs a prefix size")
        for i in range(1, kk + 1):
            lines.append(f"rel: {print_word(pres.relator(i).as_word())}")
    return "\n".join(lines) + "\n"
