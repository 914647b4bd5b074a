"""Free-group word algebra over a finite signed alphabet.

Words are stored freely reduced as runs ``(generator id, exponent)`` with
arbitrary-precision exponents, so powers like ``s1^6987750`` cost one run.
All core operations work on runs and never decode a word into letters;
decoding exists only as a capped helper for test oracles.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

DECODE_CAP = 10_000

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*")


class AlphabetError(ValueError):
    """Unknown generator, duplicate name, or mixed-alphabet operation."""


class WordSyntaxError(ValueError):
    """Malformed word text; carries 1-based line/column of the offence."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Generator:
    """A single alphabet symbol: small integer id plus display name."""

    id: int
    name: str


class Alphabet:
    """Ordered set of generator names; ids are positions in the order."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        seen = {}
        for i, name in enumerate(names):
            if not _NAME_RE.fullmatch(name):
                raise AlphabetError(f"invalid generator name {name!r}")
            if name in seen:
                raise AlphabetError(f"duplicate generator name {name!r}")
            seen[name] = i
        self.names = names
        self._index = seen

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Alphabet({' '.join(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlphabetError(f"unknown generator {name!r}") from None

    def name(self, gen_id: int) -> str:
        if not 0 <= gen_id < len(self.names):
            raise AlphabetError(f"generator id {gen_id} out of range")
        return self.names[gen_id]

    def generator(self, gen_id: int) -> Generator:
        return Generator(gen_id, self.name(gen_id))

    def generators(self) -> list[Generator]:
        return [Generator(i, n) for i, n in enumerate(self.names)]

    def identity(self) -> "PowerWord":
        return PowerWord._make(self, ())

    def word(self, runs: Iterable[tuple[int, int]]) -> "PowerWord":
        """Freely reduce a raw run list into a word (zero runs allowed)."""
        return PowerWord._make(self, _reduce_runs(self, runs))

    def gen(self, name: str, exponent: int = 1) -> "PowerWord":
        return self.word([(self.index(name), exponent)])

    def parse(self, text: str, line: int = 1) -> "PowerWord":
        return parse_word(self, text, line=line)


def _reduce_runs(alphabet: Alphabet, runs: Iterable[tuple[int, int]]) -> tuple:
    out: list[list[int]] = []
    limit = len(alphabet)
    for g, e in runs:
        if not 0 <= g < limit:
            raise AlphabetError(f"generator id {g} out of range")
        if e == 0:
            continue
        if out and out[-1][0] == g:
            s = out[-1][1] + e
            if s == 0:
                out.pop()
            else:
                out[-1][1] = s
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


class PowerWord:
    """A freely reduced element of the free group, stored as runs.

    Immutable; all operations return new words. Multiplication re-reduces
    only at the junction, so the cost is the cancellation depth in runs.
    """

    __slots__ = ("alphabet", "runs", "_hash")

    def __init__(self, alphabet: Alphabet, runs: Iterable[tuple[int, int]]):
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "runs", _reduce_runs(alphabet, runs))
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _make(cls, alphabet: Alphabet, reduced_runs: tuple) -> "PowerWord":
        w = object.__new__(cls)
        object.__setattr__(w, "alphabet", alphabet)
        object.__setattr__(w, "runs", reduced_runs)
        object.__setattr__(w, "_hash", None)
        return w

    def __setattr__(self, *_):
        raise AttributeError("PowerWord is immutable")

    # -- basic protocol ----------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PowerWord)
            and self.alphabet == other.alphabet
            and self.runs == other.runs
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.alphabet, self.runs))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self) -> bool:
        return bool(self.runs)

    def __repr__(self) -> str:
        return f"PowerWord({self.to_text()!r})"

    def is_identity(self) -> bool:
        return not self.runs

    def letter_length(self) -> int:
        return sum(abs(e) for _, e in self.runs)

    # -- group operations --------------------------------------------------

    def _check_alphabet(self, other: "PowerWord"):
        if self.alphabet != other.alphabet:
            raise AlphabetError("operands use different alphabets")

    def __mul__(self, other: "PowerWord") -> "PowerWord":
        self._check_alphabet(other)
        left = list(self.runs)
        right = other.runs
        j = 0
        while left and j < len(right):
            g, e = right[j]
            lg, le = left[-1]
            if lg != g:
                break
            s = le + e
            j += 1
            if s == 0:
                left.pop()
            else:
                left[-1] = (lg, s)
                break
        return PowerWord._make(self.alphabet, tuple(left) + right[j:])

    def inverse(self) -> "PowerWord":
        return PowerWord._make(
            self.alphabet, tuple((g, -e) for g, e in reversed(self.runs))
        )

    def __invert__(self) -> "PowerWord":
        return self.inverse()

    def __pow__(self, n: int) -> "PowerWord":
        if n == 0:
            return self.alphabet.identity()
        if n < 0:
            return self.inverse() ** (-n)
        core, conj = self.cyclic_reduce()
        cruns = core.runs
        if not cruns:
            return self.alphabet.identity()
        if len(cruns) == 1:
            g, e = cruns[0]
            powered = PowerWord._make(self.alphabet, ((g, e * n),))
        else:
            # cyclically reduced with >1 run: no merges at copy junctions
            powered = PowerWord._make(self.alphabet, cruns * n)
        return conj * powered * conj.inverse()

    def conjugate(self, by: "PowerWord") -> "PowerWord":
        """Return ``by * self * by^-1``."""
        return by * self * by.inverse()

    def cyclic_reduce(self) -> tuple["CyclicWord", "PowerWord"]:
        """Split into a cyclically reduced core and a conjugator.

        Returns ``(core, conj)`` with ``self == conj * core * conj^-1``,
        the core in canonical rotation.
        """
        runs = list(self.runs)
        pre: list[tuple[int, int]] = []
        while len(runs) >= 2 and runs[0][0] == runs[-1][0]:
            g, a = runs[0]
            _, b = runs[-1]
            pre.append((g, a))
            if a + b == 0:
                runs = runs[1:-1]
            else:
                runs = runs[1:-1] + [(g, a + b)]
                break
        offset = _canonical_offset(runs)
        core = CyclicWord._make(self.alphabet, tuple(runs[offset:] + runs[:offset]))
        conj = self.alphabet.word(pre + runs[:offset])
        return core, conj

    # -- decoding (test oracles only) ---------------------------------------

    def decode(self, cap: int = DECODE_CAP) -> list[tuple[int, int]]:
        """Expand into single letters ``(gen id, ±1)``; refuses long words."""
        if self.letter_length() > cap:
            raise ValueError(f"refusing to decode {self.letter_length()} letters (cap {cap})")
        out = []
        for g, e in self.runs:
            step = 1 if e > 0 else -1
            out.extend((g, step) for _ in range(abs(e)))
        return out

    # -- text ----------------------------------------------------------------

    def to_text(self, compact: bool = False) -> str:
        return print_word(self, compact=compact)


def reduce(alphabet: Alphabet, raw: Iterable[tuple[int, int]]) -> PowerWord:
    """Freely reduce a raw run list; merges runs and drops zero exponents."""
    return alphabet.word(raw)


def commutator(x: PowerWord, y: PowerWord) -> PowerWord:
    """Return ``x y x^-1 y^-1``."""
    return x * y * x.inverse() * y.inverse()


def is_cyclically_reduced(word: PowerWord) -> bool:
    """True when no rotation of the word admits free cancellation."""
    runs = word.runs
    return len(runs) <= 1 or runs[0][0] != runs[-1][0]


def _run_key(run: tuple[int, int]) -> tuple[int, int, int]:
    # generator asc, positive before negative, larger |exponent| first
    g, e = run
    return (g, 0 if e > 0 else 1, -abs(e))


def _canonical_offset(runs: Sequence[tuple[int, int]]) -> int:
    if len(runs) <= 1:
        return 0
    keys = [_run_key(r) for r in runs]
    n = len(runs)
    best = 0
    for cand in range(1, n):
        for k in range(n):
            a = keys[(cand + k) % n]
            b = keys[(best + k) % n]
            if a < b:
                best = cand
                break
            if a > b:
                break
    return best


class CyclicWord:
    """A cyclically reduced word in a fixed canonical rotation.

    Canonical rotation is the lexicographically least run sequence under
    (generator id asc, positive exponent first, larger |exponent| first),
    so equality and hashing are rotation-independent.
    """

    __slots__ = ("alphabet", "runs", "_hash")

    def __init__(self, word: PowerWord):
        if not is_cyclically_reduced(word):
            raise ValueError("word is not cyclically reduced")
        core, _ = word.cyclic_reduce()
        object.__setattr__(self, "alphabet", core.alphabet)
        object.__setattr__(self, "runs", core.runs)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _make(cls, alphabet: Alphabet, runs: tuple) -> "CyclicWord":
        w = object.__new__(cls)
        object.__setattr__(w, "alphabet", alphabet)
        object.__setattr__(w, "runs", runs)
        object.__setattr__(w, "_hash", None)
        return w

    @classmethod
    def of(cls, word: PowerWord) -> "CyclicWord":
        """Cyclically reduce and canonicalise, discarding the conjugator."""
        core, _ = word.cyclic_reduce()
        return core

    def __setattr__(self, *_):
        raise AttributeError("CyclicWord is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CyclicWord)
            and self.alphabet == other.alphabet
            and self.runs == other.runs
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(("cyc", self.alphabet, self.runs))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self) -> bool:
        return bool(self.runs)

    def __repr__(self) -> str:
        return f"CyclicWord({self.as_word().to_text()!r})"

    def letter_length(self) -> int:
        return sum(abs(e) for _, e in self.runs)

    def as_word(self) -> PowerWord:
        return PowerWord._make(self.alphabet, self.runs)

    def inverse(self) -> "CyclicWord":
        inv = tuple((g, -e) for g, e in reversed(self.runs))
        off = _canonical_offset(inv)
        return CyclicWord._make(self.alphabet, inv[off:] + inv[:off])

    def rotations(self) -> Iterator[PowerWord]:
        """All rotations at run boundaries, as linear words."""
        runs = self.runs
        for i in range(len(runs)):
            yield PowerWord._make(self.alphabet, runs[i:] + runs[:i])

    def decode(self, cap: int = DECODE_CAP) -> list[tuple[int, int]]:
        return self.as_word().decode(cap)


# ---------------------------------------------------------------------------
# Common pieces
# ---------------------------------------------------------------------------


def max_common_piece(u: CyclicWord, v: CyclicWord, same_relator: bool = False) -> int:
    """Longest letter length of a word occurring in both cyclic words.

    With ``same_relator`` the two occurrences must be at distinct positions
    of the one word, and must fit a common rotation read linearly (an
    occurrence may not run past the start of the other). Run-level
    arithmetic throughout; exponents are never decoded.
    """
    if same_relator:
        if u != v:
            raise ValueError("same_relator comparison requires identical words")
        return _self_piece(u)
    return _pair_piece(u, v)


def _pair_piece(u: CyclicWord, v: CyclicWord) -> int:
    if not u.runs or not v.runs:
        return 0
    ur, vr = u.runs, v.runs
    nu, nv = u.letter_length(), v.letter_length()
    cap = min(nu, nv)
    ru, rv = len(ur), len(vr)
    best = 0
    for i in range(ru):
        gi, ei = ur[i]
        si = ei > 0
        for j in range(rv):
            gj, ej = vr[j]
            if gi != gj or si != (ej > 0):
                continue
            match = min(abs(ei), abs(ej))
            k = 1
            while match < cap:
                a = ur[(i + k) % ru]
                b = vr[(j + k) % rv]
                if a == b:
                    match += abs(a[1])
                    k += 1
                    continue
                if a[0] == b[0] and (a[1] > 0) == (b[1] > 0):
                    match += min(abs(a[1]), abs(b[1]))
                break
            if match > best:
                best = match
    return min(best, cap)


def _self_piece(u: CyclicWord) -> int:
    runs = u.runs
    n = u.letter_length()
    if n <= 1:
        return 0
    if len(runs) == 1:
        return n - 1
    r = len(runs)
    ends = []
    acc = 0
    for _, e in runs:
        acc += abs(e)
        ends.append(acc)
    best = max(abs(e) - 1 for _, e in runs)
    for i in range(r):
        gi, ei = runs[i]
        for j in range(i + 1, r):
            gj, ej = runs[j]
            if gi != gj or (ei > 0) != (ej > 0):
                continue
            h = min(abs(ei), abs(ej))
            match = h
            k = 1
            while k < r:
                a = runs[(i + k) % r]
                b = runs[(j + k) % r]
                if a == b:
                    match += abs(a[1])
                    k += 1
                    continue
                if a[0] == b[0] and (a[1] > 0) == (b[1] > 0):
                    match += min(abs(a[1]), abs(b[1]))
                break
            if k == r:
                match = n
            d = (ends[j] - ends[i]) % n
            cand = min(match, max(d, n - d))
            if cand > best:
                best = cand
    return best


# ---------------------------------------------------------------------------
# Word text grammar
# ---------------------------------------------------------------------------
#
#   word := term (SP term)* | "1"
#   term := name ("^" int)? | "(" word ")" "^" int
#   name := [A-Za-z][A-Za-z0-9]* ; int := "-"? [0-9]+

_TOKEN_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*|-?[0-9]+|\^|\(|\)|\S")


def _tokenize(text: str, line: int) -> list[tuple[str, int]]:
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        tok = m.group(0)
        col = m.start() + 1
        if tok not in "^()" and not tok.lstrip("-").isalnum():
            raise WordSyntaxError(f"unexpected character {tok!r}", line, col)
        tokens.append((tok, col))
    return tokens


class _WordParser:
    def __init__(self, alphabet: Alphabet, tokens: list[tuple[str, int]], line: int):
        self.alphabet = alphabet
        self.tokens = tokens
        self.pos = 0
        self.line = line

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, -1)

    def _fail(self, message: str, col: int):
        raise WordSyntaxError(message, self.line, col if col > 0 else 1)

    def parse_word(self, stop_at_paren: bool = False) -> list[tuple[int, int]]:
        runs: list[tuple[int, int]] = []
        first = True
        while True:
            tok, col = self._peek()
            if tok is None or (stop_at_paren and tok == ")"):
                if first:
                    self._fail("empty word (write 1 for the identity)", col)
                return runs
            if tok == "1" and first and not stop_at_paren:
                nxt = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else (None, -1)
                if nxt[0] is None:
                    self.pos += 1
                    return []
            runs.extend(self.parse_term())
            first = False

    def parse_term(self) -> list[tuple[int, int]]:
        tok, col = self._peek()
        if tok == "(":
            self.pos += 1
            inner = self.parse_word(stop_at_paren=True)
            tok2, col2 = self._peek()
            if tok2 != ")":
                self._fail("expected ')'", col2)
            self.pos += 1
            tok3, col3 = self._peek()
            if tok3 != "^":
                self._fail("parenthesised word needs '^' exponent", col3)
            self.pos += 1
            exp = self._parse_int()
            word = self.alphabet.word(inner) ** exp
            return list(word.runs)
        if tok is None or not tok[0].isalpha():
            self._fail(f"expected generator name, got {tok!r}", col)
        self.pos += 1
        try:
            gid = self.alphabet.index(tok)
        except AlphabetError:
            self._fail(f"unknown generator {tok!r}", col)
        exp = 1
        nxt, _ = self._peek()
        if nxt == "^":
            self.pos += 1
            exp = self._parse_int()
        return [(gid, exp)]

    def _parse_int(self) -> int:
        tok, col = self._peek()
        if tok is None or not tok.lstrip("-").isdigit():
            self._fail(f"expected integer exponent, got {tok!r}", col)
        self.pos += 1
        return int(tok)


def parse_word(alphabet: Alphabet, text: str, line: int = 1) -> PowerWord:
    """Parse word text; raises WordSyntaxError with line/column on failure."""
    tokens = _tokenize(text, line)
    if not tokens:
        raise WordSyntaxError("empty word (write 1 for the identity)", line, 1)
    parser = _WordParser(alphabet, tokens, line)
    runs = parser.parse_word()
    tok, col = parser._peek()
    if tok is not None:
        parser._fail(f"trailing input {tok!r}", col)
    return alphabet.word(runs)


def print_word(word: PowerWord, compact: bool = False) -> str:
    """Render a word; default output is fully expanded reduced runs."""
    runs = word.runs
    if not runs:
        return "1"
    if compact and len(runs) > 1:
        period = _smallest_period(runs)
        if period < len(runs):
            base = PowerWord._make(word.alphabet, runs[:period])
            return f"({print_word(base)})^{len(runs) // period}"
    names = word.alphabet.names
    return " ".join(
        names[g] if e == 1 else f"{names[g]}^{e}" for g, e in runs
    )


def _smallest_period(runs: tuple) -> int:
    n = len(runs)
    for p in range(1, n):
        if n % p == 0 and all(runs[i] == runs[i % p] for i in range(n)):
            return p
    return n
