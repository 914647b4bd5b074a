"""Certificates and exact upper bounds for stable commutator length.

A commutator certificate is a claimed identity in the free group,

    target^power = [x_1,y_1] ... [x_q,y_q] . u_1 r_{i_1}^{s_1} u_1^-1 ...

verified by free reduction alone. The bound calculus turns expression
trees over products, powers, inverses and commutators into exact rational
upper bounds, and a bounded deterministic enumeration searches for
certificates, halting exactly when one exists within the budget.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .presentations import Presentation
from .words import Alphabet, PowerWord, commutator, parse_word, print_word


class CertificateError(ValueError):
    pass


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass
class RelatorFactor:
    conjugator: PowerWord
    index: int
    sign: int  # +1 or -1


@dataclass
class CommutatorCertificate:
    target: PowerWord
    power: int
    pairs: list[tuple[PowerWord, PowerWord]]
    relator_factors: list[RelatorFactor]

    def commutator_count(self) -> int:
        return len(self.pairs)

    def product(self, pres: Presentation) -> PowerWord:
        acc = self.target.alphabet.identity()
        for x, y in self.pairs:
            acc = acc * commutator(x, y)
        for factor in self.relator_factors:
            if factor.sign not in (1, -1):
                raise CertificateError(f"bad relator sign {factor.sign}")
            rel = pres.relator(factor.index).as_word()
            if factor.sign == -1:
                rel = rel.inverse()
            acc = acc * rel.conjugate(factor.conjugator)
        return acc


@dataclass
class VerificationResult:
    ok: bool
    residue: PowerWord

    def __bool__(self) -> bool:
        return self.ok


def verify_certificate(cert: CommutatorCertificate, pres: Presentation) -> VerificationResult:
    """Free-reduce ``target^-power * product``; pass exactly when empty."""
    residue = cert.target ** (-cert.power) * cert.product(pres)
    return VerificationResult(residue.is_identity(), residue)


# ---------------------------------------------------------------------------
# bound calculus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundAtom:
    """Leaf with a caller-supplied bound and its provenance.

    ``group_trivial`` marks conjugated-relator factors, which vanish in the
    presented group; ``cl`` optionally records a commutator count for the
    auxiliary half-shift rule.
    """

    name: str
    bound: Fraction
    provenance: str = "HOM-MONOTONE"
    group_trivial: bool = False
    cl: Optional[int] = None


@dataclass(frozen=True)
class BoundComm:
    left: str
    right: str


@dataclass(frozen=True)
class BoundPower:
    base: "BoundExpr"
    exponent: int


@dataclass(frozen=True)
class BoundInverse:
    base: "BoundExpr"


@dataclass(frozen=True)
class BoundProduct:
    factors: tuple


BoundExpr = object  # union of the five node shapes above


@dataclass
class BoundDerivation:
    rule: str
    bound: Fraction
    children: list = field(default_factory=list)
    note: str = ""

    def render(self, indent: int = 0) -> str:
        pad = "  " * indent
        line = f"{pad}{self.rule}: {self.bound}"
        if self.note:
            line += f"  [{self.note}]"
        return "\n".join([line] + [c.render(indent + 1) for c in self.children])


def derive_bound(expr: BoundExpr, cl_half: bool = False) -> BoundDerivation:
    """Smallest bound derivable over the given tree shape, exact rationals.

    Rules: commutators are worth 1/2; powers scale linearly; inverses keep
    the bound; a k-factor product adds (k-1)/2. With ``cl_half`` enabled,
    group-trivial factors drop out of products without the half penalty,
    and atoms carrying a commutator count may use count minus one half.
    """
    if isinstance(expr, BoundAtom):
        bound = expr.bound
        rule = expr.provenance
        note = expr.name
        if cl_half and expr.cl is not None:
            alt = Fraction(expr.cl) - Fraction(1, 2)
            if expr.bound is None or alt < bound:
                bound, rule = alt, "CL-HALF"
                note = f"{expr.name}, commutator count {expr.cl}"
        if bound is None:
            raise CertificateError(f"atom {expr.name} carries no bound")
        return BoundDerivation(rule, Fraction(bound), note=note)
    if isinstance(expr, BoundComm):
        return BoundDerivation(
            "COMMUTATOR(iii)", Fraction(1, 2), note=f"[{expr.left}, {expr.right}]"
        )
    if isinstance(expr, BoundPower):
        child = derive_bound(expr.base, cl_half)
        n = expr.exponent
        if n < 0:
            return BoundDerivation(
                "POWER(iv)+INVERSE(v)", -n * child.bound, [child], note=f"exponent {n}"
            )
        return BoundDerivation("POWER(iv)", n * child.bound, [child], note=f"exponent {n}")
    if isinstance(expr, BoundInverse):
        child = derive_bound(expr.base, cl_half)
        return BoundDerivation("INVERSE(v)", child.bound, [child])
    if isinstance(expr, BoundProduct):
        children = [derive_bound(f, cl_half) for f in expr.factors]
        counted = list(children)
        note = ""
        if cl_half:
            keep = [
                c
                for f, c in zip(expr.factors, children)
                if not (isinstance(f, BoundAtom) and f.group_trivial)
            ]
            if len(keep) != len(children):
                note = "trivial-in-group factors dropped (CERTIFICATE)"
            counted = keep
        if not counted:
            return BoundDerivation("PRODUCT(ii)", Fraction(0), children, note=note)
        total = sum((c.bound for c in counted), Fraction(0))
        total += Fraction(len(counted) - 1, 2)
        return BoundDerivation("PRODUCT(ii)", total, children, note=note)
    raise CertificateError(f"unknown expression node {expr!r}")


# ---------------------------------------------------------------------------
# the family certificate
# ---------------------------------------------------------------------------


def family_upper_certificate(
    m: int, n: int, index: int, pres: Presentation
) -> CommutatorCertificate:
    """Certificate expressing ``t^n`` through the relator at ``index``.

    The relator says ``t^n = (triple block)^-1 (middle block)^-2m`` in the
    group; the free-group witness appends one conjugated relator factor.
    """
    if pres.family is None:
        raise CertificateError("family certificates need a family presentation")
    sm, sn = pres.family.seq.pair(index)
    if (sm, sn) != (m, n):
        raise CertificateError(
            f"relator {index} has parameters ({sm}, {sn}), not ({m}, {n})"
        )
    alphabet = pres.alphabet
    l = 6 * 5 ** index * 7 ** m * 11 ** n
    if pres.family.l_override is not None:
        l = pres.family.l_override

    def g(name, e=1):
        return alphabet.gen(name, e)

    # triple block = [p1,q1][p2,q2][p3,q3]; its inverse reverses and swaps
    s_pairs = []
    for base in (1, 4, 7):
        x = g(f"s{base}", l) * g(f"s{base + 1}", l)
        y = g(f"s{base + 2}", l) * g(f"s{base}", -l)
        s_pairs.append((x, y))
    pairs = [(y, x) for x, y in reversed(s_pairs)]
    # middle block inverse = [c^N a^-N, a^N b^N], repeated 2m times
    wx = g("a", index) * g("b", index)
    wy = g("c", index) * g("a", -index)
    pairs.extend([(wy, wx)] * (2 * m))
    conj = g("t", -n)
    cert = CommutatorCertificate(
        target=g("t"),
        power=n,
        pairs=pairs,
        relator_factors=[RelatorFactor(conj, index, +1)],
    )
    return cert


def family_bound_expression(m: int, n: int, index: int) -> BoundProduct:
    """The derivation tree matching the family certificate's structure."""
    triple = [BoundComm(f"s{b}-block", f"s{b + 2}-block") for b in (1, 4, 7)]
    middle = BoundPower(BoundComm("ab-part", "ca-part"), 2 * m)
    relator = BoundAtom(
        f"relator {index} conjugate",
        Fraction(0),
        provenance="CERTIFICATE",
        group_trivial=True,
    )
    return BoundProduct(tuple(triple) + (middle, relator))


def family_scl_bound(
    m: int, n: int, index: int, cl_half: bool = True
) -> tuple[Fraction, BoundDerivation]:
    """Certified bound for the distinguished generator: derived value over n."""
    derivation = derive_bound(family_bound_expression(m, n, index), cl_half=cl_half)
    return derivation.bound / n, derivation


# ---------------------------------------------------------------------------
# deterministic bounded search
# ---------------------------------------------------------------------------


@dataclass
class SearchConfig:
    max_word_length: int = 2
    max_commutators: int = 8
    max_relator_factors: int = 0
    max_relator_index: int = 1
    workers: int = 1
    budget: int = 10 ** 6

    def validate(self):
        caps = (
            self.max_word_length,
            self.max_commutators,
            self.max_relator_factors,
        )
        if min(caps) < 0 or self.max_relator_index < 1 or self.workers < 1 or self.budget < 1:
            raise ValueError("search configuration caps must be finite and non-negative")


HALT = "HALT"
BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"


@dataclass
class SearchResult:
    status: str
    certificate: Optional[CommutatorCertificate]
    steps: int
    witness_index: Optional[int] = None
    warnings: list[str] = field(default_factory=list)

    def halted(self) -> bool:
        return self.status == HALT


def _reduced_words_of_length(alphabet: Alphabet, length: int, cache: dict) -> list[PowerWord]:
    """All freely reduced words of exact letter length, in letter-lex order."""
    if length in cache:
        return cache[length]
    letters = [(g, s) for g in range(len(alphabet)) for s in (1, -1)]
    if length == 0:
        out = [alphabet.identity()]
    else:
        prev = _reduced_words_of_length(alphabet, length - 1, cache)
        out = []
        for word in prev:
            for g, s in letters:
                if word.runs:
                    lg, le = word.runs[-1]
                    if lg == g and (le > 0) != (s > 0):
                        continue
                out.append(word * alphabet.word([(g, s)]))
    cache[length] = out
    return out


def _compositions(total: int, slots: int, cap: int):
    """All ways to split ``total`` into ``slots`` parts bounded by ``cap``."""
    if slots == 0:
        if total == 0:
            yield ()
        return
    for head in range(min(total, cap) + 1):
        for rest in _compositions(total - head, slots - 1, cap):
            yield (head,) + rest


def _candidates(alphabet: Alphabet, q_count: int, cfg: SearchConfig):
    """Deterministic candidate stream ordered by total letter length.

    Within one total: by relator-factor count, then by the length
    composition, then letter-lexicographically slot by slot, then by the
    (index, sign) metadata of each relator factor.
    """
    cache: dict[int, list[PowerWord]] = {}
    metas = [
        (idx, sign)
        for idx in range(1, cfg.max_relator_index + 1)
        for sign in (1, -1)
    ]
    total = 0
    while True:
        emitted_at_total = False
        for k in range(cfg.max_relator_factors + 1):
            slots = 2 * q_count + k
            if total > slots * cfg.max_word_length:
                continue
            for lengths in _compositions(total, slots, cfg.max_word_length):
                word_lists = [
                    _reduced_words_of_length(alphabet, ln, cache) for ln in lengths
                ]
                for combo in _product_lex(word_lists):
                    words = combo[: 2 * q_count]
                    conjugators = combo[2 * q_count :]
                    if k == 0:
                        emitted_at_total = True
                        yield words, ()
                        continue
                    for meta in _product_lex([metas] * k):
                        emitted_at_total = True
                        yield words, tuple(zip(conjugators, meta))
        total += 1
        if total > (2 * q_count + cfg.max_relator_factors) * cfg.max_word_length:
            if not emitted_at_total:
                return


def _product_lex(pools: Sequence[Sequence]):
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for rest in _product_lex(pools[1:]):
            yield (head,) + rest


def _build_certificate(target, power, q_count, words, relfacs) -> CommutatorCertificate:
    pairs = [(words[2 * i], words[2 * i + 1]) for i in range(q_count)]
    factors = [
        RelatorFactor(conj, idx, sign) for conj, (idx, sign) in relfacs
    ]
    return CommutatorCertificate(target, power, pairs, factors)


def abelianization_warning(
    pres: Presentation, word: PowerWord, relator_prefix: int
) -> Optional[str]:
    """Heuristic: the word's abelianized image should lie in the rational
    span of the cached relators' images; later relators may still fix it."""
    size = len(pres.alphabet)
    vec = [0] * size
    for g, e in word.runs:
        vec[g] += e
    rows = []
    for i in range(1, relator_prefix + 1):
        row = [0] * size
        for g, e in pres.relator(i).runs:
            row[g] += e
        rows.append([Fraction(x) for x in row])
    target = [Fraction(x) for x in vec]
    # Gaussian elimination of [rows | target]
    cols = list(range(size))
    work = [r[:] for r in rows]
    used: set[int] = set()
    for col in cols:
        pivot_idx = next(
            (i for i in range(len(work)) if i not in used and work[i][col] != 0),
            None,
        )
        if pivot_idx is None:
            continue
        used.add(pivot_idx)
        pivot = work[pivot_idx]
        for other in work + [target]:
            if other is pivot or other[col] == 0:
                continue
            factor = other[col] / pivot[col]
            for c in cols:
                other[c] -= factor * pivot[c]
    if any(x != 0 for x in target):
        return (
            "abelianized image is outside the span of the cached relators; "
            "no certificate can exist unless later relators contribute"
        )
    return None


def _reverify(cert: CommutatorCertificate, pres: Presentation):
    # the searcher never trusts its own bookkeeping
    if not verify_certificate(cert, pres).ok:
        raise CertificateError("search produced a certificate that fails verification")


def cl_search(
    pres: Presentation,
    word: PowerWord,
    power: int,
    q: Fraction,
    cfg: SearchConfig,
) -> SearchResult:
    """Search for a certificate with ``floor(q * power)`` commutators.

    Enumerates candidates in a deterministic total order and returns the
    first verifying certificate; exhausting the step budget is reported as
    such and never as a negative answer. The result is identical for any
    worker count: workers race over candidate chunks but the least-indexed
    witness wins.
    """
    cfg.validate()
    if q < 0:
        raise ValueError("the ratio must be non-negative")
    q_count = int(q * power)  # floor for non-negative rationals
    if q_count > cfg.max_commutators:
        raise ValueError(
            f"floor(q * power) = {q_count} exceeds max_commutators = {cfg.max_commutators}"
        )
    target = word ** power
    warnings = []
    prefix = pres.size if pres.size is not None else cfg.max_relator_index
    note = abelianization_warning(pres, target, prefix)
    if note:
        warnings.append(note)

    stream = _candidates(pres.alphabet, q_count, cfg)

    def check(candidate) -> Optional[CommutatorCertificate]:
        words, relfacs = candidate
        cert = _build_certificate(word, power, q_count, words, relfacs)
        if cert.product(pres) == target:
            return cert
        return None

    steps = 0
    chunk_size = 64
    if cfg.workers == 1:
        for candidate in stream:
            if steps >= cfg.budget:
                return SearchResult(BUDGET_EXHAUSTED, None, steps, warnings=warnings)
            steps += 1
            cert = check(candidate)
            if cert is not None:
                _reverify(cert, pres)
                return SearchResult(HALT, cert, steps, steps - 1, warnings)
        return SearchResult(BUDGET_EXHAUSTED, None, steps, warnings=warnings)

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        base = 0
        while steps < cfg.budget:
            chunks = []
            for _ in range(cfg.workers):
                chunk = []
                while len(chunk) < chunk_size and steps < cfg.budget:
                    try:
                        chunk.append(next(stream))
                    except StopIteration:
                        break
                    steps += 1
                if chunk:
                    chunks.append(chunk)
            if not chunks:
                break
            results = pool.map(lambda ch: [check(c) for c in ch], chunks)
            for ci, outcomes in enumerate(results):
                for oi, cert in enumerate(outcomes):
                    if cert is not None:
                        index = base + ci * chunk_size + oi
                        _reverify(cert, pres)
                        return SearchResult(HALT, cert, steps, index, warnings)
            base += sum(len(c) for c in chunks)
    return SearchResult(BUDGET_EXHAUSTED, None, steps, warnings=warnings)


def default_budget() -> int:
    env = os.environ.get("SCLFORGE_BUDGET")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 10 ** 6


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


@dataclass
class ReportRow:
    index: int
    m: int
    n: int
    bound_half_rule: Fraction
    bound_plain: Fraction


@dataclass
class SclReport:
    rows: list[ReportRow]
    target_trend: Fraction
    diagram_bounds: list[Fraction]
    l_override: Optional[int]

    def to_tsv(self, digits: int = 40) -> str:
        from .rc_numbers import decimal_digits

        lines = ["i\tm\tn\tbound\tbound_decimal\tbound_no_half_rule"]
        for row in self.rows:
            lines.append(
                f"{row.index}\t{row.m}\t{row.n}\t{row.bound_half_rule}\t"
                f"{decimal_digits(row.bound_half_rule, digits)}\t{row.bound_plain}"
            )
        for value in self.diagram_bounds:
            lines.append(f"diagram\t\t\t{value}\t{decimal_digits(value, digits)}\t")
        lines.append(
            f"trend\t\t\t{self.target_trend}\t{decimal_digits(self.target_trend, digits)}\t"
        )
        if self.l_override is not None:
            lines.append(f"# l_override={self.l_override}")
        return "\n".join(lines)


def scl_report(
    pres: Presentation,
    k: int,
    diagrams: Iterable = (),
) -> SclReport:
    """Certified upper bounds for the first ``k`` family parameters."""
    if pres.family is None:
        raise CertificateError("reports need a family presentation")
    rows = []
    for i in range(1, k + 1):
        m, n = pres.family.seq.pair(i)
        with_half, _ = family_scl_bound(m, n, i, cl_half=True)
        plain, _ = family_scl_bound(m, n, i, cl_half=False)
        rows.append(ReportRow(i, m, n, with_half, plain))
    from .diagrams import diagram_scl_upper

    diagram_bounds = [diagram_scl_upper(d) for d in diagrams]
    trend = pres.family.seq.value(k)
    return SclReport(rows, trend, diagram_bounds, pres.l_override)


# ---------------------------------------------------------------------------
# certificate file format
# ---------------------------------------------------------------------------
#
#   target: <word>
#   power: <int>
#   comm: <word> | <word>
#   relfac: <conjugator word> | <index> | <+1|-1>


def parse_certificate(text: str, alphabet: Alphabet) -> CommutatorCertificate:
    target = None
    power = None
    pairs = []
    factors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("target:"):
            target = parse_word(alphabet, line[len("target:"):].strip(), line=lineno)
        elif line.startswith("power:"):
            power = int(line[len("power:"):].strip())
        elif line.startswith("comm:"):
            body = line[len("comm:"):]
            parts = body.split("|")
            if len(parts) != 2:
                raise CertificateError(f"line {lineno}: comm needs two words")
            pairs.append(
                (
                    parse_word(alphabet, parts[0].strip(), line=lineno),
                    parse_word(alphabet, parts[1].strip(), line=lineno),
                )
            )
        elif line.startswith("relfac:"):
            body = line[len("relfac:"):]
            parts = [p.strip() for p in body.split("|")]
            if len(parts) != 3:
                raise CertificateError(
                    f"line {lineno}: relfac needs conjugator | index | sign"
                )
            factors.append(
                RelatorFactor(
                    parse_word(alphabet, parts[0], line=lineno),
                    int(parts[1]),
                    int(parts[2]),
                )
            )
        else:
            raise CertificateError(f"line {lineno}: unrecognised line {line!r}")
    if target is None or power is None:
        raise CertificateError("certificate needs target: and power: lines")
    return CommutatorCertificate(target, power, pairs, factors)


def print_certificate(cert: CommutatorCertificate) -> str:
    lines = [f"target: {print_word(cert.target)}", f"power: {cert.power}"]
    for x, y in cert.pairs:
        lines.append(f"comm: {print_word(x)} | {print_word(y)}")
    for f in cert.relator_factors:
        lines.append(f"relfac: {print_word(f.conjugator)} | {f.index} | {f.sign:+d}")
    return "\n".join(lines) + "\n"
