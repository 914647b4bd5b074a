"""Shared fixture builders: classical surfaces, family diagrams, and a
random polygon-gluing generator used by the curvature property tests."""

import random

import pytest

from sclforge.diagrams import Markers, SurfaceDiagram, subdivide_dart
from sclforge.presentations import (
    Presentation,
    SeqPair,
    family_alphabet,
    family_presentation,
)
from sclforge.words import Alphabet, CyclicWord, commutator


# ---------------------------------------------------------------------------
# classical fixed diagrams
# ---------------------------------------------------------------------------


def build_torus():
    AB = Alphabet(["a", "b"])
    a, b = AB.gen("a"), AB.gen("b")
    pres = Presentation.from_relators(AB, [CyclicWord.of(commutator(a, b))])
    diag = SurfaceDiagram.from_data(
        {1: a, 2: b, 3: a ** -1, 4: b ** -1},
        [(1, 3), (2, 4)],
        [(1, 1, [1, 2, 3, 4], None)],
    )
    return diag, pres


def build_tetrahedron():
    # vertices 1..4; oriented faces with compatible edge orientations
    edges = {}
    names = []
    for u, v in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]:
        name = f"e{u}{v}"
        edges[(u, v)] = (name, 1)
        edges[(v, u)] = (name, -1)
        names.append(name)
    alphabet = Alphabet(names)
    faces = [(1, 2, 3), (1, 3, 4), (1, 4, 2), (2, 4, 3)]
    labels = {}
    slot_of = {}
    next_id = 1
    disk_tuples = []
    for face in faces:
        ids = []
        for k in range(3):
            u, v = face[k], face[(k + 1) % 3]
            name, sign = edges[(u, v)]
            labels[next_id] = alphabet.gen(name, sign)
            slot_of.setdefault((u, v), []).append(next_id)
            ids.append(next_id)
            next_id += 1
        disk_tuples.append(ids)
    pairs = []
    for (u, v), darts in slot_of.items():
        if u < v:
            pairs.append((darts[0], slot_of[(v, u)][0]))
    relators = []
    final = []
    for idx, ids in enumerate(disk_tuples, start=1):
        word = labels[ids[0]] * labels[ids[1]] * labels[ids[2]]
        relators.append(CyclicWord.of(word))
        final.append((1, idx, ids, None))
    pres = Presentation.from_relators(alphabet, relators)
    return SurfaceDiagram.from_data(labels, pairs, final), pres


def build_genus2():
    G = Alphabet(["a", "b", "c", "d"])
    gens = {n: G.gen(n) for n in "abcd"}
    word = commutator(gens["a"], gens["b"]) * commutator(gens["c"], gens["d"])
    pres = Presentation.from_relators(G, [CyclicWord.of(word)])
    seq = [("a", 1), ("b", 1), ("a", -1), ("b", -1), ("c", 1), ("d", 1), ("c", -1), ("d", -1)]
    labels = {i + 1: G.gen(n, e) for i, (n, e) in enumerate(seq)}
    diag = SurfaceDiagram.from_data(
        labels, [(1, 3), (2, 4), (5, 7), (6, 8)], [(1, 1, list(range(1, 9)), None)]
    )
    return diag, pres


def build_lone_disk(k: int = 4):
    names = [f"x{i}" for i in range(k)]
    alphabet = Alphabet(names)
    labels = {i + 1: alphabet.gen(names[i]) for i in range(k)}
    word = alphabet.identity()
    for i in range(k):
        word = word * labels[i + 1]
    pres = Presentation.from_relators(alphabet, [CyclicWord.of(word)])
    diag = SurfaceDiagram.from_data(labels, [], [(1, 1, list(range(1, k + 1)), None)])
    return diag, pres


# ---------------------------------------------------------------------------
# family diagrams (override exponent 1, desk scale)
# ---------------------------------------------------------------------------


def family_pres_override(values=None):
    seq = SeqPair(lambda i: (1, i)) if values is None else SeqPair.from_lists(*values)
    return family_presentation(seq, l_override=1)


def _split(word, *cuts):
    """Split a word at letter offsets into consecutive pieces."""
    from sclforge.diagrams import _split_runs

    pieces = []
    runs = word.runs
    prev = 0
    for cut in cuts:
        head, rest = _split_runs(tuple(runs), cut - prev)
        pieces.append(word.alphabet.word(head))
        runs = rest
        prev = cut
    pieces.append(word.alphabet.word(runs))
    return pieces


def build_degree_one_diagram():
    """One positive disk of the first family relator; the t letter is the
    whole boundary; every other letter is folded against its inverse inside
    its own commutator block."""
    pres = family_pres_override()
    alphabet = pres.alphabet
    word = pres.relator(1).as_word()  # 31 letters, t first
    letters = word.decode()
    labels = {i + 1: alphabet.word([run]) for i, run in enumerate(letters)}
    pairs = []
    for block in range(5):
        base = 2 + 6 * block  # dart id of the block's first letter
        for k in range(3):
            pairs.append((base + k, base + k + 3))
    markers = Markers((0, 1), (1, 13), (13, 31))
    diag = SurfaceDiagram.from_data(
        labels, pairs, [(1, 1, list(range(1, 32)), markers)]
    )
    return diag, pres


def build_contact_diagram():
    """Positive disk glued to its mirror along the whole boundary; all
    block-segment endpoints have degree two against the negative disk."""
    pres = family_pres_override()
    alphabet = pres.alphabet
    word = pres.relator(1).as_word()
    tpart, wpart, spart = _split(word, 1, 13)
    labels = {
        1: tpart,
        2: wpart,
        3: spart,
        4: spart.inverse(),
        5: wpart.inverse(),
        6: tpart.inverse(),
    }
    markers = Markers((0, 1), (1, 13), (13, 31))
    diag = SurfaceDiagram.from_data(
        labels,
        [(1, 6), (2, 5), (3, 4)],
        [(1, 1, [1, 2, 3], markers), (-1, 1, [4, 5, 6], None)],
    )
    return diag, pres


def build_half_glued_diagram():
    """Positive disk with only its first block copy glued to a negative
    mirror: the junction segments pick up half branch and half contact
    weight, the glued interior carries full contact weight, and the
    unglued copy sits on the surface boundary."""
    pres = family_pres_override()
    alphabet = pres.alphabet
    r1 = pres.relator(1).as_word()
    r1inv = pres.relator(1).inverse().as_word()  # t^-1, s^-1, then both inverse blocks
    letters = r1.decode()
    labels = {i + 1: alphabet.word([letters[i]]) for i in range(7)}  # t + first block
    wsecond, srest = _split(_split(r1, 7)[1], 6)
    labels[8] = wsecond
    for k, run in enumerate(srest.decode()):
        labels[9 + k] = alphabet.word([run])
    pairs = []
    for blk in range(3):  # fold the triple block internally
        base = 9 + 6 * blk
        for k in range(3):
            pairs.append((base + k, base + k + 3))
    qt, qs, qw_second, qw_first = _split(r1inv, 1, 19, 25)
    labels[27], labels[28], labels[29] = qt, qs, qw_second
    for k, run in enumerate(qw_first.decode()):
        labels[30 + k] = alphabet.word([run])  # c b a c^-1 b^-1 a^-1
    pairs += [(2, 35), (3, 34), (4, 33), (5, 32), (6, 31), (7, 30)]
    markers = Markers((0, 1), (1, 13), (13, 31))
    diag = SurfaceDiagram.from_data(
        labels,
        pairs,
        [
            (1, 1, list(range(1, 27)), markers),
            (-1, 1, [27, 28, 29] + list(range(30, 36)), None),
        ],
    )
    return diag, pres


def build_smaller_index_contact_diagram():
    """Positive disk of relator 2 touching a negative disk of relator 1 at
    one block-segment endpoint of degree two; the contact value there must
    be zero because the negative disk has the smaller index."""
    pres = family_pres_override()
    alphabet = pres.alphabet
    r2 = pres.relator(2).as_word()
    r1inv = pres.relator(1).inverse().as_word()  # canonical: t^-1 first, a^-1 last
    p1, p2, p3, prest = _split(r2, 1, 2, 3)
    qt, qhead, qa = _split(r1inv, 1, 30)
    labels = {1: p1, 2: p2, 3: p3, 4: prest, 5: qt, 6: qhead, 7: qa}
    markers = Markers((0, 2), (2, 26), (26, 44))
    diag = SurfaceDiagram.from_data(
        labels,
        [(2, 5), (3, 7)],
        [(1, 2, [1, 2, 3, 4], markers), (-1, 1, [5, 6, 7], None)],
    )
    return diag, pres


# ---------------------------------------------------------------------------
# random polygon gluings
# ---------------------------------------------------------------------------


class DiagramFactory:
    """Random valid diagrams from polygon side-pairings plus refinements."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def _letter_pool(self, count: int, boundary_letter: str = None):
        names = [f"x{i}" for i in range(count)]
        if boundary_letter:
            names = [boundary_letter] + names
        return Alphabet(names)

    def polygon(self, admissible: bool = False):
        rng = self.rng
        while True:
            npairs = rng.randint(1, 6)
            nbound = rng.randint(1, 3) if admissible else rng.choice([0, 0, 0, 1, 2])
            k = 2 * npairs + nbound
            if k < 3 and npairs:
                continue
            slots = list(range(k))
            rng.shuffle(slots)
            pairing_slots = [
                (slots[2 * i], slots[2 * i + 1]) for i in range(npairs)
            ]
            if any(
                (a - b) % k == 1 or (b - a) % k == 1 for a, b in pairing_slots
            ):
                continue
            boundary_slots = slots[2 * npairs :]
            alphabet = self._letter_pool(
                2 * npairs + (0 if admissible else nbound),
                boundary_letter="t" if admissible else None,
            )
            labels = {}
            pairs = []
            fresh = iter(range(2 * npairs + nbound))
            if admissible:
                xnames = [n for n in alphabet.names if n != "t"]
            else:
                xnames = list(alphabet.names)
            xiter = iter(xnames)
            for a, b in pairing_slots:
                length = rng.randint(1, 2)
                word = alphabet.identity()
                for _ in range(length):
                    word = word * alphabet.gen(next(xiter), rng.choice([1, -1]))
                labels[a + 1] = word
                labels[b + 1] = word.inverse()
            for s in boundary_slots:
                if admissible:
                    labels[s + 1] = alphabet.gen("t", rng.randint(1, 2))
                else:
                    labels[s + 1] = alphabet.gen(next(xiter), 1)
            pairs = [(a + 1, b + 1) for a, b in pairing_slots]
            diag = SurfaceDiagram.from_data(
                labels, pairs, [(1, 1, list(range(1, k + 1)), None)]
            )
            word = diag.boundary_word(1)
            if word.letter_length() != sum(
                w.letter_length() for w in labels.values()
            ):
                continue  # hidden cancellation; resample
            from sclforge.words import is_cyclically_reduced

            if not is_cyclically_reduced(word):
                continue
            return diag

    def mirror_pair(self):
        """Two disks glued along their whole boundary: a sphere."""
        rng = self.rng
        k = rng.randint(2, 5)
        alphabet = self._letter_pool(k)
        labels = {}
        signs = [rng.choice([1, -1]) for _ in range(k)]
        for i in range(k):
            labels[i + 1] = alphabet.gen(alphabet.names[i], signs[i])
        for i in range(k):
            labels[k + i + 1] = labels[k - i].inverse()
        pairs = [(i + 1, 2 * k - i) for i in range(k)]
        diag = SurfaceDiagram.from_data(
            labels,
            pairs,
            [(1, 1, list(range(1, k + 1)), None), (1, 2, list(range(k + 1, 2 * k + 1)), None)],
        )
        return diag

    def _chord_split(self, diag):
        rng = self.rng
        candidates = [d for d in diag.disks.values() if len(d.dart_ids) >= 2]
        if not candidates:
            return diag
        disk = rng.choice(candidates)
        k = len(disk.dart_ids)
        i = rng.randrange(k)
        j = rng.randrange(k)
        if i == j:
            return diag
        i, j = min(i, j), max(i, j)
        names = list(diag.darts[disk.dart_ids[0]].label.alphabet.names)
        chord_name = f"z{len(names)}"
        alphabet = Alphabet(names + [chord_name])
        relabel = {
            d.id: alphabet.word(d.label.runs) for d in diag.darts.values()
        }
        new1 = max(diag.darts) + 1
        new2 = new1 + 1
        relabel[new1] = alphabet.gen(chord_name)
        relabel[new2] = alphabet.gen(chord_name, -1)
        pairs = [p for p in diag.pairing.items() if p[0] < p[1]]
        pairs.append((new1, new2))
        ids = disk.dart_ids
        cycle1 = list(ids[i + 1 : j + 1]) + [new1]
        cycle2 = list(ids[j + 1 :]) + list(ids[: i + 1]) + [new2]
        disk_tuples = []
        for other in sorted(diag.disks.values(), key=lambda p: p.id):
            if other.id == disk.id:
                disk_tuples.append((1, 0, cycle1, None))
                disk_tuples.append((1, 0, cycle2, None))
            else:
                disk_tuples.append((1, 0, list(other.dart_ids), None))
        return SurfaceDiagram.from_data(relabel, pairs, disk_tuples)

    def _subdivide_random(self, diag):
        rng = self.rng
        candidates = [
            d.id for d in diag.darts.values() if d.label.letter_length() >= 2
        ]
        if not candidates:
            return diag
        dart_id = rng.choice(candidates)
        total = diag.darts[dart_id].label.letter_length()
        return subdivide_dart(diag, dart_id, rng.randint(1, total - 1))

    def diagram(self, admissible: bool = False):
        """One random valid diagram and its synthetic presentation."""
        if not admissible and self.rng.random() < 0.15:
            diag = self.mirror_pair()
        else:
            diag = self.polygon(admissible=admissible)
        for _ in range(self.rng.randint(0, 2)):
            diag = self._subdivide_random(diag)
        for _ in range(self.rng.randint(0, 2)):
            diag = self._chord_split(diag)
        # presentation: one relator per disk, in disk order
        alphabet = diag.darts[next(iter(diag.darts))].label.alphabet
        relators = []
        disk_tuples = []
        for idx, disk in enumerate(
            sorted(diag.disks.values(), key=lambda p: p.id), start=1
        ):
            relators.append(CyclicWord.of(diag.boundary_word(disk.id)))
            disk_tuples.append((1, idx, list(disk.dart_ids), None))
        labels = {d.id: d.label for d in diag.darts.values()}
        pairs = [p for p in diag.pairing.items() if p[0] < p[1]]
        rebuilt = SurfaceDiagram.from_data(labels, pairs, disk_tuples)
        pres = Presentation.from_relators(alphabet, relators)
        return rebuilt, pres


@pytest.fixture
def factory():
    return DiagramFactory(seed=0xD1A6)
