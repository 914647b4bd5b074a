"""Van Kampen diagrams on compact oriented surfaces with boundary.

A diagram is an oriented combinatorial map: disks are polygons whose sides
(darts) carry word labels, a partial fixed-point-free involution glues
sides in inverse-label pairs, and unpaired sides form the surface boundary.
Vertices, degrees, Euler characteristics and curvature are derived exactly
from dart-endpoint orbits; a disk touched k times by one surface vertex
contributes k corner instances to that disk's accounting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .presentations import Presentation
from .words import PowerWord, is_cyclically_reduced, parse_word, print_word


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Dart:
    id: int
    label: PowerWord


@dataclass(frozen=True)
class Markers:
    """Letter ranges of the three relator segments on a positive disk.

    Positions index letters of the disk boundary word, starting at the first
    letter of the disk's first dart; ranges are half-open and may wrap.
    """

    t_range: tuple[int, int]
    w_range: tuple[int, int]
    s_range: tuple[int, int]

    def to_text(self) -> str:
        parts = []
        for key, (a, b) in zip("tws", (self.t_range, self.w_range, self.s_range)):
            parts.append(f"{key}={a}:{b}")
        return "markers: " + " ".join(parts)


@dataclass
class Disk:
    id: int
    sign: int  # +1 or -1
    relator_index: int
    dart_ids: tuple[int, ...]
    markers: Optional[Markers] = None


@dataclass
class Diagnostics:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_text(self) -> str:
        lines = [f"error: {e}" for e in self.errors]
        lines += [f"warning: {w}" for w in self.warnings]
        lines.append("valid" if self.ok else "invalid")
        return "\n".join(lines)


@dataclass
class _Vertex:
    id: int
    degree: int = 0
    corners: list = field(default_factory=list)  # (disk_id, corner_slot)
    on_boundary: bool = False


@dataclass
class _Component:
    id: int
    disk_ids: list[int]
    vertex_ids: set[int]
    edges: int
    chi: int
    boundary_cycles: list[list[int]]  # cycles of boundary dart ids


class _Analysis:
    """Derived topology of a structurally sound diagram."""

    def __init__(self, diag: "SurfaceDiagram"):
        self.diag = diag
        self._build()

    def _build(self):
        diag = self.diag
        order = sorted(diag.darts)
        # endpoint symbols: (dart id, 0) = tail, (dart id, 1) = head
        parent: dict[tuple[int, int], tuple[int, int]] = {}

        def find(x):
            root = x
            while parent[root] != root:
                root = parent[root]
            while parent[x] != root:
                parent[x], x = root, parent[x]
            return root

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        for d in order:
            parent[(d, 0)] = (d, 0)
            parent[(d, 1)] = (d, 1)
        self.disk_of: dict[int, int] = {}
        self.next_in_disk: dict[int, int] = {}
        self.prev_in_disk: dict[int, int] = {}
        for disk in diag.disks.values():
            ids = disk.dart_ids
            for j, d in enumerate(ids):
                nxt = ids[(j + 1) % len(ids)]
                self.disk_of[d] = disk.id
                self.next_in_disk[d] = nxt
                self.prev_in_disk[nxt] = d
                union((d, 1), (nxt, 0))
        for x, y in diag.pairing.items():
            if x < y:
                union((x, 0), (y, 1))
                union((x, 1), (y, 0))

        rep_ids: dict[tuple[int, int], int] = {}
        self.vertices: list[_Vertex] = []
        self.vertex_of: dict[tuple[int, int], int] = {}
        for d in order:
            for side in (0, 1):
                root = find((d, side))
                if root not in rep_ids:
                    rep_ids[root] = len(self.vertices)
                    self.vertices.append(_Vertex(len(self.vertices)))
                self.vertex_of[(d, side)] = rep_ids[root]

        # edge-end degrees: each edge contributes one end at each endpoint
        self.edge_reps: list[int] = []
        for d in order:
            partner = diag.pairing.get(d)
            if partner is None or d < partner:
                self.edge_reps.append(d)
                self.vertices[self.vertex_of[(d, 0)]].degree += 1
                self.vertices[self.vertex_of[(d, 1)]].degree += 1
                if partner is None:
                    self.vertices[self.vertex_of[(d, 0)]].on_boundary = True
                    self.vertices[self.vertex_of[(d, 1)]].on_boundary = True

        # corner instances: one per (disk, slot), at head(dart at slot)
        self.corner_vertex: dict[tuple[int, int], int] = {}
        for disk in diag.disks.values():
            for j, d in enumerate(disk.dart_ids):
                v = self.vertex_of[(d, 1)]
                self.vertices[v].corners.append((disk.id, j))
                self.corner_vertex[(disk.id, j)] = v

        # letter offsets per disk
        self.disk_offsets: dict[int, list[int]] = {}
        self.disk_length: dict[int, int] = {}
        self.disk_pos_slot: dict[int, dict[int, int]] = {}
        for disk in diag.disks.values():
            offs = [0]
            for d in disk.dart_ids:
                offs.append(offs[-1] + diag.darts[d].label.letter_length())
            self.disk_length[disk.id] = offs[-1]
            self.disk_offsets[disk.id] = offs[:-1]
            self.disk_pos_slot[disk.id] = {
                off: j for j, off in enumerate(offs[:-1])
            }

        # connected components over darts
        comp_parent = {d: d for d in order}

        def cfind(x):
            root = x
            while comp_parent[root] != root:
                root = comp_parent[root]
            while comp_parent[x] != root:
                comp_parent[x], x = root, comp_parent[x]
            return root

        def cunion(a, b):
            ra, rb = cfind(a), cfind(b)
            if ra != rb:
                comp_parent[ra] = rb

        for disk in diag.disks.values():
            first = disk.dart_ids[0]
            for d in disk.dart_ids[1:]:
                cunion(first, d)
        for x, y in diag.pairing.items():
            cunion(x, y)

        comp_index: dict[int, int] = {}
        comp_darts: dict[int, list[int]] = {}
        for d in order:
            root = cfind(d)
            if root not in comp_index:
                comp_index[root] = len(comp_index)
            comp_darts.setdefault(comp_index[root], []).append(d)

        boundary_cycles = self._boundary_cycles()
        self.components: list[_Component] = []
        for cid in range(len(comp_index)):
            darts = comp_darts[cid]
            dart_set = set(darts)
            disk_ids = sorted({self.disk_of[d] for d in darts})
            vertex_ids = {self.vertex_of[(d, s)] for d in darts for s in (0, 1)}
            edges = sum(1 for e in self.edge_reps if e in dart_set)
            chi = len(vertex_ids) - edges + len(disk_ids)
            cycles = [c for c in boundary_cycles if c[0] in dart_set]
            self.components.append(
                _Component(cid, disk_ids, vertex_ids, edges, chi, cycles)
            )
        self.boundary_cycles = boundary_cycles

    def _boundary_cycles(self) -> list[list[int]]:
        diag = self.diag
        unpaired = [d for d in sorted(diag.darts) if d not in diag.pairing]
        seen = set()
        cycles = []
        for start in unpaired:
            if start in seen:
                continue
            cycle = []
            d = start
            while True:
                cycle.append(d)
                seen.add(d)
                nxt = self.next_in_disk[d]
                while nxt in diag.pairing:
                    nxt = self.next_in_disk[diag.pairing[nxt]]
                d = nxt
                if d == start:
                    break
            cycles.append(cycle)
        return cycles

    # -- queries -----------------------------------------------------------

    def chi(self) -> int:
        return sum(c.chi for c in self.components)

    def chi_minus(self) -> int:
        return sum(min(c.chi, 0) for c in self.components)

    def vertex_count(self) -> int:
        return len(self.vertices)

    def edge_count(self) -> int:
        return len(self.edge_reps)

    def corner_count_at(self, vertex_id: int) -> int:
        return len(self.vertices[vertex_id].corners)

    def degree(self, vertex_id: int) -> int:
        return self.vertices[vertex_id].degree

    def vertex_at(self, disk_id: int, pos: int) -> Optional[int]:
        """Map vertex at a letter position of a disk boundary, if any."""
        pos %= self.disk_length[disk_id]
        slot = self.disk_pos_slot[disk_id].get(pos)
        if slot is None:
            return None
        dart = self.diag.disks[disk_id].dart_ids[slot]
        return self.vertex_of[(dart, 0)]

    def dart_at(self, disk_id: int, pos: int) -> tuple[int, int]:
        """Dart covering a letter position, plus the offset inside it."""
        pos %= self.disk_length[disk_id]
        offs = self.disk_offsets[disk_id]
        lo, hi = 0, len(offs) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if offs[mid] <= pos:
                lo = mid
            else:
                hi = mid - 1
        disk = self.diag.disks[disk_id]
        return disk.dart_ids[lo], pos - offs[lo]


class SurfaceDiagram:
    """Immutable-after-validation surface diagram."""

    def __init__(self, darts: Iterable[Dart], pairing: dict[int, int], disks: Iterable[Disk]):
        self.darts: dict[int, Dart] = {}
        for d in darts:
            if d.id in self.darts:
                raise DiagramError(f"duplicate dart id {d.id}")
            self.darts[d.id] = d
        self.pairing: dict[int, int] = dict(pairing)
        self.disks: dict[int, Disk] = {}
        for disk in disks:
            if disk.id in self.disks:
                raise DiagramError(f"duplicate disk id {disk.id}")
            self.disks[disk.id] = disk
        self._analysis: Optional[_Analysis] = None
        self._validated = False

    @classmethod
    def from_data(
        cls,
        labels: dict[int, PowerWord],
        pairs: Iterable[tuple[int, int]],
        disks: Iterable[tuple[int, int, Iterable[int], Optional[Markers]]],
    ) -> "SurfaceDiagram":
        """Assemble from plain data: labels, pair list, disk tuples.

        Disk tuples are ``(sign, relator_index, dart ids, markers)``; disk
        ids are assigned 1, 2, ... in order.
        """
        pairing = {}
        for x, y in pairs:
            pairing[x] = y
            pairing[y] = x
        dart_objs = [Dart(i, w) for i, w in labels.items()]
        disk_objs = [
            Disk(k + 1, sign, rel, tuple(ids), markers)
            for k, (sign, rel, ids, markers) in enumerate(disks)
        ]
        return cls(dart_objs, pairing, disk_objs)

    # -- validation ----------------------------------------------------------

    def validate(self, pres: Presentation) -> Diagnostics:
        """Check all structural invariants; never stops at the first failure."""
        diag = Diagnostics()
        err = diag.errors.append
        warn = diag.warnings.append

        structural = True
        for x, y in self.pairing.items():
            if y not in self.darts or x not in self.darts:
                err(f"pairing references unknown dart ({x}, {y})")
                structural = False
                continue
            if x == y:
                err(f"dart {x} paired with itself")
                structural = False
            if self.pairing.get(y) != x:
                err(f"pairing is not an involution at dart {x}")
                structural = False

        membership: dict[int, int] = {}
        for disk in self.disks.values():
            if not disk.dart_ids:
                err(f"disk {disk.id} has no darts")
                structural = False
            if disk.sign not in (1, -1):
                err(f"disk {disk.id} has sign {disk.sign}, expected +1 or -1")
            for d in disk.dart_ids:
                if d not in self.darts:
                    err(f"disk {disk.id} references unknown dart {d}")
                    structural = False
                    continue
                if d in membership:
                    err(f"dart {d} appears in more than one disk cycle")
                    structural = False
                membership[d] = disk.id
        for d in sorted(self.darts):
            if d not in membership:
                err(f"dart {d} belongs to no disk")
                structural = False

        for d, dart in sorted(self.darts.items()):
            if dart.label.is_identity():
                err(f"dart {d} has an empty label")
                structural = False
            if dart.label.alphabet != pres.alphabet:
                err(f"dart {d} label uses a different alphabet")
                structural = False

        if structural:
            for x in sorted(self.pairing):
                y = self.pairing[x]
                if x < y and self.darts[y].label != self.darts[x].label.inverse():
                    err(f"pairing labels not inverse at darts ({x}, {y})")

        if not structural:
            self._validated = False
            self._analysis = None
            return diag

        # boundary words against relators
        for disk in sorted(self.disks.values(), key=lambda p: p.id):
            runs = []
            for d in disk.dart_ids:
                runs.extend(self.darts[d].label.runs)
            word = pres.alphabet.word(runs)
            raw_len = sum(self.darts[d].label.letter_length() for d in disk.dart_ids)
            if word.letter_length() != raw_len:
                err(f"disk {disk.id} boundary word is not reduced")
                continue
            if not is_cyclically_reduced(word):
                err(f"disk {disk.id} boundary word is not cyclically reduced")
                continue
            core, _ = word.cyclic_reduce()
            try:
                relator = pres.relator(disk.relator_index)
            except Exception as exc:
                err(f"disk {disk.id}: bad relator index {disk.relator_index} ({exc})")
                continue
            expected = relator if disk.sign == 1 else relator.inverse()
            if core != expected:
                err(
                    f"disk {disk.id} boundary does not spell relator "
                    f"{disk.relator_index} with sign {disk.sign:+d}"
                )

        if diag.errors:
            self._validated = False
            self._analysis = None
            return diag

        self._analysis = _Analysis(self)
        self._check_markers(pres, diag)
        self._validated = diag.ok
        if not diag.ok:
            self._analysis = None
        return diag

    def _check_markers(self, pres: Presentation, diag: Diagnostics):
        analysis = self._analysis
        for disk in sorted(self.disks.values(), key=lambda p: p.id):
            if disk.markers is None:
                if disk.sign == 1 and pres.family is not None:
                    diag.warnings.append(
                        f"disk {disk.id} is positive but carries no segment markers"
                    )
                continue
            if pres.family is None:
                diag.warnings.append(
                    f"disk {disk.id} has markers but the presentation is not a family"
                )
                continue
            if disk.sign != 1:
                diag.errors.append(f"disk {disk.id}: markers belong on positive disks")
                continue
            total = analysis.disk_length[disk.id]
            m, n = pres.family.seq.pair(disk.relator_index)
            index = disk.relator_index
            mk = disk.markers
            spans = {
                "t": (mk.t_range, n),
                "w": (mk.w_range, 12 * m * index),
                "s": (mk.s_range, total - n - 12 * m * index),
            }
            ok = True
            for key, ((a, b), want) in spans.items():
                got = (b - a) % total
                if got != want:
                    diag.errors.append(
                        f"disk {disk.id}: {key}-range covers {got} letters, expected {want}"
                    )
                    ok = False
            if not ok:
                continue
            if mk.w_range[0] != mk.t_range[1] % total or mk.s_range[0] != mk.w_range[1] % total:
                diag.errors.append(f"disk {disk.id}: marker ranges are not contiguous")
                continue
            if mk.t_range[0] != mk.s_range[1] % total:
                diag.errors.append(f"disk {disk.id}: marker ranges do not close up")
                continue
            word = self.boundary_word(disk.id)
            relator = pres.relator(disk.relator_index).as_word()
            rotated = _rotate_letters(word, mk.t_range[0])
            if rotated != relator:
                diag.errors.append(
                    f"disk {disk.id}: markers disagree with the boundary labels"
                )

    def require_valid(self) -> _Analysis:
        if not self._validated or self._analysis is None:
            raise DiagramError("diagram has not been validated against a presentation")
        return self._analysis

    # -- basic derived data ---------------------------------------------------

    def boundary_word(self, disk_id: int) -> PowerWord:
        disk = self.disks[disk_id]
        runs = []
        for d in disk.dart_ids:
            runs.extend(self.darts[d].label.runs)
        return self.darts[disk.dart_ids[0]].label.alphabet.word(runs)


def _rotate_letters(word: PowerWord, start: int) -> PowerWord:
    """Rotate a linear word left by ``start`` letters."""
    total = word.letter_length()
    if total == 0 or start % total == 0:
        return word
    start %= total
    head, tail = _split_runs(word.runs, start)
    return word.alphabet.word(tail + head)


def _split_runs(runs: tuple, offset: int) -> tuple[list, list]:
    head, tail = [], []
    used = 0
    for g, e in runs:
        size = abs(e)
        if used + size <= offset:
            head.append((g, e))
            used += size
            continue
        if used >= offset:
            tail.append((g, e))
            used += size
            continue
        take = offset - used
        sign = 1 if e > 0 else -1
        head.append((g, sign * take))
        tail.append((g, sign * (size - take)))
        used += size
    return head, tail


# ---------------------------------------------------------------------------
# exact invariants
# ---------------------------------------------------------------------------


def euler_characteristic(diag: SurfaceDiagram) -> int:
    return diag.require_valid().chi()


def chi_minus(diag: SurfaceDiagram) -> int:
    return diag.require_valid().chi_minus()


def curvature(diag: SurfaceDiagram, disk_id: int) -> Fraction:
    """Exact combinatorial curvature of one disk.

    Corner instances contribute one over the number of corners at their
    vertex; each side contributes minus one over the number of disk sides
    its edge carries (2 paired, 1 boundary); plus one for the face.
    """
    analysis = diag.require_valid()
    disk = diag.disks[disk_id]
    total = Fraction(1)
    for j, d in enumerate(disk.dart_ids):
        v = analysis.corner_vertex[(disk_id, j)]
        total += Fraction(1, analysis.corner_count_at(v))
        total -= Fraction(1, 2 if d in diag.pairing else 1)
    return total


def total_curvature(diag: SurfaceDiagram) -> Fraction:
    return sum((curvature(diag, i) for i in diag.disks), Fraction(0))


def gauss_bonnet_check(diag: SurfaceDiagram) -> tuple[Fraction, int, bool]:
    """Return (sum of curvatures, Euler characteristic, equal?)."""
    total = total_curvature(diag)
    chi = euler_characteristic(diag)
    return total, chi, total == chi


def branch_weight_vertex(diag: SurfaceDiagram, vertex_id: int) -> int:
    return 1 if diag.require_valid().degree(vertex_id) >= 3 else 0


def branch_weight_path(
    diag: SurfaceDiagram, disk_id: int, start: int, end: int
) -> Fraction:
    """Branch weight of the boundary path from letter ``start`` to ``end``.

    Endpoints count half, interior vertices count fully; letter positions
    interior to a dart are degree-2 points and contribute nothing.
    """
    analysis = diag.require_valid()
    total = analysis.disk_length[disk_id]
    if end < start:
        raise DiagramError("path end precedes start")
    if end - start > total:
        raise DiagramError("path is longer than the disk boundary")

    def weight(pos: int) -> int:
        v = analysis.vertex_at(disk_id, pos)
        if v is None:
            return 0
        return 1 if analysis.degree(v) >= 3 else 0

    acc = Fraction(weight(start) + weight(end), 2)
    offs = analysis.disk_offsets[disk_id]
    for k in range(len(offs)):
        for base in (0, total):
            pos = offs[k] + base
            if start < pos < end:
                acc += weight(pos)
    return acc


def branch_weight_disk(diag: SurfaceDiagram, disk_id: int) -> Fraction:
    """Branch weight summed over the disk's corner instances."""
    analysis = diag.require_valid()
    disk = diag.disks[disk_id]
    acc = 0
    for j in range(len(disk.dart_ids)):
        v = analysis.corner_vertex[(disk_id, j)]
        acc += 1 if analysis.degree(v) >= 3 else 0
    return Fraction(acc)


def branch_bound_check(diag: SurfaceDiagram) -> dict[int, tuple[bool, Fraction, Fraction]]:
    """Per disk: does ``-curvature >= (branch weight - 6) / 6`` hold?"""
    out = {}
    for disk_id in sorted(diag.disks):
        lhs = -curvature(diag, disk_id)
        rhs = (branch_weight_disk(diag, disk_id) - 6) / 6
        out[disk_id] = (lhs >= rhs, lhs, rhs)
    return out


# ---------------------------------------------------------------------------
# segment accounting on positive family disks
# ---------------------------------------------------------------------------


@dataclass
class SegmentInfo:
    disk_id: int
    copy: int  # which block copy, 1-based
    slot: int  # which of the 6 runs, 1-based
    start: int  # letter positions on the disk boundary
    end: int
    weight: Fraction  # half-sum of endpoint contact values
    branch: Fraction


@dataclass
class ContactReport:
    per_position: dict[tuple[int, int], int]
    segments: list[SegmentInfo]
    per_disk: dict[int, Fraction]


def _family_parameters(pres: Presentation, disk: Disk) -> tuple[int, int, int]:
    if pres.family is None:
        raise DiagramError("segment accounting needs a family presentation")
    m, n = pres.family.seq.pair(disk.relator_index)
    return m, n, disk.relator_index


def _contact_value(
    diag: SurfaceDiagram, pres: Presentation, disk: Disk, pos: int
) -> tuple[int, Optional[int], int]:
    """Contact indicator at a letter position of a positive disk boundary.

    Returns ``(value, other disk id or None, degree at the point)``; the
    value is 1 exactly when the point has degree two and the one other disk
    there is negative with relator index at least this disk's.
    """
    analysis = diag.require_valid()
    total = analysis.disk_length[disk.id]
    pos %= total
    v = analysis.vertex_at(disk.id, pos)
    if v is None:
        dart, _ = analysis.dart_at(disk.id, pos)
        partner = diag.pairing.get(dart)
        degree = 2
        other = analysis.disk_of[partner] if partner is not None else None
    else:
        degree = analysis.degree(v)
        corners = analysis.vertices[v].corners
        ours = None
        slot = analysis.disk_pos_slot[disk.id].get(pos)
        prev_slot = (slot - 1) % len(disk.dart_ids)
        for idx, corner in enumerate(corners):
            if corner == (disk.id, prev_slot):
                ours = idx
                break
        others = [c for i, c in enumerate(corners) if i != ours]
        other = others[0][0] if len(others) == 1 else None
        if degree != 2:
            return 0, other, degree
    if other is None:
        return 0, None, degree
    other_disk = diag.disks[other]
    if other_disk.sign != -1:
        return 0, other, degree
    if other_disk.relator_index < disk.relator_index:
        return 0, other, degree
    return 1, other, degree


def contact_weight(diag: SurfaceDiagram, pres: Presentation) -> ContactReport:
    """Contact accounting over the block segments of positive disks.

    Each of the ``12 m`` segments of the middle block weighs the average of
    its two endpoint contact values; a disk's weight is the segment sum.
    Requires markers on every positive disk.
    """
    analysis = diag.require_valid()
    per_position: dict[tuple[int, int], int] = {}
    segments: list[SegmentInfo] = []
    per_disk: dict[int, Fraction] = {}
    for disk in sorted(diag.disks.values(), key=lambda p: p.id):
        if disk.sign != 1:
            continue
        if disk.markers is None:
            raise DiagramError(f"disk {disk.id} carries no segment markers")
        m, n, index = _family_parameters(pres, disk)
        total = analysis.disk_length[disk.id]
        w_start = disk.markers.w_range[0]
        values = {}
        for k in range(12 * m + 1):
            pos = (w_start + k * index) % total
            value, _, _ = _contact_value(diag, pres, disk, pos)
            values[k] = value
            per_position[(disk.id, pos)] = value
        acc = Fraction(0)
        for k in range(12 * m):
            weight = Fraction(values[k] + values[k + 1], 2)
            copy, slot = divmod(k, 6)
            start = w_start + k * index
            segments.append(
                SegmentInfo(
                    disk.id,
                    copy + 1,
                    slot + 1,
                    start,
                    start + index,
                    weight,
                    branch_weight_path(diag, disk.id, start, start + index),
                )
            )
            acc += weight
        per_disk[disk.id] = acc
    return ContactReport(per_position, segments, per_disk)


# ---------------------------------------------------------------------------
# claim checks
# ---------------------------------------------------------------------------


@dataclass
class ClaimResult:
    name: str
    ok: bool
    witnesses: list[str] = field(default_factory=list)


@dataclass
class ClaimsReport:
    claims: list[ClaimResult]
    note: Optional[str] = None

    @property
    def all_ok(self) -> bool:
        return all(c.ok for c in self.claims)

    def claim(self, name: str) -> ClaimResult:
        for c in self.claims:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_text(self) -> str:
        lines = []
        for c in self.claims:
            lines.append(f"{c.name}\t{'pass' if c.ok else 'fail'}")
            lines.extend(f"  witness: {w}" for w in c.witnesses)
        if self.note:
            lines.append(f"note: {self.note}")
        return "\n".join(lines)


def claims_check(diag: SurfaceDiagram, pres: Presentation) -> ClaimsReport:
    """Evaluate the four per-diagram assertions with exact arithmetic.

    These are checks of stated inequalities on the concrete diagram; a
    failure is reported with witnesses, never raised.
    """
    analysis = diag.require_valid()
    report = contact_weight(diag, pres)

    negative_contact = ClaimResult("negative_contact", True)
    for disk in sorted(diag.disks.values(), key=lambda p: p.id):
        if disk.sign != 1:
            continue
        m, n, index = _family_parameters(pres, disk)
        total = analysis.disk_length[disk.id]
        w_start = disk.markers.w_range[0]
        for k in range(12 * m + 1):
            pos = (w_start + k * index) % total
            _, other, degree = _contact_value(diag, pres, disk, pos)
            if degree != 2:
                continue
            if other is None or diag.disks[other].sign != -1:
                negative_contact.ok = False
                negative_contact.witnesses.append(
                    f"disk {disk.id} position {pos}: degree-2 contact is not a negative disk"
                )

    seg_weight = ClaimResult("segment_weight", True)
    for seg in report.segments:
        if seg.branch + seg.weight < 1:
            seg_weight.ok = False
            seg_weight.witnesses.append(
                f"disk {seg.disk_id} copy {seg.copy} slot {seg.slot}: "
                f"branch {seg.branch} + contact {seg.weight} < 1"
            )

    disk_curvature = ClaimResult("disk_curvature", True)
    for disk_id, mu in report.per_disk.items():
        disk = diag.disks[disk_id]
        m, _, _ = _family_parameters(pres, disk)
        lhs = -curvature(diag, disk_id)
        rhs = -mu / 6 + 2 * m
        if lhs < rhs:
            disk_curvature.ok = False
            disk_curvature.witnesses.append(
                f"disk {disk_id}: -curvature {lhs} < {rhs}"
            )

    degree_bound = ClaimResult("degree_bound", True)
    try:
        degree = boundary_degree(diag)
    except DiagramError as exc:
        degree_bound.witnesses.append(f"skipped: {exc}")
        degree = None
    if degree is not None:
        acc = Fraction(0)
        for disk_id, mu in report.per_disk.items():
            disk = diag.disks[disk_id]
            m, n, _ = _family_parameters(pres, disk)
            acc += n - mu * Fraction(n, 12 * m)
        if degree > acc:
            degree_bound.ok = False
            degree_bound.witnesses.append(f"boundary degree {degree} > bound {acc}")

    note = None
    if pres.l_override is not None:
        note = "presentation uses an exponent override; outside the checked hypotheses"
    return ClaimsReport(
        [negative_contact, seg_weight, disk_curvature, degree_bound], note=note
    )


# ---------------------------------------------------------------------------
# boundary degree and the resulting bound
# ---------------------------------------------------------------------------


def boundary_degree(diag: SurfaceDiagram) -> int:
    """Sum of boundary exponents; boundary labels must be positive powers
    of one common generator on every boundary cycle."""
    analysis = diag.require_valid()
    gen = None
    degree = 0
    for cycle in analysis.boundary_cycles:
        for d in cycle:
            label = diag.darts[d].label
            if len(label.runs) != 1:
                raise DiagramError(f"boundary dart {d} label is not a single power")
            g, e = label.runs[0]
            if e <= 0:
                raise DiagramError(f"boundary dart {d} is not positively labelled")
            if gen is None:
                gen = g
            elif g != gen:
                raise DiagramError("boundary labels mix generators")
            degree += e
    return degree


def diagram_scl_upper(diag: SurfaceDiagram) -> Fraction:
    """The bound ``-chi_minus / (2 * degree)`` carried by this diagram."""
    degree = boundary_degree(diag)
    if degree <= 0:
        raise DiagramError("diagram has zero boundary degree")
    return Fraction(-chi_minus(diag), 2 * degree)


# ---------------------------------------------------------------------------
# curvature report
# ---------------------------------------------------------------------------


@dataclass
class DiskRow:
    disk_id: int
    sign: int
    relator_index: int
    curvature: Fraction
    branch: Fraction
    contact: Optional[Fraction]
    m: Optional[int]
    n: Optional[int]


@dataclass
class CurvatureReport:
    rows: list[DiskRow]
    total_curvature: Fraction
    chi: int
    chi_minus: int
    degree: Optional[int]
    claims: Optional[ClaimsReport]

    def to_tsv(self) -> str:
        lines = ["disk\tsign\trelator\tcurvature\tbranch\tcontact\tm\tn"]
        for r in self.rows:
            lines.append(
                f"{r.disk_id}\t{r.sign:+d}\t{r.relator_index}\t{r.curvature}\t"
                f"{r.branch}\t{r.contact if r.contact is not None else '-'}\t"
                f"{r.m if r.m is not None else '-'}\t{r.n if r.n is not None else '-'}"
            )
        lines.append(f"total_curvature\t{self.total_curvature}")
        lines.append(f"chi\t{self.chi}")
        lines.append(f"chi_minus\t{self.chi_minus}")
        lines.append(f"degree\t{self.degree if self.degree is not None else '-'}")
        return "\n".join(lines)


def curvature_report(diag: SurfaceDiagram, pres: Presentation) -> CurvatureReport:
    diag.require_valid()
    contact = None
    claims = None
    if pres.family is not None and all(
        d.markers is not None for d in diag.disks.values() if d.sign == 1
    ):
        contact = contact_weight(diag, pres)
        claims = claims_check(diag, pres)
    rows = []
    for disk in sorted(diag.disks.values(), key=lambda p: p.id):
        m = n = None
        if pres.family is not None:
            m, n = pres.family.seq.pair(disk.relator_index)
        rows.append(
            DiskRow(
                disk.id,
                disk.sign,
                disk.relator_index,
                curvature(diag, disk.id),
                branch_weight_disk(diag, disk.id),
                contact.per_disk.get(disk.id) if contact else None,
                m,
                n,
            )
        )
    degree = None
    try:
        degree = boundary_degree(diag)
    except DiagramError:
        pass
    return CurvatureReport(
        rows,
        total_curvature(diag),
        euler_characteristic(diag),
        chi_minus(diag),
        degree,
        claims,
    )


# ---------------------------------------------------------------------------
# rebuilding transformations
# ---------------------------------------------------------------------------


def subdivide_dart(diag: SurfaceDiagram, dart_id: int, offset: int) -> SurfaceDiagram:
    """Split a dart (and its partner) at a letter offset; topology preserved."""
    label = diag.darts[dart_id].label
    total = label.letter_length()
    if not 0 < offset < total:
        raise DiagramError(f"offset {offset} does not split dart {dart_id}")
    head_runs, tail_runs = _split_runs(label.runs, offset)
    alphabet = label.alphabet
    first, second = alphabet.word(head_runs), alphabet.word(tail_runs)

    new_id = max(diag.darts) + 1
    labels = {d.id: d.label for d in diag.darts.values()}
    labels[dart_id] = first
    labels[new_id] = second
    replacements = {dart_id: [dart_id, new_id]}
    pairs = {tuple(sorted(p)) for p in diag.pairing.items()}
    pairs = {p for p in pairs}
    partner = diag.pairing.get(dart_id)
    new_pairs = []
    if partner is not None:
        partner_label = diag.darts[partner].label
        p_head, p_tail = _split_runs(partner_label.runs, partner_label.letter_length() - offset)
        partner_new = new_id + 1
        labels[partner] = alphabet.word(p_head)
        labels[partner_new] = alphabet.word(p_tail)
        replacements[partner] = [partner, partner_new]
        for x, y in list(pairs):
            if {x, y} == {dart_id, partner}:
                pairs.discard((x, y))
        new_pairs = [(dart_id, partner_new), (new_id, partner)]
    disk_tuples = []
    for disk in sorted(diag.disks.values(), key=lambda p: p.id):
        ids = []
        for d in disk.dart_ids:
            ids.extend(replacements.get(d, [d]))
        disk_tuples.append((disk.sign, disk.relator_index, ids, disk.markers))
    return SurfaceDiagram.from_data(labels, list(pairs) + new_pairs, disk_tuples)


def normalized(diag: SurfaceDiagram, pres: Presentation) -> SurfaceDiagram:
    """Concatenate edges through degree-2 vertices until none remain.

    Marker letter positions are untouched: merging preserves the boundary
    letter sequence. Vertices that cannot be merged safely (monogons,
    folded configurations) are left alone.
    """
    current = diag
    while True:
        merged = _merge_one(current, pres)
        if merged is None:
            return current
        current = merged


def _merge_one(diag: SurfaceDiagram, pres: Presentation) -> Optional[SurfaceDiagram]:
    diagnostics = diag.validate(pres)
    if not diagnostics.ok:
        raise DiagramError("cannot normalise an invalid diagram")
    analysis = diag.require_valid()
    for vertex in analysis.vertices:
        if vertex.degree != 2:
            continue
        corners = vertex.corners
        if vertex.on_boundary:
            if len(corners) != 1:
                continue
            disk_id, slot = corners[0]
            disk = diag.disks[disk_id]
            a = disk.dart_ids[slot]
            b = analysis.next_in_disk[a]
            if a == b or a in diag.pairing or b in diag.pairing:
                continue
            return _merge_boundary(diag, disk_id, a, b)
        if len(corners) != 2:
            continue
        (p_id, p_slot), (q_id, q_slot) = corners
        p_disk, q_disk = diag.disks[p_id], diag.disks[q_id]
        a = p_disk.dart_ids[p_slot]
        b = analysis.next_in_disk[a]
        c = q_disk.dart_ids[q_slot]
        d = analysis.next_in_disk[c]
        if len({a, b, c, d}) != 4:
            continue
        if diag.pairing.get(b) != c or diag.pairing.get(d) != a:
            continue
        return _merge_interior(diag, a, b, c, d)
    return None


def _merge_boundary(diag: SurfaceDiagram, disk_id: int, a: int, b: int) -> SurfaceDiagram:
    labels = {d.id: d.label for d in diag.darts.values()}
    labels[a] = labels[a] * labels[b]
    del labels[b]
    pairs = [tuple(sorted(p)) for p in diag.pairing.items() if p[0] < p[1]]
    disk_tuples = []
    for disk in sorted(diag.disks.values(), key=lambda p: p.id):
        ids = [d for d in disk.dart_ids if d != b]
        disk_tuples.append((disk.sign, disk.relator_index, ids, disk.markers))
    return SurfaceDiagram.from_data(labels, pairs, disk_tuples)


def _merge_interior(diag: SurfaceDiagram, a: int, b: int, c: int, d: int) -> SurfaceDiagram:
    # a,b consecutive in one disk; c,d consecutive in the other;
    # pairing has b<->c and d<->a, so the merged edges pair (a+b) <-> (c+d)
    labels = {x.id: x.label for x in diag.darts.values()}
    labels[a] = labels[a] * labels[b]
    labels[c] = labels[c] * labels[d]
    del labels[b], labels[d]
    pairs = [
        tuple(sorted(p))
        for p in diag.pairing.items()
        if p[0] < p[1] and not set(p) & {a, b, c, d}
    ]
    pairs.append((a, c))
    disk_tuples = []
    for disk in sorted(diag.disks.values(), key=lambda p: p.id):
        ids = [x for x in disk.dart_ids if x not in (b, d)]
        disk_tuples.append((disk.sign, disk.relator_index, ids, disk.markers))
    return SurfaceDiagram.from_data(labels, pairs, disk_tuples)


def disjoint_union(a: SurfaceDiagram, b: SurfaceDiagram) -> SurfaceDiagram:
    offset = max(a.darts, default=0)
    labels = {d.id: d.label for d in a.darts.values()}
    labels.update({d.id + offset: d.label for d in b.darts.values()})
    pairs = [p for p in a.pairing.items() if p[0] < p[1]]
    pairs += [
        (x + offset, y + offset) for x, y in b.pairing.items() if x < y
    ]
    disk_tuples = [
        (p.sign, p.relator_index, list(p.dart_ids), p.markers)
        for p in sorted(a.disks.values(), key=lambda p: p.id)
    ]
    disk_tuples += [
        (p.sign, p.relator_index, [d + offset for d in p.dart_ids], p.markers)
        for p in sorted(b.disks.values(), key=lambda p: p.id)
    ]
    return SurfaceDiagram.from_data(labels, pairs, disk_tuples)


# ---------------------------------------------------------------------------
# diagram file format
# ---------------------------------------------------------------------------
#
#   # comment
#   darts:
#   <id> <label word>
#   pairs:
#   <dart id> <dart id>
#   disks:
#   <+1|-1> <relator index> <dart ids...> [markers: t=a:b w=c:d s=e:f]


def parse_diagram(text: str, alphabet) -> SurfaceDiagram:
    section = None
    labels: dict[int, PowerWord] = {}
    pairs: list[tuple[int, int]] = []
    disk_tuples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("darts:", "pairs:", "disks:"):
            section = line[:-1]
            continue
        if section == "darts":
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise DiagramError(f"line {lineno}: expected '<id> <word>'")
            try:
                dart_id = int(parts[0])
            except ValueError:
                raise DiagramError(f"line {lineno}: bad dart id {parts[0]!r}")
            if dart_id in labels:
                raise DiagramError(f"line {lineno}: duplicate dart id {dart_id}")
            labels[dart_id] = parse_word(alphabet, parts[1], line=lineno)
        elif section == "pairs":
            parts = line.split()
            if len(parts) != 2:
                raise DiagramError(f"line {lineno}: expected two dart ids")
            x, y = int(parts[0]), int(parts[1])
            if any(x in p or y in p for p in pairs):
                raise DiagramError(f"line {lineno}: dart paired twice")
            pairs.append((x, y))
        elif section == "disks":
            disk_tuples.append(_parse_disk_line(line, lineno))
        else:
            raise DiagramError(f"line {lineno}: content before any section header")
    return SurfaceDiagram.from_data(labels, pairs, disk_tuples)


def _parse_disk_line(line: str, lineno: int):
    markers = None
    if "markers:" in line:
        body, marker_text = line.split("markers:", 1)
        ranges = {}
        for item in marker_text.split():
            key, _, span = item.partition("=")
            if key not in ("t", "w", "s") or ":" not in span:
                raise DiagramError(f"line {lineno}: bad marker field {item!r}")
            a, b = span.split(":")
            ranges[key] = (int(a), int(b))
        if set(ranges) != {"t", "w", "s"}:
            raise DiagramError(f"line {lineno}: markers need t=, w= and s= ranges")
        markers = Markers(ranges["t"], ranges["w"], ranges["s"])
    else:
        body = line
    parts = body.split()
    if len(parts) < 3:
        raise DiagramError(f"line {lineno}: expected '<sign> <relator> <darts...>'")
    sign_text = parts[0]
    if sign_text in ("+1", "+"):
        sign = 1
    elif sign_text in ("-1", "-"):
        sign = -1
    else:
        raise DiagramError(f"line {lineno}: bad sign {sign_text!r}")
    try:
        relator_index = int(parts[1])
        dart_ids = [int(x) for x in parts[2:]]
    except ValueError as exc:
        raise DiagramError(f"line {lineno}: {exc}")
    return (sign, relator_index, dart_ids, markers)


def print_diagram(diag: SurfaceDiagram) -> str:
    lines = ["darts:"]
    for d in sorted(diag.darts):
        lines.append(f"{d} {print_word(diag.darts[d].label)}")
    lines.append("pairs:")
    for x in sorted(diag.pairing):
        if x < diag.pairing[x]:
            lines.append(f"{x} {diag.pairing[x]}")
    lines.append("disks:")
    for disk in sorted(diag.disks.values(), key=lambda p: p.id):
        body = f"{disk.sign:+d} {disk.relator_index} " + " ".join(
            str(d) for d in disk.dart_ids
        )
        if disk.markers is not None:
            body += " " + disk.markers.to_text()
        lines.append(body)
    return "\n".join(lines) + "\n"
