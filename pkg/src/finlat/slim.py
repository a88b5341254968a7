"""Slim semimodular lattices: planar structure, forks, and non-retract witnesses.

A slim semimodular lattice is carried together with a left-to-right order
on the covers of every element, which is what a planar diagram contributes
combinatorially.  Forks are added to 4-cells: a new element is hung under
the cell's top and two legs descend through the maximal sequences of cells
to the lower left and lower right, inserting one new element on each
traversed edge.  Slim rectangular lattices are replayed from fork scripts
over grids.

The witness construction shows a slim semimodular lattice with at least
two elements is never an absolute retract: it embeds the lattice into a
slim rectangular extension built inside a member of the S7 family with
more inner coatoms than the lattice has elements, and exhaustive search
confirms that no retraction onto the embedded copy exists.  The kernel
argument behind the search result (collapsing any two inner coatoms
collapses them all into the top's block, by Grätzer's Swing Lemma) is also
verified directly by congruence generation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Cell,
    FiniteLattice,
    LatticeError,
    build_lattice,
    four_cells,
    induced_lattice,
    is_semimodular,
    is_slim,
    lattice_length,
)
from .grids import make_grid
from .oracle import congruence_generated_by, find_embedding, search_retraction

__all__ = [
    "NotA4Cell",
    "ValidationFailed",
    "TooSmall",
    "NoRectangularExtensionFound",
    "OrientedLattice",
    "ForkRecord",
    "oriented_grid",
    "add_fork",
    "inner_coatoms",
    "s7_family",
    "ForkScript",
    "build_slim_rectangular",
    "find_rectangular_extension",
    "WitnessReport",
    "build_witness",
]


class NotA4Cell(LatticeError):
    pass


class ValidationFailed(LatticeError):
    """A fork or replay produced an inconsistent planar structure."""


class TooSmall(LatticeError):
    """The witness construction needs at least two elements."""


class NoRectangularExtensionFound(LatticeError):
    """Bounded search found no slim rectangular extension."""


@dataclass(frozen=True)
class ForkRecord:
    """New elements of one fork: the middle element and the two legs, top-down."""

    mid: str
    left_leg: tuple[str, ...]
    right_leg: tuple[str, ...]


class OrientedLattice:
    """A slim semimodular lattice with a planar left-to-right cover order.

    ``up[x]`` and ``down[x]`` list the covers of x from left to right.  Each
    pair of neighbouring upper covers spans a 4-cell, and those cells are
    exactly the cover-preserving boolean quadruples of the lattice; this is
    revalidated whenever an instance is built.
    """

    def __init__(self, lattice, up, down, fresh: int = 0, last_fork: ForkRecord | None = None):
        self.lattice = lattice
        self.up = {x: tuple(v) for x, v in up.items()}
        self.down = {x: tuple(v) for x, v in down.items()}
        self._fresh = fresh
        self.last_fork = last_fork
        self._validate()

    def _validate(self):
        lat = self.lattice
        if set(self.up) != set(lat.elements) or set(self.down) != set(lat.elements):
            raise ValidationFailed("cover orders do not match the element set")
        for x in lat.elements:
            if set(self.up[x]) != set(lat.upper_covers(x)) or len(self.up[x]) != len(
                lat.upper_covers(x)
            ):
                raise ValidationFailed(f"upper covers of {x!r} disagree with the lattice")
            if set(self.down[x]) != set(lat.lower_covers(x)) or len(self.down[x]) != len(
                lat.lower_covers(x)
            ):
                raise ValidationFailed(f"lower covers of {x!r} disagree with the lattice")
        if not is_slim(lat):
            raise ValidationFailed("lattice is not slim")
        if not is_semimodular(lat):
            raise ValidationFailed("lattice is not semimodular")
        from_up = set(self.cells())
        from_down = set(self._cells_from_down())
        plain = {(c.bottom, frozenset((c.left, c.right)), c.top) for c in four_cells(lat)}
        for cell_set in (from_up, from_down):
            keyed = {(c.bottom, frozenset((c.left, c.right)), c.top) for c in cell_set}
            if keyed != plain:
                raise ValidationFailed("planar cells disagree with the 4-cells")

    def cells(self) -> tuple[Cell, ...]:
        """All 4-cells, oriented: neighbouring upper covers span left and right."""
        lat = self.lattice
        out = []
        for a in lat.elements:
            ups = self.up[a]
            for b, c in zip(ups, ups[1:]):
                d = lat.join(b, c)
                if (
                    lat.covered_by(b, d)
                    and lat.covered_by(c, d)
                    and lat.meet(b, c) == a
                ):
                    out.append(Cell(a, b, c, d))
        return tuple(out)

    def _cells_from_down(self) -> tuple[Cell, ...]:
        lat = self.lattice
        out = []
        for d in lat.elements:
            lows = self.down[d]
            for b, c in zip(lows, lows[1:]):
                a = lat.meet(b, c)
                if (
                    lat.covered_by(a, b)
                    and lat.covered_by(a, c)
                    and lat.join(b, c) == d
                ):
                    out.append(Cell(a, b, c, d))
        return tuple(out)

    def cell_at(self, top: str, left: str) -> Cell:
        for cell in self.cells():
            if cell.top == top and cell.left == left:
                return cell
        raise NotA4Cell(f"no 4-cell with top {top!r} and left {left!r}")

    def left_boundary(self) -> tuple[str, ...]:
        chain = [self.lattice.bottom]
        while chain[-1] != self.lattice.top:
            chain.append(self.up[chain[-1]][0])
        return tuple(chain)

    def right_boundary(self) -> tuple[str, ...]:
        chain = [self.lattice.bottom]
        while chain[-1] != self.lattice.top:
            chain.append(self.up[chain[-1]][-1])
        return tuple(chain)

    def interval(self, lo: str, hi: str) -> "OrientedLattice":
        """The interval sublattice with the inherited cover order."""
        members = set(self.lattice.interval(lo, hi))
        sub = induced_lattice(self.lattice, members)
        up = {x: tuple(y for y in self.up[x] if y in members) for x in members}
        down = {x: tuple(y for y in self.down[x] if y in members) for x in members}
        return OrientedLattice(sub, up, down, fresh=self._fresh)

    def __repr__(self) -> str:
        return f"<OrientedLattice |L|={len(self.lattice)}>"


def oriented_grid(m: int, n: int) -> OrientedLattice:
    """The m-by-n grid with its planar orientation.

    Drawn with the first coordinate ascending to the upper left, so the
    left element of each cell is the one with the larger first coordinate.
    """
    if m < 1 or n < 1:
        raise LatticeError("grid parameters must be at least 1")
    grid = make_grid((m + 1, n + 1))
    up: dict[str, list[str]] = {}
    down: dict[str, list[str]] = {}
    for x in grid.lattice.elements:
        i, j = grid.coords(x)
        ups = []
        if i + 1 <= m:
            ups.append(grid.id_of((i + 1, j)))
        if j + 1 <= n:
            ups.append(grid.id_of((i, j + 1)))
        downs = []
        if j - 1 >= 0:
            downs.append(grid.id_of((i, j - 1)))
        if i - 1 >= 0:
            downs.append(grid.id_of((i - 1, j)))
        up[x] = ups
        down[x] = downs
    return OrientedLattice(grid.lattice, up, down)


def _left_walk(ol: OrientedLattice, cell: Cell) -> list[tuple[str, str]]:
    """Edges of the maximal descending cell sequence to the lower left."""
    edges = []
    cur = cell
    while True:
        edges.append((cur.bottom, cur.left))
        lows = ol.down[cur.left]
        pos = lows.index(cur.bottom)
        if pos == 0:
            return edges
        neighbour = lows[pos - 1]
        a2 = ol.lattice.meet(neighbour, cur.bottom)
        nxt = Cell(a2, neighbour, cur.bottom, cur.left)
        if not (
            ol.lattice.covered_by(a2, neighbour)
            and ol.lattice.covered_by(a2, cur.bottom)
        ):
            raise ValidationFailed("descending cell sequence broke on the left")
        cur = nxt


def _right_walk(ol: OrientedLattice, cell: Cell) -> list[tuple[str, str]]:
    edges = []
    cur = cell
    while True:
        edges.append((cur.bottom, cur.right))
        lows = ol.down[cur.right]
        pos = lows.index(cur.bottom)
        if pos == len(lows) - 1:
            return edges
        neighbour = lows[pos + 1]
        a2 = ol.lattice.meet(cur.bottom, neighbour)
        nxt = Cell(a2, cur.bottom, neighbour, cur.right)
        if not (
            ol.lattice.covered_by(a2, neighbour)
            and ol.lattice.covered_by(a2, cur.bottom)
        ):
            raise ValidationFailed("descending cell sequence broke on the right")
        cur = nxt


def add_fork(ol: OrientedLattice, cell: Cell) -> OrientedLattice:
    """Add a fork to a 4-cell and return the extended oriented lattice.

    The new middle element is covered by the cell's top; each leg inserts
    one new element on every edge of the descending cell sequence on its
    side, each covered by the previously added one.  The result is
    revalidated (slim, semimodular, planar consistency) and must gain
    exactly one unit of length.
    """
    lat = ol.lattice
    a, b, c, d = cell.bottom, cell.left, cell.right, cell.top
    cells = ol.cells()
    if cell not in cells:
        raise NotA4Cell(f"{cell!r} is not an oriented 4-cell of the lattice")
    lows = ol.down[d]
    if b not in lows or c not in lows or lows.index(c) != lows.index(b) + 1:
        raise ValidationFailed("cell sides are not adjacent below the top")

    left_edges = _left_walk(ol, cell)
    right_edges = _right_walk(ol, cell)
    all_edges = left_edges + right_edges
    if len(set(all_edges)) != len(all_edges):
        raise ValidationFailed("fork legs crossed the same edge")

    fresh = ol._fresh
    mid = f"f{fresh}"
    fresh += 1
    left_names = []
    for _ in left_edges:
        left_names.append(f"f{fresh}")
        fresh += 1
    right_names = []
    for _ in right_edges:
        right_names.append(f"f{fresh}")
        fresh += 1

    up = {x: list(v) for x, v in ol.up.items()}
    down = {x: list(v) for x, v in ol.down.items()}

    down[d].insert(lows.index(c), mid)
    up[mid] = [d]
    down[mid] = [left_names[0], right_names[0]]

    prev = mid
    for name, (p, q) in zip(left_names, left_edges):
        up[p][up[p].index(q)] = name
        down[q][down[q].index(p)] = name
        up[name] = [q, prev]
        down[name] = [p]
        if prev != mid:
            down[prev].insert(0, name)
        prev = name
    prev = mid
    for name, (p, q) in zip(right_names, right_edges):
        up[p][up[p].index(q)] = name
        down[q][down[q].index(p)] = name
        up[name] = [prev, q]
        down[name] = [p]
        if prev != mid:
            down[prev].append(name)
        prev = name

    covers = [(x, y) for x, ups in up.items() for y in ups]
    try:
        new_lattice = build_lattice(list(up), covers)
        result = OrientedLattice(
            new_lattice,
            up,
            down,
            fresh=fresh,
            last_fork=ForkRecord(mid, tuple(left_names), tuple(right_names)),
        )
    except LatticeError as exc:
        if isinstance(exc, ValidationFailed):
            raise
        raise ValidationFailed(f"fork produced an invalid lattice: {exc}") from exc

    if lattice_length(new_lattice) != lattice_length(lat) + 1:
        raise ValidationFailed("fork did not increase the length by one")
    expected = len(lat) + 1 + len(left_edges) + len(right_edges)
    if len(new_lattice) != expected:
        raise ValidationFailed("fork produced an unexpected element count")
    return result


def inner_coatoms(ol: OrientedLattice) -> tuple[str, ...]:
    """Coatoms off the boundary chains, from left to right."""
    boundary = set(ol.left_boundary()) | set(ol.right_boundary())
    return tuple(c for c in ol.down[ol.lattice.top] if c not in boundary)


def s7_family(i: int) -> OrientedLattice:
    """The i-th member of the S7 family.

    Starts by adding a fork to the only 4-cell of the four-element boolean
    lattice and then repeatedly forks the rightmost 4-cell containing the
    top.  The result is slim rectangular, has exactly i inner coatoms, and
    has length i + 2.
    """
    if i < 1:
        raise LatticeError("the family is indexed from 1")
    ol = oriented_grid(1, 1)
    for _ in range(i):
        top = ol.lattice.top
        top_cells = [cell for cell in ol.cells() if cell.top == top]
        ol = add_fork(ol, top_cells[-1])
    if len(inner_coatoms(ol)) != i:  # pragma: no cover - construction invariant
        raise ValidationFailed("inner coatom count is off")
    if lattice_length(ol.lattice) != i + 2:  # pragma: no cover
        raise ValidationFailed("length is off")
    return ol


@dataclass(frozen=True)
class ForkScript:
    """A slim rectangular recipe: base grid sizes plus fork cell selectors.

    Each step names the 4-cell of the current lattice to fork by its top
    and left elements.
    """

    base_sizes: tuple[int, int]
    steps: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if len(self.base_sizes) != 2 or any(s < 2 for s in self.base_sizes):
            raise LatticeError(f"bad base grid sizes {self.base_sizes!r}")

    def to_jsonable(self) -> dict:
        return {
            "base_sizes": list(self.base_sizes),
            "steps": [list(step) for step in self.steps],
        }

    @classmethod
    def from_jsonable(cls, data) -> "ForkScript":
        if isinstance(data, list):
            raise LatticeError("fork script must be an object with base_sizes and steps")
        base = tuple(data.get("base_sizes", ()))
        steps = tuple((str(t), str(l)) for t, l in data.get("steps", ()))
        return cls(base, steps)


def build_slim_rectangular(script: ForkScript) -> OrientedLattice:
    """Replay a fork script from its base grid; every prefix is validated."""
    ol = oriented_grid(script.base_sizes[0] - 1, script.base_sizes[1] - 1)
    for top, left in script.steps:
        ol = add_fork(ol, ol.cell_at(top, left))
    return ol


def find_rectangular_extension(
    lattice: FiniteLattice, max_size: int | None = None, max_forks: int = 3
) -> tuple[ForkScript, OrientedLattice, dict[str, str]]:
    """Bounded search for a slim rectangular lattice containing the input.

    Fork scripts are generated over all base grids within the size bound
    and tested in order of increasing result size; the first candidate the
    input embeds into wins.  Returns the script, the replayed lattice, and
    the embedding.
    """
    if max_size is None:
        max_size = max(14, len(lattice) + 8)
    candidates: list[tuple[int, int, int, tuple, OrientedLattice]] = []
    bases = sorted(
        (
            (m, n)
            for m in range(1, max_size)
            for n in range(1, max_size)
            if (m + 1) * (n + 1) <= max_size
        ),
        key=lambda mn: ((mn[0] + 1) * (mn[1] + 1), mn),
    )
    for base_index, (m, n) in enumerate(bases):

        def grow(ol: OrientedLattice, steps: tuple):
            candidates.append((len(ol.lattice), base_index, len(steps), steps, ol))
            if len(steps) >= max_forks:
                return
            for cell in ol.cells():
                if len(ol.lattice) + 3 > max_size:
                    continue
                extended = add_fork(ol, cell)
                if len(extended.lattice) <= max_size:
                    grow(extended, steps + ((cell.top, cell.left),))

        grow(oriented_grid(m, n), ())

    candidates.sort(key=lambda c: (c[0], c[1], c[2], c[3]))
    for size, base_index, _, steps, ol in candidates:
        if size < len(lattice):
            continue
        embedding = find_embedding(lattice, ol.lattice)
        if embedding is not None:
            m, n = bases[base_index]
            return ForkScript((m + 1, n + 1), tuple(steps)), ol, embedding
    raise NoRectangularExtensionFound(
        f"no slim rectangular extension within {max_size} elements and {max_forks} forks"
    )


def _interval_iso(
    base: OrientedLattice,
    ambient: OrientedLattice,
    lo: str,
    hi: str,
    mirrored: bool,
) -> dict[str, str] | None:
    """Orientation iso from a base grid onto the interval [lo, hi], if any."""
    members = set(ambient.lattice.interval(lo, hi))
    if len(members) != len(base.lattice):
        return None

    def axis(ol: OrientedLattice, start: str, side: int, within=None) -> list[str]:
        chain = [start]
        while True:
            ups = ol.up[chain[-1]]
            if within is not None:
                ups = tuple(u for u in ups if u in within)
            if len(ups) < 2:
                return chain
            chain.append(ups[0] if side == 0 else ups[-1])

    base_left = axis(base, base.lattice.bottom, 0)
    base_right = axis(base, base.lattice.bottom, 1)
    amb_left = axis(ambient, lo, 0, members)
    amb_right = axis(ambient, lo, 1, members)
    if mirrored:
        amb_left, amb_right = amb_right, amb_left
    if len(base_left) != len(amb_left) or len(base_right) != len(amb_right):
        return None

    mapping: dict[str, str] = {}
    for i, bl in enumerate(base_left):
        for j, br in enumerate(base_right):
            src = base.lattice.join(bl, br)
            dst = ambient.lattice.join(amb_left[i], amb_right[j])
            if dst not in members:
                return None
            mapping[src] = dst
    if len(mapping) != len(base.lattice) or set(mapping.values()) != members:
        return None
    if not _check_interval_iso(base, ambient, lo, hi, mapping, mirrored):
        return None
    return mapping


def _check_interval_iso(
    src: OrientedLattice,
    ambient: OrientedLattice,
    lo: str,
    hi: str,
    mapping: dict[str, str],
    mirrored: bool,
) -> bool:
    members = set(ambient.lattice.interval(lo, hi))
    if set(mapping) != set(src.lattice.elements):
        return False
    if set(mapping.values()) != members:
        return False
    lat = src.lattice
    amb = ambient.lattice
    for x in lat.elements:
        for y in lat.elements:
            if mapping[lat.join(x, y)] != amb.join(mapping[x], mapping[y]):
                return False
            if mapping[lat.meet(x, y)] != amb.meet(mapping[x], mapping[y]):
                return False
    for x in lat.elements:
        image_ups = [mapping[u] for u in src.up[x]]
        amb_ups = [u for u in ambient.up[mapping[x]] if u in members]
        if mirrored:
            amb_ups = list(reversed(amb_ups))
        if image_ups != amb_ups:
            return False
    return True


@dataclass(frozen=True)
class WitnessReport:
    """Everything the non-retract construction produced.

    ``extension`` is the slim rectangular lattice built around the input;
    ``embedded_copy`` locates the isomorphic copy whose retract status was
    refuted by exhaustive search.  ``congruence_trace`` lists the inner
    coatom pairs for which direct congruence generation verified that
    collapsing the pair collapses every inner coatom into the top's block.
    """

    source: FiniteLattice
    script: ForkScript
    rectangular: OrientedLattice
    m: int
    n: int
    t: int
    extension: OrientedLattice
    embedded_copy: dict[str, str]
    inner_coatoms: tuple[str, ...]
    coatom_meet: str
    retraction_found: bool
    search_nodes: int
    congruence_trace: tuple[tuple[str, str], ...]


def build_witness(
    lattice: FiniteLattice,
    script: ForkScript | None = None,
    max_size: int | None = None,
    max_forks: int = 3,
) -> WitnessReport:
    """Construct an extension of a slim semimodular lattice with no retraction.

    With the input embedded in a slim rectangular lattice built from an
    m-by-n grid, pick the least t with m+n+1 <= t and |L| < t, fork the
    t-th S7 family member's grid interval below its (m+1)-st inner coatom
    in the same way, and locate the embedded copy there.  Exhaustive search
    certifies that no retraction onto the copy exists, and the congruence
    argument for that fact is verified directly on every inner coatom pair.
    """
    if not (is_slim(lattice) and is_semimodular(lattice)):
        raise LatticeError("witness construction needs a slim semimodular lattice")
    if len(lattice) < 2:
        raise TooSmall("the one-element lattice is an absolute retract")

    if script is None:
        script, rect, embedding = find_rectangular_extension(
            lattice, max_size=max_size, max_forks=max_forks
        )
    else:
        rect = build_slim_rectangular(script)
        embedding = find_embedding(lattice, rect.lattice)
        if embedding is None:
            raise NoRectangularExtensionFound(
                "the provided script does not contain the lattice"
            )

    m = script.base_sizes[0] - 1
    n = script.base_sizes[1] - 1
    t = max(m + n + 1, len(lattice) + 1)
    ambient = s7_family(t)
    coats = inner_coatoms(ambient)
    meet_of_coats = ambient.lattice.meet_all(coats)
    anchor = coats[m]

    base = oriented_grid(m, n)
    psi: dict[str, str] | None = None
    mirrored = False
    for lo in sorted(ambient.lattice.interval(meet_of_coats, anchor)):
        for flip in (False, True):
            psi = _interval_iso(base, ambient, lo, anchor, flip)
            if psi is not None:
                mirrored = flip
                break
        if psi is not None:
            break
    if psi is None:  # pragma: no cover - the family always contains the grid
        raise ValidationFailed("no grid interval found below the anchor coatom")
    lo = psi[base.lattice.bottom]

    current_rect = oriented_grid(m, n)
    extension = ambient
    for top, left in script.steps:
        cell = current_rect.cell_at(top, left)
        if mirrored:
            target_cell = Cell(
                psi[cell.bottom], psi[cell.right], psi[cell.left], psi[cell.top]
            )
        else:
            target_cell = Cell(
                psi[cell.bottom], psi[cell.left], psi[cell.right], psi[cell.top]
            )
        new_rect = add_fork(current_rect, cell)
        new_ext = add_fork(extension, target_cell)
        rec_r = new_rect.last_fork
        rec_k = new_ext.last_fork
        assert rec_r is not None and rec_k is not None
        psi[rec_r.mid] = rec_k.mid
        leg_pairs = (
            (rec_r.left_leg, rec_k.right_leg if mirrored else rec_k.left_leg),
            (rec_r.right_leg, rec_k.left_leg if mirrored else rec_k.right_leg),
        )
        for r_leg, k_leg in leg_pairs:
            if len(k_leg) < len(r_leg):
                raise ValidationFailed("mirrored fork leg is shorter than expected")
            for rx, kx in zip(r_leg, k_leg):
                psi[rx] = kx
        current_rect, extension = new_rect, new_ext
        if not _check_interval_iso(current_rect, extension, lo, anchor, psi, mirrored):
            raise ValidationFailed("replayed interval drifted from the rectangular lattice")

    copy = {x: psi[embedding[x]] for x in lattice.elements}
    found, nodes = search_retraction(extension.lattice, set(copy.values()))
    if found is not None:  # pragma: no cover - contradicts the construction
        raise ValidationFailed("a retraction onto the embedded copy exists")

    trace = []
    final_coats = inner_coatoms(extension)
    top = extension.lattice.top
    for i in range(len(final_coats)):
        for j in range(i + 1, len(final_coats)):
            theta = congruence_generated_by(
                extension.lattice, [(final_coats[i], final_coats[j])]
            )
            block = theta.block_of(top)
            if not set(final_coats) <= block:
                raise ValidationFailed("collapsing two inner coatoms did not collapse all")
            trace.append((final_coats[i], final_coats[j]))

    return WitnessReport(
        source=lattice,
        script=script,
        rectangular=current_rect,
        m=m,
        n=n,
        t=t,
        extension=extension,
        embedded_copy=copy,
        inner_coatoms=final_coats,
        coatom_meet=extension.lattice.meet_all(final_coats),
        retraction_found=found is not None,
        search_nodes=nodes,
        congruence_trace=tuple(trace),
    )
