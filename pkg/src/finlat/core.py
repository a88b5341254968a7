"""Finite lattices presented by cover relations.

Every other module in the package (chain covers, grids, retractions, fork
extensions, the brute-force oracle) consumes the ``FiniteLattice`` values
built here.  Element identifiers are opaque strings; internal indices are
assigned by sorted identifier order, so all derived structure is
reproducible across runs.  Lattice values are immutable after construction
and safe for concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

__all__ = [
    "LatticeError",
    "CycleDetected",
    "NonReducedCovers",
    "NotALattice",
    "NotASublattice",
    "FiniteLattice",
    "build_lattice",
    "join_irreducibles",
    "atoms",
    "coatoms",
    "lattice_length",
    "is_distributive",
    "is_semimodular",
    "is_boolean",
    "is_slim",
    "grid_factor_sizes",
    "PropertyReport",
    "classify_properties",
    "Cell",
    "four_cells",
    "check_sublattice",
    "induced_lattice",
]


class LatticeError(Exception):
    """Base class for all domain errors raised by this package."""


class CycleDetected(LatticeError):
    """The declared cover relation contains a directed cycle."""


class NonReducedCovers(LatticeError):
    """A declared cover is already implied by a chain of other covers."""


class NotALattice(LatticeError):
    """Some pair of elements has no unique join or meet."""

    def __init__(self, pair: tuple[str, str], message: str | None = None):
        self.pair = pair
        super().__init__(message or f"pair {pair!r} has no unique join or meet")


class NotASublattice(LatticeError):
    """A subset is not closed under the ambient join and meet."""


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FiniteLattice:
    """A finite lattice given by its covering relation.

    The order is the reflexive-transitive closure of the covers.  Join and
    meet tables are materialized eagerly (target sizes are small), and
    construction fails unless every pair of elements has a unique least
    upper bound and a unique greatest lower bound.  Declared covers must be
    transitively reduced; malformed input is rejected rather than repaired.
    """

    __slots__ = (
        "elements",
        "covers",
        "bottom",
        "top",
        "_index",
        "_up",
        "_down",
        "_join",
        "_meet",
        "_ucov",
        "_lcov",
        "_ucov_ids",
        "_lcov_ids",
    )

    def __init__(self, elements, covers):
        ids = list(elements)
        if not ids:
            raise LatticeError("a lattice needs at least one element")
        if len(set(ids)) != len(ids):
            raise LatticeError("element identifiers must be distinct")
        self.elements = tuple(sorted(ids))
        index = {e: i for i, e in enumerate(self.elements)}
        self._index = index
        n = len(self.elements)

        cover_pairs = set()
        for lo, hi in covers:
            if lo not in index or hi not in index:
                raise LatticeError(f"cover ({lo!r}, {hi!r}) mentions an undeclared element")
            if lo == hi:
                raise CycleDetected(f"cover ({lo!r}, {hi!r}) is a self-loop")
            cover_pairs.add((lo, hi))
        self.covers = frozenset(cover_pairs)

        ucov = [0] * n
        lcov = [0] * n
        for lo, hi in cover_pairs:
            ucov[index[lo]] |= 1 << index[hi]
            lcov[index[hi]] |= 1 << index[lo]
        self._ucov = tuple(ucov)
        self._lcov = tuple(lcov)

        # Reflexive-transitive closure by DFS; detects cycles.
        up = [0] * n
        state = [0] * n  # 0 new, 1 on stack, 2 done

        def close(i: int):
            state[i] = 1
            acc = 1 << i
            for j in _bits(ucov[i]):
                if state[j] == 1:
                    raise CycleDetected("cover relation contains a cycle")
                if state[j] == 0:
                    close(j)
                acc |= up[j]
            up[i] = acc
            state[i] = 2

        for i in range(n):
            if state[i] == 0:
                close(i)
        self._up = tuple(up)
        down = [0] * n
        for i in range(n):
            for j in _bits(up[i]):
                down[j] |= 1 << i
        self._down = tuple(down)

        # Declared covers must be exactly the transitive reduction.
        for lo, hi in cover_pairs:
            i, j = index[lo], index[hi]
            between = up[i] & down[j] & ~(1 << i) & ~(1 << j)
            if between:
                raise NonReducedCovers(f"cover ({lo!r}, {hi!r}) is implied transitively")

        bottoms = [i for i in range(n) if down[i] == 1 << i]
        tops = [i for i in range(n) if up[i] == 1 << i]
        if len(bottoms) > 1:
            raise NotALattice((self.elements[bottoms[0]], self.elements[bottoms[1]]))
        if len(tops) > 1:
            raise NotALattice((self.elements[tops[0]], self.elements[tops[1]]))
        self.bottom = self.elements[bottoms[0]]
        self.top = self.elements[tops[0]]

        # Join and meet tables; existence and uniqueness checked pairwise.
        join = [[0] * n for _ in range(n)]
        meet = [[0] * n for _ in range(n)]
        for i in range(n):
            join[i][i] = i
            meet[i][i] = i
            for j in range(i + 1, n):
                common = up[i] & up[j]
                least = [k for k in _bits(common) if down[k] & common == 1 << k]
                if len(least) != 1:
                    raise NotALattice((self.elements[i], self.elements[j]))
                join[i][j] = join[j][i] = least[0]
                common = down[i] & down[j]
                greatest = [k for k in _bits(common) if up[k] & common == 1 << k]
                if len(greatest) != 1:
                    raise NotALattice((self.elements[i], self.elements[j]))
                meet[i][j] = meet[j][i] = greatest[0]
        self._join = tuple(tuple(row) for row in join)
        self._meet = tuple(tuple(row) for row in meet)

        self._ucov_ids = tuple(
            tuple(self.elements[j] for j in _bits(ucov[i])) for i in range(n)
        )
        self._lcov_ids = tuple(
            tuple(self.elements[j] for j in _bits(lcov[i])) for i in range(n)
        )

    # -- structural accessors -------------------------------------------------

    def index(self, x: str) -> int:
        return self._index[x]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._index

    def leq(self, x: str, y: str) -> bool:
        return bool(self._up[self._index[x]] >> self._index[y] & 1)

    def lt(self, x: str, y: str) -> bool:
        return x != y and self.leq(x, y)

    def covered_by(self, x: str, y: str) -> bool:
        """True iff y covers x."""
        return bool(self._ucov[self._index[x]] >> self._index[y] & 1)

    def join(self, x: str, y: str) -> str:
        return self.elements[self._join[self._index[x]][self._index[y]]]

    def meet(self, x: str, y: str) -> str:
        return self.elements[self._meet[self._index[x]][self._index[y]]]

    def join_all(self, xs) -> str:
        out = self._index[self.bottom]
        for x in xs:
            out = self._join[out][self._index[x]]
        return self.elements[out]

    def meet_all(self, xs) -> str:
        out = self._index[self.top]
        for x in xs:
            out = self._meet[out][self._index[x]]
        return self.elements[out]

    def upper_covers(self, x: str) -> tuple[str, ...]:
        return self._ucov_ids[self._index[x]]

    def lower_covers(self, x: str) -> tuple[str, ...]:
        return self._lcov_ids[self._index[x]]

    def up_set(self, x: str) -> frozenset[str]:
        return frozenset(self.elements[j] for j in _bits(self._up[self._index[x]]))

    def down_set(self, x: str) -> frozenset[str]:
        return frozenset(self.elements[j] for j in _bits(self._down[self._index[x]]))

    def interval(self, lo: str, hi: str) -> tuple[str, ...]:
        mask = self._up[self._index[lo]] & self._down[self._index[hi]]
        return tuple(self.elements[j] for j in _bits(mask))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteLattice):
            return NotImplemented
        return self.elements == other.elements and self.covers == other.covers

    def __hash__(self) -> int:
        return hash((self.elements, self.covers))

    def __repr__(self) -> str:
        return f"<FiniteLattice |L|={len(self.elements)} length={lattice_length(self)}>"


def build_lattice(elements, covers) -> FiniteLattice:
    """Validate a presentation and return the lattice it generates.

    ``elements`` is a sequence of distinct identifier strings; ``covers`` a
    set of (lower, upper) pairs that must already be transitively reduced.
    """
    return FiniteLattice(elements, covers)


def join_irreducibles(lattice: FiniteLattice) -> tuple[str, ...]:
    """All non-bottom elements with exactly one lower cover, sorted."""
    return tuple(
        x
        for x in lattice.elements
        if x != lattice.bottom and len(lattice.lower_covers(x)) == 1
    )


def atoms(lattice: FiniteLattice) -> tuple[str, ...]:
    return lattice.upper_covers(lattice.bottom)


def coatoms(lattice: FiniteLattice) -> tuple[str, ...]:
    return lattice.lower_covers(lattice.top)


def lattice_length(lattice: FiniteLattice) -> int:
    """Length of a longest maximal chain, computed by longest-path search."""
    order = sorted(range(len(lattice)), key=lambda i: bin(lattice._down[i]).count("1"))
    dist = [0] * len(lattice)
    for i in order:
        for j in _bits(lattice._ucov[i]):
            if dist[i] + 1 > dist[j]:
                dist[j] = dist[i] + 1
    return dist[lattice.index(lattice.top)]


def is_distributive(lattice: FiniteLattice) -> bool:
    """Check x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z) over all triples."""
    n = len(lattice)
    join = lattice._join
    meet = lattice._meet
    for x in range(n):
        mx = meet[x]
        for y in range(n):
            mxy = mx[y]
            jy = join[y]
            for z in range(n):
                if mx[jy[z]] != join[mxy][mx[z]]:
                    return False
    return True


def is_semimodular(lattice: FiniteLattice) -> bool:
    """Check that x ≺ y implies x ∨ z ⪯ y ∨ z, over all covers and z."""
    n = len(lattice)
    join = lattice._join
    ucov = lattice._ucov
    for lo, hi in lattice.covers:
        i, j = lattice.index(lo), lattice.index(hi)
        for z in range(n):
            a, b = join[i][z], join[j][z]
            if a != b and not ucov[a] >> b & 1:
                return False
    return True


def is_boolean(lattice: FiniteLattice) -> bool:
    """Test isomorphism with the power set of the atoms."""
    ats = atoms(lattice)
    k = len(ats)
    if len(lattice) != 1 << k:
        return False
    of_subset: dict[frozenset[str], str] = {}
    for r in range(k + 1):
        for sub in combinations(ats, r):
            v = lattice.join_all(sub)
            key = frozenset(sub)
            if v in of_subset.values():
                return False
            of_subset[key] = v
    items = list(of_subset.items())
    for s1, v1 in items:
        for s2, v2 in items:
            if lattice.meet(v1, v2) != of_subset[s1 & s2]:
                return False
    return True


def is_slim(lattice: FiniteLattice) -> bool:
    """True iff the join-irreducibles contain no 3-element antichain."""
    ji = join_irreducibles(lattice)
    for a, b, c in combinations(ji, 3):
        if (
            not lattice.leq(a, b) and not lattice.leq(b, a)
            and not lattice.leq(a, c) and not lattice.leq(c, a)
            and not lattice.leq(b, c) and not lattice.leq(c, b)
        ):
            return False
    return True


def grid_factor_sizes(lattice: FiniteLattice) -> tuple[int, ...] | None:
    """Factor sizes if the lattice is a direct product of nontrivial chains.

    Returns the chain sizes (each ≥ 2, sorted descending) when the
    join-irreducibles split into pairwise incomparable chains, which by
    Birkhoff duality characterizes products of chains among distributive
    lattices.  Returns None otherwise.
    """
    if not is_distributive(lattice):
        return None
    ji = list(join_irreducibles(lattice))
    remaining = set(ji)
    components: list[list[str]] = []
    while remaining:
        seed = min(remaining)
        comp = {seed}
        frontier = [seed]
        while frontier:
            x = frontier.pop()
            for y in list(remaining - comp):
                if lattice.leq(x, y) or lattice.leq(y, x):
                    comp.add(y)
                    frontier.append(y)
        remaining -= comp
        components.append(sorted(comp))
    for comp in components:
        for a, b in combinations(comp, 2):
            if not lattice.leq(a, b) and not lattice.leq(b, a):
                return None
    sizes = tuple(sorted((len(c) + 1 for c in components), reverse=True))
    prod = 1
    for s in sizes:
        prod *= s
    if prod != len(lattice):  # cannot happen for a valid distributive input
        return None
    return sizes


@dataclass(frozen=True)
class PropertyReport:
    """Structural classification of one lattice."""

    distributive: bool
    semimodular: bool
    boolean: bool
    slim: bool
    length: int
    join_irreducible_count: int


def classify_properties(lattice: FiniteLattice) -> PropertyReport:
    """Compute the standard predicates by their direct definitions."""
    distributive = is_distributive(lattice)
    report = PropertyReport(
        distributive=distributive,
        semimodular=is_semimodular(lattice),
        boolean=is_boolean(lattice),
        slim=is_slim(lattice),
        length=lattice_length(lattice),
        join_irreducible_count=len(join_irreducibles(lattice)),
    )
    # Sanity: these implications are theorems; a violation means a bug here.
    if report.boolean and not report.distributive:
        raise LatticeError("boolean lattice misclassified as non-distributive")
    if report.distributive and not report.semimodular:
        raise LatticeError("distributive lattice misclassified as non-semimodular")
    if report.distributive and report.length != report.join_irreducible_count:
        raise LatticeError("distributive length law violated")
    return report


@dataclass(frozen=True)
class Cell:
    """A cover-preserving four-element boolean sublattice.

    The left/right labels follow canonical element order here; the planar
    modules maintain their own orientation.
    """

    bottom: str
    left: str
    right: str
    top: str


def four_cells(lattice: FiniteLattice) -> tuple[Cell, ...]:
    """All 4-cells: a ≺ b, c ≺ d with b ∧ c = a and b ∨ c = d."""
    cells = []
    for a in lattice.elements:
        ups = lattice.upper_covers(a)
        for b, c in combinations(sorted(ups), 2):
            d = lattice.join(b, c)
            if (
                lattice.covered_by(b, d)
                and lattice.covered_by(c, d)
                and lattice.meet(b, c) == a
            ):
                cells.append(Cell(a, b, c, d))
    return tuple(cells)


def check_sublattice(lattice: FiniteLattice, subset) -> bool:
    """True iff the subset is nonempty and closed under join and meet."""
    elems = set(subset)
    if not elems:
        return False
    for x in elems:
        if x not in lattice:
            return False
    for x in elems:
        for y in elems:
            if lattice.join(x, y) not in elems or lattice.meet(x, y) not in elems:
                return False
    return True


def induced_lattice(lattice: FiniteLattice, subset) -> FiniteLattice:
    """The sublattice on a closed subset, with its own cover relation."""
    if not check_sublattice(lattice, subset):
        raise NotASublattice(f"{sorted(subset)!r} is not closed under join and meet")
    elems = sorted(subset, key=lattice.index)
    covers = []
    for x in elems:
        for y in elems:
            if lattice.lt(x, y) and not any(
                lattice.lt(x, z) and lattice.lt(z, y) for z in elems
            ):
                covers.append((x, y))
    return FiniteLattice(elems, covers)
