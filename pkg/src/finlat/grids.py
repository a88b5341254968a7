"""Products of nontrivial finite chains and their structure maps.

A grid is kept together with its canonical chains (the principal ideals
below the maximal join-irreducible of each axis).  The module provides the
canonical-joinand decomposition, recovery of the defining subchains of a
full-dimensional grid sublattice, Hall-Dilworth gluing, and the
length-preserving embedding of a non-boolean grid into a grid of one
dimension higher.
"""

from __future__ import annotations

from .core import (
    FiniteLattice,
    LatticeError,
    build_lattice,
    check_sublattice,
    induced_lattice,
    lattice_length,
)

__all__ = [
    "TrivialFactor",
    "NotASubgrid",
    "NotAFilter",
    "NotAnIdeal",
    "NotIsomorphism",
    "BooleanInput",
    "Grid",
    "make_grid",
    "canonical_joinands",
    "recover_subgrid_chains",
    "hall_dilworth_glue",
    "dimension_bump",
]


class TrivialFactor(LatticeError):
    """A grid factor must have at least two elements."""


class NotASubgrid(LatticeError):
    """The subset is not a grid sublattice of full dimension."""


class NotAFilter(LatticeError):
    pass


class NotAnIdeal(LatticeError):
    pass


class NotIsomorphism(LatticeError):
    pass


class BooleanInput(LatticeError):
    """Dimension bump needs some factor of size at least three."""


def _coord_id(coords: tuple[int, ...]) -> str:
    return ",".join(str(c) for c in coords)


class Grid:
    """An n-dimensional grid: the product of n nontrivial finite chains.

    Elements of the underlying lattice are coordinate tuples rendered as
    comma-joined identifier strings, e.g. ``"2,0"`` in a 2-dimensional grid.
    """

    __slots__ = ("factor_sizes", "lattice", "canonical_chains", "_coords")

    def __init__(self, factor_sizes: tuple[int, ...]):
        if not factor_sizes:
            raise TrivialFactor("a grid needs at least one factor")
        if any(s < 2 for s in factor_sizes):
            raise TrivialFactor(f"factor sizes {factor_sizes!r} include a trivial chain")
        self.factor_sizes = tuple(int(s) for s in factor_sizes)

        coords_list: list[tuple[int, ...]] = [()]
        for s in self.factor_sizes:
            coords_list = [c + (k,) for c in coords_list for k in range(s)]
        elements = [_coord_id(c) for c in coords_list]
        self._coords = dict(zip(elements, coords_list))

        covers = []
        for c in coords_list:
            for axis, s in enumerate(self.factor_sizes):
                if c[axis] + 1 < s:
                    upper = c[:axis] + (c[axis] + 1,) + c[axis + 1 :]
                    covers.append((_coord_id(c), _coord_id(upper)))
        self.lattice = build_lattice(elements, covers)

        n = len(self.factor_sizes)
        chains = []
        for axis, s in enumerate(self.factor_sizes):
            chain = tuple(
                _coord_id(tuple(k if i == axis else 0 for i in range(n)))
                for k in range(s)
            )
            chains.append(chain)
        self.canonical_chains = tuple(chains)

    @property
    def dimension(self) -> int:
        return len(self.factor_sizes)

    def coords(self, x: str) -> tuple[int, ...]:
        return self._coords[x]

    def id_of(self, coords) -> str:
        x = _coord_id(tuple(coords))
        if x not in self._coords:
            raise LatticeError(f"coordinates {coords!r} outside the grid")
        return x

    def axis_lattice(self, axis: int) -> FiniteLattice:
        """The canonical chain of one axis as a lattice in its own right."""
        return induced_lattice(self.lattice, self.canonical_chains[axis])

    def projection_map(self, axis: int) -> dict[str, str]:
        """The surjection onto the axis chain, x ↦ x ∧ (top of the chain)."""
        top = self.canonical_chains[axis][-1]
        return {x: self.lattice.meet(x, top) for x in self.lattice.elements}

    def __repr__(self) -> str:
        return f"<Grid {'x'.join(str(s) for s in self.factor_sizes)}>"


def make_grid(sizes) -> Grid:
    """Build the grid with the given factor sizes (each at least 2)."""
    return Grid(tuple(sizes))


def canonical_joinands(grid: Grid, x: str) -> tuple[str, ...]:
    """The unique decomposition x = x1 ∨ ... ∨ xn along the canonical chains.

    The i-th joinand is x ∧ (top of the i-th canonical chain).
    """
    return tuple(
        grid.lattice.meet(x, chain[-1]) for chain in grid.canonical_chains
    )


def recover_subgrid_chains(grid: Grid, subset) -> tuple[tuple[str, ...], ...]:
    """Recover the defining subchains of a full-dimensional grid sublattice.

    For a sublattice L that is a grid of the same dimension as the ambient
    grid, the j-th chain is { x_j : x in L } drawn from the j-th canonical
    chain, and L is exactly the set of elements all of whose canonical
    joinands land in the recovered chains.  Violation of either fact means
    the subset was not such a sublattice.
    """
    elems = set(subset)
    if not check_sublattice(grid.lattice, elems):
        raise NotASubgrid("subset is not a sublattice")
    joinands = {x: canonical_joinands(grid, x) for x in elems}
    n = grid.dimension
    chains = []
    for j in range(n):
        members = {joinands[x][j] for x in elems}
        chain = tuple(sorted(members, key=lambda c: grid.coords(c)[j]))
        if len(chain) < 2:
            raise NotASubgrid(f"recovered chain {j} is trivial")
        chains.append(chain)
    chain_sets = [set(c) for c in chains]
    reproduced = {
        x
        for x in grid.lattice.elements
        if all(
            canonical_joinands(grid, x)[j] in chain_sets[j] for j in range(n)
        )
    }
    if reproduced != elems:
        raise NotASubgrid("membership formula does not reproduce the subset")
    return tuple(chains)


def _is_filter(lattice: FiniteLattice, subset: set[str]) -> bool:
    if not subset:
        return False
    for x in subset:
        for y in lattice.up_set(x):
            if y not in subset:
                return False
    return check_sublattice(lattice, subset)


def _is_ideal(lattice: FiniteLattice, subset: set[str]) -> bool:
    if not subset:
        return False
    for x in subset:
        for y in lattice.down_set(x):
            if y not in subset:
                return False
    return check_sublattice(lattice, subset)


def hall_dilworth_glue(
    h1: FiniteLattice,
    f1,
    h2: FiniteLattice,
    i2,
    psi: dict[str, str],
) -> FiniteLattice:
    """Glue h2 on top of h1 along an isomorphism from a filter onto an ideal.

    Elements of the filter f1 of h1 are identified with psi-images in the
    ideal i2 of h2, keeping h1's identifiers for the overlap.  Identifiers
    of h2 that would collide with h1's are suffixed deterministically.
    """
    f1 = set(f1)
    i2 = set(i2)
    if not _is_filter(h1, f1):
        raise NotAFilter(f"{sorted(f1)!r} is not a filter of the first lattice")
    if not _is_ideal(h2, i2):
        raise NotAnIdeal(f"{sorted(i2)!r} is not an ideal of the second lattice")
    if set(psi) != f1 or set(psi.values()) != i2 or len(psi) != len(set(psi.values())):
        raise NotIsomorphism("psi is not a bijection from the filter onto the ideal")
    for x in f1:
        for y in f1:
            if h1.leq(x, y) != h2.leq(psi[x], psi[y]):
                raise NotIsomorphism("psi does not preserve order both ways")

    inv_psi = {v: k for k, v in psi.items()}
    used = set(h1.elements)
    rename: dict[str, str] = {}
    for x in sorted(h2.elements):
        if x in i2:
            rename[x] = inv_psi[x]
        else:
            fresh = x
            while fresh in used:
                fresh = fresh + "'"
            rename[x] = fresh
            used.add(fresh)
    original = {v: k for k, v in rename.items() if k not in i2}

    elements = list(h1.elements) + sorted(original)

    def glued_leq(x: str, y: str) -> bool:
        if x in h1 and y in h1:
            return h1.leq(x, y)
        if x in h1 and y in original:
            return any(h1.leq(x, z) and h2.leq(psi[z], original[y]) for z in f1)
        if x in original and y in original:
            return h2.leq(original[x], original[y])
        return False

    covers = []
    for x in elements:
        for y in elements:
            if x != y and glued_leq(x, y):
                if not any(
                    z != x and z != y and glued_leq(x, z) and glued_leq(z, y)
                    for z in elements
                ):
                    covers.append((x, y))
    return build_lattice(elements, covers)


def dimension_bump(grid: Grid) -> tuple[Grid, dict[str, str]]:
    """Embed a non-boolean grid into a grid of one higher dimension, keeping length.

    The first factor of size at least three, with top coatom q, is split
    into the two-element chain {q, top} and the ideal below q; the embedding
    sends elements with small split-coordinate via (x, ...) ↦ (q, x, ...) and
    the rest via (x, ...) ↦ (x, q, ...), and the two parts agree on the
    overlap.  The image is the union of the ideal below (q, q, 1, ..., 1)
    and the filter above (q, q, 0, ..., 0), i.e. a Hall-Dilworth gluing of
    the two pieces inside the larger grid.
    """
    sizes = grid.factor_sizes
    split = next((j for j, s in enumerate(sizes) if s >= 3), None)
    if split is None:
        raise BooleanInput("every factor is a two-element chain")
    s = sizes[split]
    q = s - 2  # index of the coatom of the split factor
    new_sizes = sizes[:split] + (2, s - 1) + sizes[split + 1 :]
    bumped = Grid(new_sizes)

    mapping: dict[str, str] = {}
    for x in grid.lattice.elements:
        c = grid.coords(x)
        if c[split] <= q:
            nc = c[:split] + (0, c[split]) + c[split + 1 :]
        else:
            nc = c[:split] + (1, q) + c[split + 1 :]
        mapping[x] = bumped.id_of(nc)

    _validate_bump(grid, bumped, mapping, split, q)
    return bumped, mapping


def _validate_bump(grid: Grid, bumped: Grid, mapping: dict[str, str], split: int, q: int):
    src = grid.lattice
    dst = bumped.lattice
    image = set(mapping.values())
    if len(image) != len(src):
        raise LatticeError("bump embedding is not injective")
    for x in src.elements:
        for y in src.elements:
            if mapping[src.join(x, y)] != dst.join(mapping[x], mapping[y]):
                raise LatticeError("bump embedding does not preserve joins")
            if mapping[src.meet(x, y)] != dst.meet(mapping[x], mapping[y]):
                raise LatticeError("bump embedding does not preserve meets")
    if mapping[src.bottom] != dst.bottom or mapping[src.top] != dst.top:
        raise LatticeError("bump embedding does not preserve the bounds")
    for lo, hi in src.covers:
        if not dst.covered_by(mapping[lo], mapping[hi]):
            raise LatticeError("bump embedding does not preserve covers")
    if lattice_length(src) != lattice_length(dst):
        raise LatticeError("bump changed the length")
    # The image decomposes as ideal-below ∪ filter-above the two overlap corners.
    n = bumped.dimension
    hi_corner = bumped.id_of(
        tuple(
            0 if i == split else (q if i == split + 1 else bumped.factor_sizes[i] - 1)
            for i in range(n)
        )
    )
    lo_corner = bumped.id_of(
        tuple(0 if i == split else (q if i == split + 1 else 0) for i in range(n))
    )
    expected = dst.down_set(hi_corner) | dst.up_set(lo_corner)
    if image != expected:
        raise LatticeError("bump image is not the expected ideal-filter union")
