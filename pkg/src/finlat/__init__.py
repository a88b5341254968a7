"""finlat: finite lattice computations.

Validated finite lattices, chain covers and order dimension, grids and
their structure maps, retraction constructions with an absolute-retract
classifier, fork extensions of slim semimodular lattices, and a
brute-force oracle that certifies everything by exhaustion.
"""

from .core import (
    Cell,
    CycleDetected,
    FiniteLattice,
    LatticeError,
    NonReducedCovers,
    NotALattice,
    NotASublattice,
    PropertyReport,
    atoms,
    build_lattice,
    check_sublattice,
    classify_properties,
    coatoms,
    four_cells,
    grid_factor_sizes,
    induced_lattice,
    is_boolean,
    is_distributive,
    is_semimodular,
    is_slim,
    join_irreducibles,
    lattice_length,
)
from .chains import (
    ChainDecomposition,
    EmptyChainProduced,
    GridEmbedding,
    NotDistributive,
    TrivialLattice,
    disjointify_chains,
    grid_embed,
    min_chain_cover,
    order_dimension,
)
from .grids import (
    BooleanInput,
    Grid,
    NotAFilter,
    NotAnIdeal,
    NotASubgrid,
    NotIsomorphism,
    TrivialFactor,
    canonical_joinands,
    dimension_bump,
    hall_dilworth_glue,
    make_grid,
    recover_subgrid_chains,
)
from .retractions import (
    ClassId,
    Congruence,
    Cover01Report,
    Homomorphism,
    NotEligible,
    NotInClass,
    Verdict,
    WitnessCertificate,
    boolean_retraction,
    chain_retraction,
    check_cover01,
    classify_absolute_retract,
    grid_retraction,
    retract_onto,
)
from .oracle import (
    Assignment,
    CeilingExceeded,
    Equation,
    EquationSystem,
    NotProper,
    Term,
    all_sublattices,
    build_equation_system,
    congruence_generated_by,
    enumerate_distributive_lattices,
    enumerate_small_lattices,
    exists_retraction,
    find_embedding,
    induced_homomorphism,
    is_isomorphic,
    search_retraction,
    solve_equation_system,
)
from .slim import (
    ForkRecord,
    ForkScript,
    NoRectangularExtensionFound,
    NotA4Cell,
    OrientedLattice,
    TooSmall,
    ValidationFailed,
    WitnessReport,
    add_fork,
    build_slim_rectangular,
    build_witness,
    find_rectangular_extension,
    inner_coatoms,
    oriented_grid,
    s7_family,
)

__version__ = "0.1.0"
