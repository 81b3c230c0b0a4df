"""fmlat: exact arithmetic for even integral lattices, their discriminant
forms, small isometry groups, and Fourier-Mukai partner counting."""

from .counting import (
    FmCountReport,
    GHodgeSpec,
    NikulinReport,
    TwistedPartnerReport,
    double_coset_count,
    fm_count_abelian,
    fm_count_k3,
    nikulin_check,
    totient_order_bound,
    twisted_partner_check,
)
from .discriminant import (
    DiscriminantGroup,
    PAnalysis,
    discriminant_form,
    discriminant_group,
    p_analysis,
)
from .errors import (
    ExpressionError,
    FmlatError,
    InconclusiveError,
    PreconditionError,
    SubgroupClosureError,
    UnsupportedLatticeError,
)
from .fqf import (
    FiniteQuadraticForm,
    FqfAutomorphismGroup,
    fqf_automorphisms,
    fqf_isometric,
    fqf_standard,
    gauss_milgram_signature,
    has_u2_or_v2_component,
    order_d_element_count,
)
from .isometry import (
    GenusScanReport,
    IsometrySet,
    binary_equivalence,
    binary_genus_scan,
    induced_on_discriminant,
    is_surjective_on_discriminant,
    lattice_isometries,
)
from .lattice import (
    E8,
    Lattice,
    SublatticeSpec,
    U,
    basic_invariants,
    direct_sum,
    enriques_lattice,
    f_lattice,
    g_lattice,
    has_hyperbolic_summand,
    is_primitive_sublattice,
    k3_lattice,
    orthogonal_complement,
    parse_lattice_expr,
    rank_one,
)
from .scenarios import (
    SCENARIO_IDS,
    ScenarioReport,
    run_batch,
    run_scenario,
)
from .snf import SmithDecomposition, smith_normal_form

__all__ = [name for name in dir() if not name.startswith("_")]
