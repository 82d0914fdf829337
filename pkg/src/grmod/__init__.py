"""Isotypic decompositions and Tate cohomology of finite modules over Z[zeta_e][G]."""

from .cyclotomic import CycloElement, CycloRing, cyclotomic_polynomial, regular_rep, zeta_power
from .errors import (
    CapExceeded,
    DimensionMismatch,
    GrmodError,
    InvalidModule,
    NotContained,
    NotCyclic,
    NotEndomorphism,
    NotStable,
)
from .gmodule import (
    GModule,
    ModSubgroup,
    extend_scalars,
    h0_chi,
    isotypic_component,
    pontryagin_dual,
    quasi_idempotent_image,
    restrict_to_submodule,
    s_chi,
    tate_pair,
    twist,
    validate_module,
)
from .groups import Character, FiniteAbelianGroup, SubgroupOfG, enumerate_characters, enumerate_subgroups
from .linalg import LatticeBasis, hermite_lattice, smith_normal_form
from .oracle import oracle
from .theorems import (
    THEOREM_IDS,
    Caps,
    RandomModuleSpec,
    VerificationReport,
    campaign,
    compare_with_oracle,
    random_module,
    verify_abelian_decomposition,
    verify_cyclic_decomposition,
)

__version__ = "0.1.0"
