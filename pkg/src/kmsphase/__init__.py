"""KMS equilibrium-state phase diagrams for Toeplitz-Cuntz-Krieger systems.

Given a finite 0-1 transition matrix with no zero rows and per-generator
energies above 1, this package computes the Dirichlet partition functions
of the associated gauge dynamics, locates the critical inverse
temperature, and classifies the KMS states in every temperature regime,
with brute-force word enumeration as the independent oracle for every
closed form.
"""

from .model import (
    ColumnSpace,
    PropertyReport,
    SystemModel,
    a_xyz,
    build_model,
    column_space,
    properties,
)
from .words import AdmissibleWord, enumerate_words, partial_series, shell_sum
from .partition import (
    PartitionReport,
    TransferMatrix,
    evaluate,
    geometric_bound,
    transfer_matrix,
    z_gamma,
)
from .critical import (
    AbscissaEstimate,
    CriticalReport,
    abscissa_estimate,
    beta_c,
    perron_vector,
    spectral_radius,
)
from .states import (
    Decomposition,
    QState,
    RootMeasure,
    TypeTag,
    cooling,
    decompose,
    finite_type_state,
    ground_state,
    omega_infinity_mass,
    qstate_from_atoms,
)
from .invariance import (
    InvarianceVerdict,
    fixed_point_from_state,
    invariant_state_from_fixed_point,
    is_subinvariant,
)
from .classify import (
    OaSimplex,
    PhaseRegime,
    ScanReport,
    classify_ta,
    factors_through_oa,
    kms_oa,
    oa_beta_scan,
)
from .star import (
    StarCriticalState,
    StarPartition,
    StarSystem,
    build_star,
    star_kms_at_critical,
    star_partition,
    star_z0,
    truncated_model,
)

__version__ = "0.1.0"
