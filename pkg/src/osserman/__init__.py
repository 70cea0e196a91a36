"""Osserman curvature tensors, Clifford structures, and the maps between them.

The package constructs curvature tensors from anticommuting generator
families, verifies the Osserman spectral property by seeded sampling,
recovers the generating Clifford system back from a tensor, and carries the
octonionic Cayley-plane computation showing that not every Osserman tensor
admits such a system.
"""

from .errors import (
    AlignmentFailed,
    AmbiguousClustering,
    DimensionMismatch,
    ExceedsRadonBound,
    FrameInconsistent,
    GaugeFailed,
    GenericityExhausted,
    HypothesesViolated,
    InvalidSystem,
    InvalidTensor,
    NonFinite,
    NonSymmetric,
    NotUnit,
    ObstructionDetected,
    OssermanError,
    PeelInconsistent,
    RecoveryFailed,
    ShapeMismatch,
    SpectrumMismatch,
    TieBreakNeeded,
    UnstableSubspace,
)
from .linalg import (
    SpectralDecomposition,
    SpectrumProfile,
    SymOperator,
    cluster_spectrum,
    image_sum_dim,
    numeric_rank,
    sym_eigen,
)
from .curvature import (
    CurvatureTensor,
    combine,
    curvature_action,
    direct_sum,
    jacobi,
    jacobi_spectrum,
    mixed_jacobi,
    sphere_tensor,
    tensor_from_jacobi,
    validate_tensor,
)
from .clifford import (
    CliffordSystem,
    clifford_jacobi,
    curvature_from_clifford,
    generate_hurwitz_family,
    radon_number,
    validate_clifford,
)
from .verify import (
    Classification,
    DualityReport,
    OssermanReport,
    classify,
    duality_check,
    osserman_check,
)
from .recovery import (
    FactorFrame,
    LambdaOp,
    PhiValue,
    RecoveryConfig,
    StableSubspace,
    align_pair,
    assemble_frame,
    factor_jacobi,
    gauge_generators,
    generic_pair,
    generic_triple,
    lambda_phi_spectrum,
    normalize,
    peel,
    phi,
    recover_clifford,
    recover_clifford_traced,
    stable_subspace,
)
from .cayley import (
    CayleyPoint,
    Octonion,
    cayley_jacobi,
    cayley_tensor,
    e_alpha_membership,
    obstruction_nullspace,
    oct_conj,
    oct_mul,
    span_constraint_nullspace,
)

__version__ = "0.1.0"
