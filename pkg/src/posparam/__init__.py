"""Parametrizations of positive semidefinite matrices and separability tools.

Two parametrizations are provided: Schur-complement contractions (``sc``) and
a near tri-diagonal Jacobi model (``jacobi``). ``qstate`` and ``separable``
apply them to bipartite density matrices.
"""

from .errors import (
    DecompositionError,
    DimensionError,
    DomainError,
    ExtractionError,
    PosParamError,
    RankDeficiencyError,
)
from .jacobi import (
    HankelMoments,
    JacobiParameters,
    build_jk,
    hankel_from_tridiagonal,
    jacobi_cholesky,
    jacobi_determinant,
    jacobi_extract,
    jacobi_reconstruct,
    tridiagonal_from_hankel,
)
from .matcore import (
    DEFAULT_TOL,
    Tolerances,
    eigh_psd,
    hermitian_part,
    is_hermitian,
    is_psd,
    numerical_rank,
    pinv_sqrt,
    principal_sqrt,
    semidefinite_cholesky,
)
from .qstate import (
    BipartiteState,
    CertificateTerm,
    DensityMatrix,
    KrausSet,
    QubitJacobiCoords,
    SeparabilityVerdict,
    Verdict,
    jacobi_to_qubit,
    kraus_from_state,
    min_pt_eigenvalue,
    partial_transpose_b,
    ppt_verdict,
    qubit_is_pure,
    qubit_to_jacobi,
)
from .sc import (
    BlockContraction,
    SCParameters,
    block_contraction,
    row_contraction_assemble,
    row_contraction_decompose,
    sc_cholesky,
    sc_determinant,
    sc_extract,
    sc_is_rank_one,
    sc_reconstruct,
)
from .separable import (
    PatternFamily,
    PatternKind,
    checklist_3x3,
    gen_hankel_state,
    gen_pattern_state,
    hankel_state_from_measure,
    pattern_matrix,
    rank1_kraus_test,
    run_detector_battery,
)

__version__ = "0.1.0"
