"""Analysis of finite-dimensional Kraus families.

Normalization and commutation checks, the fast/decaying decomposition of the
associated completely positive map, joint diagonalization with
non-demolition witnesses, and exact or sampled outcome-string measures.
"""

__version__ = "0.1.0"

from .channel import (
    KrausFamily,
    Picture,
    Superoperator,
    ValidationReport,
    apply,
    commutator_defect,
    defect_identity_check,
    norm_identity_check,
    superoperator,
    validate,
)
from .errors import *  # noqa: F401,F403
from .families import (
    amplitude_damping,
    cyclic_shift,
    identity_family,
    pauli_x,
    projective_qubit,
    random_block_family,
    random_commuting_normal,
    random_kraus_isometry,
    shift_pair,
    truncated_shift,
)
from .linalg import adjoint, hermitian_eig, normality_defect, null_space, operator_norm
from .spectral import JointEigenstructure, NdWitness, build_witness, simultaneous_diagonalize
from .structure import (
    Decomposition,
    StationaryState,
    block_equation_residuals,
    cesaro_stationary,
    decompose,
    fixed_point_space,
    solve_neumann,
    theorem_check,
    verify_decomposition,
)
from .trajectory import (
    MeasureTable,
    basis_vector,
    build_cyclic_example,
    build_truncated_example,
    definetti_check,
    empirical_measure,
    enumerate_measure,
    exchangeability_check,
    sample_strings,
    sample_trajectory,
    string_probability,
    total_variation,
)
from .files import read_family, read_state, write_family, write_state
