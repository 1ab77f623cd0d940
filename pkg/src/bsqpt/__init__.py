"""Two-qubit process tomography of a beamsplitter state filter.

Simulates the coincidence-postselected action of a (possibly nonideal)
beamsplitter on photon-pair polarization states, reconstructs its 16x16
process matrix from simulated measurement records the same way the data
pipeline of a real experiment would, and fits a two-operator decoherence
model to the result.
"""

from .bases import BASIS_KINDS, OperatorBasis, build_basis, pauli_element, standard_element
from .bsfilter import (
    BSOptics,
    FilterParams,
    TemporalState,
    apply_pt_model,
    decoherence_from_delay,
    hom_dip,
    hom_visibility,
    kraus_pair,
    kraus_pair_from_optics,
    u3,
)
from .channel import (
    KrausSet,
    MapTable,
    ProcessMatrix,
    apply_kraus,
    apply_process_matrix,
    assemble_choi_from_map,
    choi_from_kraus,
    kraus_from_process_matrix,
    map_on_standard_basis,
    transform_process_matrix,
)
from .fitting import FitConfig, FitResult, fit, model_chi, residual
from .linalg import (
    bell_state,
    dagger,
    fidelity,
    frobenius_distance,
    is_psd,
    kron,
    partial_trace,
    permutation_operator,
    project_to_psd,
)
from .tomography import (
    CountTable,
    DecompositionCoefficients,
    InputStateSet,
    build_input_set,
    decompose_standard,
    reconstruct_process,
    reconstruct_state,
    simulate_counts,
)

__version__ = "0.1.0"
