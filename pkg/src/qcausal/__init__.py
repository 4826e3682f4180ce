"""Bipartite quantum operations: causality tests, localizability obstructions,
and executable protocol reconstructions, at desk scale (local dimensions <= 8).
"""

from .causality import (
    A_TO_B,
    B_TO_A,
    CausalityVerdict,
    SignalWitness,
    causal_test,
    semicausal_test,
    signaling_search,
    unitary_product_test,
)
from .channels import (
    ChoiState,
    KrausChannel,
    apply,
    choi,
    choi_distance,
    choi_of_map,
    compose,
    convex_mixture,
    identity_channel,
    measurement_channel,
    validate,
)
from .games import (
    CIRELSON_VALUE,
    ClassicalStrategy,
    QuantumStrategy,
    and_box_channel,
    best_classical_value,
    channel_game_value,
    chsh_success_classical,
    chsh_success_quantum,
    entangled_local_protocol,
    ip_demo,
    optimal_quantum_strategy,
)
from .linalg import (
    ATOL,
    BiDims,
    hermitian_spectrum,
    max_entangled,
    operator_schmidt,
    partial_trace,
    tensor_product,
    trace_distance,
)
from .localizability import (
    MEBasisUnitaries,
    ObstructionCertificate,
    eigenstate_closure_test,
    extract_unitaries,
    generalized_pauli,
    is_eigenstate,
    mismatch_basis,
    projective_group_test,
    twisted_partition_basis,
)
from .measurements import (
    BasisVerdict,
    BasisWitness,
    CausalGrid,
    OrthogonalBasis,
    PartitionStructure,
    basis_signaling_witness,
    bell_basis,
    causal_structure,
    completion_basis,
    conditional_basis,
    incomplete_bell_channel,
    product_basis,
    reduced_states,
    semicausal_basis_test,
    semicausal_structure,
)
from .protocols import (
    ProtocolTrace,
    bell_circuit_channel,
    entanglement_swap_demo,
    run_semilocal_measurement,
    run_twisted_partition_protocol,
    semilocal_measurement_branches,
    twisted_partition_protocol_kraus,
)
from .report import ClassificationReport, classify_basis, classify_channel
from .twirl import (
    PauliString,
    ProjectiveUnitaryGroup,
    bell_twirl,
    close_group,
    stabilizer_channel,
    tetrahedral_group,
    twirl_channel,
    twirl_structure_check,
    werner_twirl,
)

__version__ = "0.1.0"
