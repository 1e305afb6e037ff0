"""Quantum secret sharing at small scale, exactly.

Encode secrets into threshold schemes over prime fields, recover them
with explicit decoding circuits, certify secrecy by decoupling, and
compute max-min coherent-information capacity bounds for the compound
channel induced by an access structure.
"""

from .access_structure import (
    AccessStructure,
    CloningViolation,
    ValidityReport,
    complement,
    from_threshold,
    validate,
)
from .capacity import (
    CapacityReport,
    binary_entropy,
    closed_form_regime,
    coherent_info,
    compound_objective,
    dephasing_capacity_closed_form,
    maximize_min_coherent_info,
    product_input_rate,
)
from .channels import (
    CompoundFamily,
    KrausChannel,
    MarginalChannel,
    broadcast_product,
    compound_from_access,
    dephasing,
    depolarizing,
    direct_family,
    identity_channel,
    tensor_power,
)
from .finite_field import (
    FqElement,
    FqMatrix,
    field_inv,
    mat_inverse,
    mat_mul,
    solve,
    vandermonde,
)
from .qudit_engine import (
    DensityMatrix,
    PureState,
    RegisterShape,
    apply_channel,
    apply_unitary,
    basis_state,
    classical_reversible_unitary,
    coherent_information,
    fidelity,
    haar_random_state,
    maximally_entangled,
    partial_trace,
    permute,
    purify,
    reduced_density,
    teleport,
    tensor,
    trace_distance,
    von_neumann_entropy,
)
from .schemes import (
    DecoderCircuit,
    EncodedSecret,
    ThresholdSchemeSpec,
    build_decoder,
    cgl99_pair_decode,
    encode,
    encoding_isometry,
    verify_recovery,
    verify_secrecy,
)

__version__ = "0.1.0"
