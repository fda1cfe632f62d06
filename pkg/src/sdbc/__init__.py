"""Rate regions of semideterministic broadcast channels with partial message
side information and rate-limited feedback.

The package computes inner and outer bounds on achievable rate tuples,
optimizes them over auxiliary input laws, re-derives the single-auxiliary
achievable region symbolically, certifies strict feedback gains with
re-checkable artifacts, and Monte-Carlo-simulates the binned random code
behind the achievability proofs at desk scale.
"""

from .channels import (
    AuxiliaryInput,
    BroadcastChannel,
    ChannelFormatError,
    aux_from_json,
    aux_from_px,
    aux_to_json,
    channel_from_json,
    channel_to_json,
    detect_adder_erasure,
    detect_bsc_pair,
    detect_function_erasure,
    enhance,
    induced_joint,
    is_semideterministic,
    make_adder_erasure,
    make_aux,
    make_bsc_pair,
    make_channel,
    make_function_erasure,
)
from .feedback import (
    CertificateSearchError,
    FeedbackConfig,
    GainCertificate,
    PreconditionError,
    SufficiencyWitness,
    adder_boundary_rate_Y,
    adder_sum_capacity,
    certify_adder_gain,
    check_prop3,
    check_prop4,
    erased_v_aux,
    example4_uselessness_check,
    lemma2_construct,
    perturbed_adder_aux,
    prop2_point,
    quarter_circle_weights,
    side_info_gap,
    side_info_gap_threshold,
    theorem3_uselessness_check,
)
from .info_kernel import (
    ConditionalKernel,
    FunctionalRepresentation,
    JointPmf,
    Pmf,
    binary_entropy,
    binary_entropy_inv,
    conditional_entropy,
    csiszar_residual,
    entropy,
    functional_representation,
    mutual_information,
)
from .montecarlo import (
    CodeParams,
    DecodeError,
    EncodeFailure,
    MartonCodebook,
    TrialStats,
    build_codebook,
    decode_y,
    decode_z,
    encode,
    is_typical,
    run_trials,
)
from .pmf_optimizer import (
    OptResult,
    SearchConfig,
    certificate_search,
    find_certificate,
    maximize_custom,
    maximize_rate_Y,
    maximize_weighted,
    p2_star,
    symmetric_adder_search,
    warm_starts,
)
from .polyhedra import (
    Row,
    SymbolicIneqSystem,
    SystemValidationError,
    coding_scheme_system,
    eliminate,
    failed_implications,
    implies,
    polytope_vertices,
    sample_valuations,
    theorem1_derivation_check,
    theorem1_target_system,
)
from .regions import (
    MEMBERSHIP_TOL,
    Constraint,
    InfeasibleRateError,
    Membership,
    RateTuple,
    RegionAtPmf,
    RegionEvaluationError,
    RegionKind,
    appendixI_region,
    check_x_functional,
    contains,
    enhanced_feedback_outer,
    evaluate,
    fmsi_z_feedback_outer,
    max_rate_Y_given_Z,
    split_rates,
    support_value,
)

__version__ = "0.1.0"

__all__ = [
    # channels
    "AuxiliaryInput",
    "BroadcastChannel",
    "ChannelFormatError",
    "aux_from_json",
    "aux_from_px",
    "aux_to_json",
    "channel_from_json",
    "channel_to_json",
    "detect_adder_erasure",
    "detect_bsc_pair",
    "detect_function_erasure",
    "enhance",
    "induced_joint",
    "is_semideterministic",
    "make_adder_erasure",
    "make_aux",
    "make_bsc_pair",
    "make_channel",
    "make_function_erasure",
    # feedback
    "CertificateSearchError",
    "FeedbackConfig",
    "GainCertificate",
    "PreconditionError",
    "SufficiencyWitness",
    "adder_boundary_rate_Y",
    "adder_sum_capacity",
    "certify_adder_gain",
    "check_prop3",
    "check_prop4",
    "erased_v_aux",
    "example4_uselessness_check",
    "lemma2_construct",
    "perturbed_adder_aux",
    "prop2_point",
    "quarter_circle_weights",
    "side_info_gap",
    "side_info_gap_threshold",
    "theorem3_uselessness_check",
    # info_kernel
    "ConditionalKernel",
    "FunctionalRepresentation",
    "JointPmf",
    "Pmf",
    "binary_entropy",
    "binary_entropy_inv",
    "conditional_entropy",
    "csiszar_residual",
    "entropy",
    "functional_representation",
    "mutual_information",
    # montecarlo
    "CodeParams",
    "DecodeError",
    "EncodeFailure",
    "MartonCodebook",
    "TrialStats",
    "build_codebook",
    "decode_y",
    "decode_z",
    "encode",
    "is_typical",
    "run_trials",
    # pmf_optimizer
    "OptResult",
    "SearchConfig",
    "certificate_search",
    "find_certificate",
    "maximize_custom",
    "maximize_rate_Y",
    "maximize_weighted",
    "p2_star",
    "symmetric_adder_search",
    "warm_starts",
    # polyhedra
    "Row",
    "SymbolicIneqSystem",
    "SystemValidationError",
    "coding_scheme_system",
    "eliminate",
    "failed_implications",
    "implies",
    "polytope_vertices",
    "sample_valuations",
    "theorem1_derivation_check",
    "theorem1_target_system",
    # regions
    "MEMBERSHIP_TOL",
    "Constraint",
    "InfeasibleRateError",
    "Membership",
    "RateTuple",
    "RegionAtPmf",
    "RegionEvaluationError",
    "RegionKind",
    "appendixI_region",
    "check_x_functional",
    "contains",
    "enhanced_feedback_outer",
    "evaluate",
    "fmsi_z_feedback_outer",
    "max_rate_Y_given_Z",
    "split_rates",
    "support_value",
    # version
    "__version__",
]
