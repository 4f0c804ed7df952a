"""boxlab: nonsignaling boxes, discord measures and canonical decompositions."""

from .boxcore import (
    BadWeightsError,
    BipartiteBox,
    BoxError,
    Lro,
    NegativeEntryError,
    NotNormalizedError,
    SignalingError,
    VertexId,
    apply_lro,
    box_from_json,
    box_to_json,
    cc_box,
    det_box,
    joint_expectation,
    joint_expectations,
    lro_group,
    make_box,
    marginal_expectation,
    mermin_box,
    mermin_nmm_box,
    mix,
    noise_box,
    pr_box,
    tsirelson_box,
    vertex,
)
from .discord2 import (
    CorrelationSplit,
    bell_discord,
    bell_functions,
    chsh_value,
    chsh_values,
    classical_correlation,
    correlation_split,
    is_epr_steerable,
    mermin_discord,
    mermin_functions,
    mermin_value,
    monogamy_checks,
    steering_flags,
    steering_value,
    total_correlation,
)
from .polytope import (
    DecompositionResult,
    LpNumericalFailure,
    MembershipResult,
    ResidualInvalidError,
    canonical_2decomposition,
    is_local,
    lp_vertex_decomposition,
    ns_membership,
    random_ns_box,
    three_decomposition,
)
from .qstate import (
    DensityMatrix,
    InvalidStateError,
    MeasurementSettings,
    UnknownNameError,
    born_box2,
    born_box3,
    density_matrix,
    entanglement_params,
    hardy_probability,
    settings,
    settings_catalog,
    state_family,
)
from .tribox import (
    NotInPolytopeError,
    TripartiteBox,
    TriVertexId,
    class99_value,
    classical_correlation3,
    ghz_paradox_check,
    make_box3,
    marginal2,
    mermin3_discord,
    mermin3_functions,
    mermin3_value,
    monogamy_checks3,
    sv_box,
    sv_functions,
    sv_value,
    svetlichny_discord,
    three_decomposition3,
    total_correlation3,
    tri_vertex,
)

__version__ = "0.1.0"
