"""Generalized entropic measures of quantum correlations for bipartite states."""

from .entangle import (
    ConvexityError,
    SchmidtDecomposition,
    concurrence_2q,
    convexity_interval,
    entanglement_entropy,
    eof_2q,
    eof_from_concurrence,
    is_eof_convex,
    locc_convertible,
    negativity,
    partial_transpose,
    schmidt,
    separable_ball,
)
from .entropy import (
    DEFAULT_FAMILY,
    EntropyFunctional,
    entropy,
    entropy_ordering_witness,
    eval_f,
    linear,
    majorizes,
    parse_entropy,
    renyi,
    tsallis,
    von_neumann,
)
from .measure import (
    ConditionalProductBasis,
    InfoLossReport,
    KrausSet,
    LocalBasis,
    MeasurementError,
    ProductBasis,
    conditional_measure,
    info_loss,
    joint_measure,
    kraus_apply,
    local_measure_A,
    local_measure_B,
    perturbative_loss,
    project,
    relative_entropy,
)
from .minimize import (
    DiscordReport,
    OptimizerConfig,
    closest_classical_state,
    discord_for_basis,
    min_info_loss_joint,
    min_info_loss_local,
    quantum_discord_B,
)
from .qstate import (
    DensityMatrix,
    Ket,
    StateError,
    from_json,
    from_ket,
    partial_trace,
    spectrum,
    tensor,
    to_json,
)

__version__ = "0.1.0"
