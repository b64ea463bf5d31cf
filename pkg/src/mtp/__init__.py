"""Unity-fidelity multiple teleportation over partially entangled states."""

from mtp.errors import DomainError, ResourceError
from mtp.protocols import (
    Branch,
    MonteCarloResult,
    Protocol,
    Schedule,
    SuccessProfile,
    count_A,
    count_B,
    cumulative_success,
    enumerate_branches,
    enumerated_success,
    first_balanced_step,
    first_success_step,
    iter_branches,
    monte_carlo,
    p_event_p3,
    p_step_analytic,
    p_step_concurrence_form,
    schedule_for,
)
from mtp.qstate import (
    BELL_LABELS,
    BellLabel,
    QubitState,
    TwoQubitVector,
    apply_correction,
    concurrence,
    fidelity,
    generalized_bell_state,
    pes_coefficients,
)
from mtp.swapping import (
    ChainConfig,
    compare_configurations,
    crossing_point,
    p_swap,
    protocol1_chain_success,
    s_opt,
    three_stage_swap,
)
from mtp.teleport import StepOutcome, TransformFactors, is_unity_fidelity, teleport_step, transform_factors

__version__ = "0.1.0"
