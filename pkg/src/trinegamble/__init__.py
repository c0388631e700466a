"""Gambling on trine states: simulator, exact enumerator, and closed forms.

Two parties repeatedly play rounds of a quantum game built on three
symmetric single-qubit states. The package provides the qubit algebra,
the round engine with checking and accusation rules, sender/receiver
strategy families, closed-form gain formulas, a deterministic Monte
Carlo driver with an exact branch-enumeration oracle, and a CLI.
"""

from .analytics import (
    GainBreakdown,
    TradeoffPoint,
    gain_checking,
    gain_normal,
    gain_total,
    optimal_cheat_angle,
    p_correct,
    penalty_for_bias,
    tradeoff_point,
)
from .montecarlo import (
    DeterministicDivergence,
    ExactExpectation,
    SimConfig,
    SimResult,
    compare_stats,
    enumerate_exact,
    simulate,
)
from .protocol import (
    CheckResult,
    Ledger,
    MonitorDecision,
    ProtocolFault,
    ProtocolParams,
    RoundKind,
    RoundResult,
    RoundTranscript,
    Verdict,
    abort_monitor,
    run_round,
    settle,
    transcript_line,
    transcript_record,
)
from .qubit import (
    BlochVector,
    CheckOutcome,
    DensityOperator,
    Povm,
    PureState,
    TwoQubitState,
    bloch_from_state,
    born_probabilities,
    check_fail_probability,
    depolarize,
    local_measure_branches,
    local_measure_collapse,
    mixture_density,
    optimal_povm,
    partial_trace,
    project_check,
    remote_povm_branches,
    remote_povm_collapse,
    sample_outcome,
    state_from_bloch,
    trine_states,
)
from .strategies import (
    BobStrategy,
    EntangledAlice,
    FixedStateCheat,
    HonestAlice,
    MixtureCheat,
    aligned_pair,
    greedy_claims,
    parse_alice_spec,
    parse_bob_spec,
    posterior_unmeasured,
    random_entangled_policy,
    singlet_mirror,
)

__version__ = "0.1.0"

__all__ = [
    "BlochVector",
    "BobStrategy",
    "CheckOutcome",
    "CheckResult",
    "DensityOperator",
    "DeterministicDivergence",
    "EntangledAlice",
    "ExactExpectation",
    "FixedStateCheat",
    "GainBreakdown",
    "HonestAlice",
    "Ledger",
    "MixtureCheat",
    "MonitorDecision",
    "Povm",
    "ProtocolFault",
    "ProtocolParams",
    "PureState",
    "RoundKind",
    "RoundResult",
    "RoundTranscript",
    "SimConfig",
    "SimResult",
    "TradeoffPoint",
    "TwoQubitState",
    "Verdict",
    "abort_monitor",
    "aligned_pair",
    "bloch_from_state",
    "born_probabilities",
    "check_fail_probability",
    "compare_stats",
    "depolarize",
    "enumerate_exact",
    "gain_checking",
    "gain_normal",
    "gain_total",
    "greedy_claims",
    "local_measure_branches",
    "local_measure_collapse",
    "mixture_density",
    "optimal_cheat_angle",
    "optimal_povm",
    "p_correct",
    "parse_alice_spec",
    "parse_bob_spec",
    "partial_trace",
    "penalty_for_bias",
    "posterior_unmeasured",
    "project_check",
    "random_entangled_policy",
    "remote_povm_branches",
    "remote_povm_collapse",
    "run_round",
    "sample_outcome",
    "settle",
    "simulate",
    "singlet_mirror",
    "state_from_bloch",
    "tradeoff_point",
    "transcript_line",
    "transcript_record",
    "trine_states",
]
