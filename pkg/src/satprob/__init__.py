"""satprob: estimate the probability that a random scenario admits a
completing decision string.

The package simulates, at statevector desk scale, a two-stage pipeline:
scenario-oblivious fixed-point amplitude amplification that solves every
scenario's decision search at once, followed by amplitude estimation that
reads off the aggregate success mass at Heisenberg-limit precision. A
Monte-Carlo / brute-force baseline and a query-complexity comparison sit
alongside it.
"""

from .classical import ClassicalRunReport, chebyshev_bound, estimate_mu, expected_query_model, repeated_trials
from .distributions import ScenarioDistribution, explicit, iid_bernoulli, point_mass, uniform
from .engine import (
    OperatorTrace,
    RegisterLayout,
    StateVector,
    apply_mixer_reflection,
    apply_oracle_mark,
    apply_qae_operator,
    apply_state_prep,
    apply_target_reflection,
    dense_operator,
    grover_iterate,
    iterate_search,
    phase_estimation,
    prepare_initial,
    qft,
    qft_inverse,
    run_search,
    sample_outcomes,
)
from .errors import CapacityError, ConsistencyError, InputError, StateShapeError
from .estimator import (
    MIN_SUCCESS_MASS,
    QuantumRunReport,
    SearchDynamics,
    amplitude_from_outcome,
    analytic_marked_mass,
    estimate,
    estimation_error_bound,
    good_state_probability,
    oracle_call_model,
    qae_error_bound,
    sweep_search,
)
from .oracles import (
    ConstantOracle,
    Graph,
    Oracle,
    PlantedOracle,
    ReliabilityOracle,
    ScenarioAnalysis,
    ThresholdOracle,
    analyze,
    choose_min_fraction,
    load_graph,
    make_constant_oracle,
    make_planted_oracle,
    make_single_completion_oracle,
    make_threshold_oracle,
    parse_graph,
    reliability_exact,
    reliability_oracle,
    triangle_graph,
)
from .schedule import (
    AngleSchedule,
    QaeParameters,
    angle_schedule,
    chebyshev,
    min_depth,
    qae_parameters,
    success_probability,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
