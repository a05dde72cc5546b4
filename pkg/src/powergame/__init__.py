"""Equilibria of power-investment games on dynamic player populations.

Strategic players join and leave a shared computation (mining a block,
crunching volunteer work units) while an always-present block of fixed
power keeps the problem solvable.  This package computes Markov-perfect
equilibrium policies and expected utilities for the winner-takes-reward and
streamed-reward variants, checks them against static baselines and Monte
Carlo simulation, and runs the parameter sweeps behind the
utility-vs-population plots.
"""

from .dynamics import (
    TransitionMatrix,
    build_W,
    build_Z,
    sojourn_denominator,
    sojourn_denominators,
    solve_rate,
    solve_rates,
)
from .equilibrium import (
    ActiveSet,
    EquilibriumResult,
    certify,
    compute_mpe,
    construct_active_set,
    equilibrium_to_dict,
    mpe_scenario1,
    mpe_scenario2,
    psi_value,
    sne,
    sne_homogeneous_utility,
    verify_best_response,
)
from .experiment import (
    ExperimentResult,
    ExperimentSpec,
    load_experiment,
    parse_experiment,
    run_experiment,
)
from .mc import (
    EpisodeOutcome,
    NonTerminationError,
    UtilityEstimate,
    estimate_utilities,
    simulate_episode,
)
from .model import (
    ConfigFormatError,
    GameConfig,
    InvalidConfigError,
    PlayerParams,
    Policy,
    Scenario1,
    Scenario2,
    Scenario2General,
    config_to_dict,
    load_config,
    parse_config,
    require_valid,
    validate_config,
)
from .solver import (
    DenseGuardError,
    NonConvergenceError,
    UtilityVector,
    solve_utilities,
    solve_utilities_auto,
    solve_utilities_direct,
)
from .statespace import (
    EXACT_PLAYER_CAP,
    ExactSpace,
    MalformedStateError,
    ReducedSpace,
    build_space,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveSet",
    "ConfigFormatError",
    "DenseGuardError",
    "EXACT_PLAYER_CAP",
    "EpisodeOutcome",
    "EquilibriumResult",
    "ExactSpace",
    "ExperimentResult",
    "ExperimentSpec",
    "GameConfig",
    "InvalidConfigError",
    "MalformedStateError",
    "NonConvergenceError",
    "NonTerminationError",
    "PlayerParams",
    "Policy",
    "ReducedSpace",
    "Scenario1",
    "Scenario2",
    "Scenario2General",
    "TransitionMatrix",
    "UtilityEstimate",
    "UtilityVector",
    "build_W",
    "build_Z",
    "build_space",
    "certify",
    "compute_mpe",
    "config_to_dict",
    "construct_active_set",
    "equilibrium_to_dict",
    "estimate_utilities",
    "load_config",
    "load_experiment",
    "mpe_scenario1",
    "mpe_scenario2",
    "parse_config",
    "parse_experiment",
    "psi_value",
    "require_valid",
    "run_experiment",
    "simulate_episode",
    "sne",
    "sne_homogeneous_utility",
    "sojourn_denominator",
    "sojourn_denominators",
    "solve_rate",
    "solve_rates",
    "solve_utilities",
    "solve_utilities_auto",
    "solve_utilities_direct",
    "validate_config",
    "verify_best_response",
]
