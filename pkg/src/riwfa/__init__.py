"""riwfa: robust iterative water-filling for shared-spectrum power games.

M transmitter-receiver pairs allocate power over K shared sub-channels.  Each
user water-fills against the interference it measures; the measurement may
carry bounded relative error, and users can play the nominal, worst-case, or
probabilistically-hedged response to it.  The package provides the solvers,
best-response dynamics (including asynchronous schedules), equilibrium
uniqueness/convergence certificates, brute-force oracles, and a small CLI.
"""

from .analysis import (
    CertificateResult,
    SweepResult,
    check_async_convergence,
    check_rne_uniqueness,
    delta0_sweep,
    epsilon_sweep,
    frobenius_norm,
    interference_ratio_matrix,
    interference_ratio_matrix_max,
    interference_upper_bounds,
    operator_norm_2,
    orthogonality_index,
    per_user_utilities,
    social_utility,
    spectral_radius,
    write_sweep_csv,
)
from .dynamics import (
    EquilibriumReport,
    RunConfig,
    Schedule,
    fixed_point_residual,
    generate_schedule,
    run,
    write_summary_csv,
    write_trajectory_csv,
)
from .model import (
    BUDGET_TOL,
    ChannelRealization,
    DegenerateUncertaintyWarning,
    PowerConstraints,
    Scenario,
    ScenarioTemplate,
    UncertaintySpec,
    effective_interference,
    epsilon_from_uniform,
    load_bundled_scenario,
    load_scenario,
    normalized_interference,
    profile_feasible,
    random_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    uniform_profile,
    user_utility,
    zero_profile,
)
from .oracle import (
    GridSpec,
    brute_force_best_response,
    cluster_profiles,
    exhaustive_equilibrium_scan,
)
from .waterfill import WaterfillSolution, best_response, waterfill

__version__ = "0.1.0"

__all__ = [
    "BUDGET_TOL",
    "CertificateResult",
    "ChannelRealization",
    "DegenerateUncertaintyWarning",
    "EquilibriumReport",
    "GridSpec",
    "PowerConstraints",
    "RunConfig",
    "Scenario",
    "ScenarioTemplate",
    "Schedule",
    "SweepResult",
    "UncertaintySpec",
    "WaterfillSolution",
    "best_response",
    "brute_force_best_response",
    "check_async_convergence",
    "check_rne_uniqueness",
    "cluster_profiles",
    "delta0_sweep",
    "effective_interference",
    "epsilon_from_uniform",
    "epsilon_sweep",
    "exhaustive_equilibrium_scan",
    "fixed_point_residual",
    "frobenius_norm",
    "generate_schedule",
    "interference_ratio_matrix",
    "interference_ratio_matrix_max",
    "interference_upper_bounds",
    "load_bundled_scenario",
    "load_scenario",
    "normalized_interference",
    "operator_norm_2",
    "orthogonality_index",
    "per_user_utilities",
    "profile_feasible",
    "random_scenario",
    "run",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "social_utility",
    "spectral_radius",
    "uniform_profile",
    "user_utility",
    "waterfill",
    "write_summary_csv",
    "write_sweep_csv",
    "write_trajectory_csv",
    "zero_profile",
]
