"""Posterior variance bounds and learning curves for GP regression."""

from gpbounds._core import (
    ConfigError,
    ConvergenceVerdict,
    Density,
    Kernel,
    NumericError,
    PreconditionError,
    RadiusSchedule,
    ball_count,
    ball_probability,
    bound_report,
    check_corollary,
    check_theorem,
    config_text,
    e1_bound,
    e2_bound,
    e_rho_bound,
    empirical_ball_growth,
    greedy_select_n,
    isotropic_bound,
    learning_curve_table,
    lipschitz_bound,
    lipschitz_constant,
    monte_carlo_curve,
    one_point_bound,
    posterior_mean,
    posterior_variance,
    prefix_variances,
    presets,
    run_experiment,
    search_theorem_witness,
    section_bound,
    two_point_bound,
)

__all__ = [name for name in dir() if not name.startswith("_")]
