"""C-SALSA solvers for min phi(x) subject to ||Bx - y||_2 <= epsilon."""

from ._csalsa import (
    CapabilityError,
    ConfigError,
    DivergenceError,
    DomainError,
    Frame,
    LinearOperator,
    SolveResult,
    add_noise,
    blur_kernel,
    cartoon_image,
    csalsa1,
    csalsa2,
    epsilon_rule,
    experiment_names,
    project_ball,
    radial_mask,
    random_squares,
    run_experiment,
    shepp_logan,
    soft_threshold,
    tv_norm,
    tv_prox,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
