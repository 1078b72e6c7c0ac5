"""Python bindings for the tmlab Trudinger-Moser toolkit.

The heavy lifting happens in the native ``_core`` module; this package
re-exports it and adds a few conveniences.
"""

from ._core import (
    ConfigError,
    ConvergenceError,
    DomainError,
    Gauge,
    GaugeConstants,
    RadialProfile,
    atmc_bracket,
    constants,
    constants_from_kappa,
    dirichlet_norm,
    lq_norm,
    moser_plateau,
    moser_profile,
    mu_asymptotic,
    mu_estimate,
    phi,
    phi_start_index,
    random_profile,
    ratio,
    run,
    sharpness_sweep,
    solve_cn,
    tm_integral,
    unit_ball_volume,
    wulff_volume,
)

__version__ = "0.1.0"


def params(**kwargs):
    """Parameter dict with the library defaults filled in."""
    base = {"N": 2, "q": 2.0, "p": 2.0, "beta": 0.0, "lambda": 1.0, "d": 1.0, "k": 2.0, "a": 2.0, "b": 2.0}
    unknown = set(kwargs) - set(base)
    if unknown:
        raise ValueError(f"unknown parameters: {sorted(unknown)}")
    base.update(kwargs)
    return base


__all__ = [name for name in dir() if not name.startswith("_")]
