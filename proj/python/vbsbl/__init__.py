"""Fast variational block-sparse Bayesian learning."""

from ._core import (
    FixedPoint,
    Posterior,
    __version__,
    f_eval,
    fast_solve,
    fixed_point_limit,
    h_eval,
    nmse,
    ospa,
    slow_solve,
)

__all__ = [
    "FixedPoint",
    "Posterior",
    "__version__",
    "f_eval",
    "fast_solve",
    "fixed_point_limit",
    "h_eval",
    "nmse",
    "ospa",
    "slow_solve",
]
