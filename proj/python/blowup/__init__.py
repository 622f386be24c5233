"""Blow-up exponents for anisotropic degenerate elliptic problems.

Thin wrapper over the C++ core; every function returns plain dicts/lists
(NumPy arrays for fields). Failures raise BlowupError with a ``kind`` tag.
"""

from ._blowup import (
    BlowupError,
    alpha_of_lambda,
    circle_pair,
    compute_exponent,
    dirichlet_mu1,
    normalize,
    reduce,
    run_suite,
    sample_circle_mode,
    series_coefficients,
    solve_disk,
    sphere_lambda1,
)

__all__ = [
    "BlowupError",
    "alpha_of_lambda",
    "circle_pair",
    "compute_exponent",
    "dirichlet_mu1",
    "normalize",
    "reduce",
    "run_suite",
    "sample_circle_mode",
    "series_coefficients",
    "solve_disk",
    "sphere_lambda1",
]
