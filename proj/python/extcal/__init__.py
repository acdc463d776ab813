from ._extcal import (
    NumericalAbort,
    PreconditionError,
    SchemaError,
    elliptic_K,
    integrate_particle,
    integrate_spherical,
    jacobi_cn,
    jacobi_elliptic,
    pullback_commutes_d,
    run_scenarios,
    run_suite,
    solve_string,
    spherical_closed_form,
    spherical_collapse_time,
    spherical_collapse_time_quadrature,
    stokes_residual,
)

__all__ = [
    "NumericalAbort",
    "PreconditionError",
    "SchemaError",
    "elliptic_K",
    "integrate_particle",
    "integrate_spherical",
    "jacobi_cn",
    "jacobi_elliptic",
    "pullback_commutes_d",
    "run_scenarios",
    "run_suite",
    "solve_string",
    "spherical_closed_form",
    "spherical_collapse_time",
    "spherical_collapse_time_quadrature",
    "stokes_residual",
]
