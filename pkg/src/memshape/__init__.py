"""Axisymmetric bending-membrane shapes and parametric sensitivities.

Solves the six-component shape equations of an axisymmetric elastic
membrane with tanh-type spontaneous curvature as a nonlinear two-point
boundary value problem (piecewise-cubic collocation, damped Newton), and
computes parametric sensitivities of the solution and of the bending
energy by forward (appended-system) and adjoint methods.
"""

from .model import (
    BoundaryKind,
    BoundarySpec,
    BvpProblem,
    CurvatureKind,
    CurvatureProfile,
    FormulationKind,
    StateVector,
    boundary_residual,
    curvature_param_partials,
    curvature_rate,
    curvature_value,
    is_mollifying,
    jacobian_params,
    jacobian_rate,
    jacobian_state,
    residual,
)

__version__ = "0.1.0"
