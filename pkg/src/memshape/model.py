"""Domain model: state, curvature profiles, residuals, Jacobians, boundary data.

The membrane generating curve is described by six dimensionless unknowns

    x1 = x   radial coordinate
    x2 = y   height
    x3 = psi tangent angle (radians)
    x4 = h   mean curvature
    x5 = l   auxiliary variable x*(h - c)'
    x6 = lt  tension-like Lagrange multiplier

which satisfy a first-order implicit system F(x, xdot, u) = 0 on [0, U].
Two parametrizations of the same surface are supported: by arc length
along the curve, or by the area swept by the surface of revolution.  The
spontaneous curvature c(u) is a tanh transition profile (Type I keeps a
plateau, Type II ramps through zero at u0) or a constant (testing aid).

Everything here is a pure function of immutable value objects; the heavy
array math lives in the kernel backends.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    InvalidProfileError,
    SingularStateError,
    UnsupportedProfileError,
)

# parameter order for sensitivities: p1 = C0, p2 = gamma, p3 = u0
PARAMETER_NAMES = ("C0", "gamma", "u0")


class FormulationKind(enum.Enum):
    """Choice of independent variable along the generating curve."""

    ARC_LENGTH = "arclength"
    AREA = "area"

    @property
    def code(self) -> int:
        return kernels.ARC_LENGTH if self is FormulationKind.ARC_LENGTH else kernels.AREA


class CurvatureKind(enum.Enum):
    TYPE_I = "type1"
    TYPE_II = "type2"
    CONSTANT = "constant"

    @property
    def code(self) -> int:
        return {
            CurvatureKind.TYPE_I: kernels.TYPE_I,
            CurvatureKind.TYPE_II: kernels.TYPE_II,
            CurvatureKind.CONSTANT: kernels.CONSTANT,
        }[self]


@dataclass(frozen=True)
class CurvatureProfile:
    """Spontaneous curvature family c(u).

    Type I:   c(u) = 0.5*C0*R0*[1 - tanh(gamma*(u - u0))]
    Type II:  c(u) = -0.5*C0*R0*(u - u0)/u0*[1 - tanh(gamma*(u - u0))]
    Constant: c(u) = const_value (no free parameters, no sensitivities)

    C0 carries inverse length (nm^-1), R0 length (nm); they enter the
    dimensionless equations only through the product C0*R0, but partial
    derivatives are taken with respect to C0 at fixed R0.
    """

    kind: CurvatureKind
    C0: float = 0.0
    gamma: float = 0.0
    u0: float = 1.0
    R0: float = 1.0
    const_value: float = 0.0

    def __post_init__(self):
        if self.R0 <= 0:
            raise InvalidProfileError(f"R0 must be positive, got {self.R0}")
        if self.kind is CurvatureKind.TYPE_II and self.u0 <= 0:
            raise InvalidProfileError(
                f"Type II profile requires u0 > 0 (divides by u0), got {self.u0}"
            )

    def with_params(self, C0=None, gamma=None, u0=None) -> "CurvatureProfile":
        """Copy with selected parameters replaced."""
        return CurvatureProfile(
            kind=self.kind,
            C0=self.C0 if C0 is None else C0,
            gamma=self.gamma if gamma is None else gamma,
            u0=self.u0 if u0 is None else u0,
            R0=self.R0,
            const_value=self.const_value,
        )

    @property
    def has_parameters(self) -> bool:
        return self.kind is not CurvatureKind.CONSTANT


@dataclass(frozen=True)
class StateVector:
    """The six unknowns at one domain point."""

    x1: float
    x2: float
    x3: float
    x4: float
    x5: float
    x6: float

    @classmethod
    def from_array(cls, a) -> "StateVector":
        a = np.asarray(a, dtype=float).reshape(6)
        return cls(*a.tolist())

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4, self.x5, self.x6])

    def __array__(self, dtype=None):
        a = self.as_array()
        return a if dtype is None else a.astype(dtype)


class BoundaryKind(enum.Enum):
    TYPE_I = "type1"
    TYPE_II = "type2"
    CUSTOM = "custom"


@dataclass(frozen=True)
class BoundarySpec:
    """Separated Dirichlet boundary data pinning six scalar conditions.

    Type I pins x1(0+) = epsilon, x3(0+) = 0, x5(0+) = 0 and
    x2(end) = 0, x3(end) = 0, x6(end) = lambda_tilde_end.  Type II pins
    x1(0+) = sin(theta), x3(0+) = theta and x2, x3, x5 = 0 plus
    x6 = lambda_tilde_end at the far end.  Custom lists explicit
    (endpoint, component, value) conditions, components numbered 1..6.
    """

    kind: BoundaryKind
    theta: float = 0.0
    lambda_tilde_end: float = 0.0
    epsilon: float = 1e-4
    custom: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind is BoundaryKind.CUSTOM:
            if len(self.custom) != 6:
                raise ValueError(
                    f"custom boundary spec must pin exactly 6 conditions, got {len(self.custom)}"
                )
            for end, comp, _ in self.custom:
                if end not in ("start", "end"):
                    raise ValueError(f"custom endpoint must be 'start' or 'end', got {end!r}")
                if comp not in (1, 2, 3, 4, 5, 6):
                    raise ValueError(f"custom component must be in 1..6, got {comp}")
        elif self.kind is BoundaryKind.TYPE_I and self.epsilon <= 0:
            raise ValueError("Type I boundary spec needs epsilon > 0")

    def conditions(self) -> list:
        """The six pinned conditions as ('start'|'end', component 1..6, value)."""
        if self.kind is BoundaryKind.TYPE_I:
            return [
                ("start", 1, self.epsilon),
                ("start", 3, 0.0),
                ("start", 5, 0.0),
                ("end", 2, 0.0),
                ("end", 3, 0.0),
                ("end", 6, self.lambda_tilde_end),
            ]
        if self.kind is BoundaryKind.TYPE_II:
            return [
                ("start", 1, math.sin(self.theta)),
                ("start", 3, self.theta),
                ("end", 2, 0.0),
                ("end", 3, 0.0),
                ("end", 5, 0.0),
                ("end", 6, self.lambda_tilde_end),
            ]
        return list(self.custom)


@dataclass(frozen=True)
class BvpProblem:
    """Formulation + curvature profile + boundary data + domain + kappa."""

    formulation: FormulationKind
    profile: CurvatureProfile
    bc: BoundarySpec
    domain_end: float
    kappa_tilde: float = 1.0

    def __post_init__(self):
        if self.domain_end <= 0:
            raise ValueError(f"domain_end must be positive, got {self.domain_end}")
        if self.kappa_tilde <= 0:
            raise ValueError(f"kappa_tilde must be positive, got {self.kappa_tilde}")

    def with_profile(self, profile: CurvatureProfile) -> "BvpProblem":
        return BvpProblem(self.formulation, profile, self.bc, self.domain_end, self.kappa_tilde)


# ---------------------------------------------------------------------------
# curvature operations


def curvature_value(profile: CurvatureProfile, u):
    """c(u) for scalar or array u."""
    c, _ = kernels.curvature_batch(
        profile.kind.code, profile.C0, profile.gamma, profile.u0, profile.R0,
        profile.const_value, np.atleast_1d(np.asarray(u, dtype=float)),
    )
    return float(c[0]) if np.isscalar(u) else c


def curvature_rate(profile: CurvatureProfile, u):
    """dc/du at u, from the closed-form derivative."""
    _, cd = kernels.curvature_batch(
        profile.kind.code, profile.C0, profile.gamma, profile.u0, profile.R0,
        profile.const_value, np.atleast_1d(np.asarray(u, dtype=float)),
    )
    return float(cd[0]) if np.isscalar(u) else cd


def curvature_param_partials(profile: CurvatureProfile, u):
    """(dc/dp_j, dcdot/dp_j) for p = (C0, gamma, u0); two arrays of shape (3,) or (3, m)."""
    if not profile.has_parameters:
        raise UnsupportedProfileError("constant profile has no curvature parameters")
    dc, dcd = kernels.curvature_partials_batch(
        profile.kind.code, profile.C0, profile.gamma, profile.u0, profile.R0,
        np.atleast_1d(np.asarray(u, dtype=float)),
    )
    if np.isscalar(u):
        return dc[:, 0], dcd[:, 0]
    return dc, dcd


def is_mollifying(profile: CurvatureProfile) -> bool:
    """True when the tanh transition has no abrupt jump for u > 0 (gamma*u0 < 3)."""
    if not profile.has_parameters:
        raise UnsupportedProfileError("mollifying property is undefined for a constant profile")
    return profile.gamma * profile.u0 < 3.0


# ---------------------------------------------------------------------------
# residual and Jacobians


def _state_columns(state, rate):
    x = np.asarray(state, dtype=float).reshape(6, 1)
    xd = np.asarray(rate, dtype=float).reshape(6, 1)
    return x, xd


def residual(problem: BvpProblem, state, rate, u) -> np.ndarray:
    """Six-component residual F(x, xdot, u) for the problem's formulation."""
    x, xd = _state_columns(state, rate)
    if x[0, 0] <= 0.0:
        raise SingularStateError(f"x1 must be positive, got {x[0, 0]}")
    p = problem.profile
    c, cd = kernels.curvature_batch(
        p.kind.code, p.C0, p.gamma, p.u0, p.R0, p.const_value, np.array([float(u)])
    )
    F = kernels.residual_batch(problem.formulation.code, problem.kappa_tilde, x, xd, c, cd)
    return F[:, 0]


def jacobian_state(problem: BvpProblem, state, rate, u) -> np.ndarray:
    """Analytic 6x6 Jacobian D_x F."""
    x, _ = _state_columns(state, rate)
    if x[0, 0] <= 0.0:
        raise SingularStateError(f"x1 must be positive, got {x[0, 0]}")
    p = problem.profile
    c, cd = kernels.curvature_batch(
        p.kind.code, p.C0, p.gamma, p.u0, p.R0, p.const_value, np.array([float(u)])
    )
    J = kernels.state_jacobian_batch(problem.formulation.code, problem.kappa_tilde, x, c, cd)
    return J[0]


def jacobian_rate(problem: BvpProblem, state, rate, u) -> np.ndarray:
    """Jacobian D_xdot F: the 6x6 identity for both formulations."""
    return np.eye(6)


def jacobian_params(problem: BvpProblem, state, rate, u) -> np.ndarray:
    """6x3 matrix of parameter columns dF/dp_j, p = (C0, gamma, u0)."""
    if not problem.profile.has_parameters:
        raise UnsupportedProfileError("constant profile has no parameter Jacobian")
    x, _ = _state_columns(state, rate)
    if x[0, 0] <= 0.0:
        raise SingularStateError(f"x1 must be positive, got {x[0, 0]}")
    p = problem.profile
    uu = np.array([float(u)])
    c, cd = kernels.curvature_batch(p.kind.code, p.C0, p.gamma, p.u0, p.R0, p.const_value, uu)
    dc, dcd = kernels.curvature_partials_batch(p.kind.code, p.C0, p.gamma, p.u0, p.R0, uu)
    P = kernels.param_jacobian_batch(
        problem.formulation.code, problem.kappa_tilde, x, c, cd, dc, dcd
    )
    return P[0]


def boundary_residual(spec: BoundarySpec, state_start, state_end) -> np.ndarray:
    """Six boundary defects, zero iff the boundary conditions are met."""
    xa = np.asarray(state_start, dtype=float).reshape(6)
    xb = np.asarray(state_end, dtype=float).reshape(6)
    out = np.empty(6)
    for i, (end, comp, value) in enumerate(spec.conditions()):
        src = xa if end == "start" else xb
        out[i] = src[comp - 1] - value
    return out
