"""Forward and adjoint parametric sensitivities of the membrane solution.

Forward route: for one parameter p_j of the curvature profile, append the
linearized six equations

    sdot_j = -(D_x F) s_j - dF/dp_j

to the original system and re-solve the coupled 12-component BVP on the
base mesh, warm-started with the base solution and zeros.  The boundary
conditions of s_j are the homogeneous counterparts of the base ones, so
the discrete s_j is exactly the parameter derivative of the discrete
solution.

Adjoint route: solve the linear BVP

    vdot = (D_x F)^T v - grad_x w

along the frozen base trajectory with the vanishing side conditions that
kill the boundary term, then integrate dW/dp_j = int (dw/dp_j - v^T dF/dp_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .collocation import (
    BvpSystem,
    CollocationSolution,
    Mesh,
    SolverSettings,
    solve_collocation,
)
from .errors import UnsupportedProfileError
from .model import BoundaryKind, BvpProblem, FormulationKind

PARAMETER_INDICES = (1, 2, 3)


def _require_parametric(problem: BvpProblem):
    if not problem.profile.has_parameters:
        raise UnsupportedProfileError(
            "sensitivities are defined for the tanh profile parameters only"
        )


def _simpson(widths, f_nodes, f_mids) -> float:
    return float(np.sum(widths / 6.0 * (f_nodes[:-1] + 4.0 * f_mids + f_nodes[1:])))


def _energy_density(problem: BvpProblem, system: BvpSystem, u, X):
    c, _ = system.curvature(u)
    w = (X[3] - c) ** 2
    if problem.formulation is FormulationKind.ARC_LENGTH:
        w = w * X[0]
    return w


def energy(problem: BvpProblem, solution: CollocationSolution) -> float:
    """Bending energy W by composite Simpson quadrature on the solution mesh."""
    system = BvpSystem(problem)
    mesh = solution.mesh
    w_nodes = _energy_density(problem, system, mesh.nodes, solution.values)
    w_mids = _energy_density(problem, system, mesh.midpoints, solution.evaluate(mesh.midpoints))
    return _simpson(mesh.widths, w_nodes, w_mids)


# ---------------------------------------------------------------------------
# forward route


class _AugmentedSystem:
    """Original six equations coupled with the sensitivity six for one p_j.

    The sensitivity block is linear in s and its collocation midpoints do
    not feed back into the state block, so the pointwise Jacobian is block
    diagonal; from a converged warm start the s block converges in one
    Newton step.
    """

    def __init__(self, problem: BvpProblem, j: int):
        self.k = 12
        self.base = BvpSystem(problem)
        p = problem.profile
        self._p = p
        self._j = j
        self._form = problem.formulation.code
        self._kappa = problem.kappa_tilde
        conds = self.base._conditions
        self._conditions = conds + [(side, comp + 6, 0.0) for side, comp, _ in conds]

    def _pieces(self, u, X):
        x = np.ascontiguousarray(X[:6])
        s = X[6:]
        p = self._p
        c, cd = kernels.curvature_batch(p.kind.code, p.C0, p.gamma, p.u0, p.R0, p.const_value, u)
        dc, dcd = kernels.curvature_partials_batch(p.kind.code, p.C0, p.gamma, p.u0, p.R0, u)
        JG = -kernels.state_jacobian_batch(self._form, self._kappa, x, c, cd)
        P = kernels.param_jacobian_batch(self._form, self._kappa, x, c, cd, dc, dcd)
        return x, s, c, cd, JG, P[:, :, self._j - 1].T

    def rhs(self, u, X):
        x, s, c, cd, JG, Pj = self._pieces(u, X)
        G = -kernels.residual_batch(self._form, self._kappa, x, np.zeros_like(x), c, cd)
        out = np.empty_like(X)
        out[:6] = G
        out[6:] = np.einsum("mij,jm->im", JG, s) - Pj
        return out

    def jac(self, u, X):
        x, s, c, cd, JG, _ = self._pieces(u, X)
        m = u.shape[0]
        J = np.zeros((m, 12, 12))
        J[:, :6, :6] = JG
        J[:, 6:, 6:] = JG
        return J

    def bc(self, xa, xb):
        out = np.empty(self.k)
        for i, (side, comp, value) in enumerate(self._conditions):
            out[i] = (xa if side == 0 else xb)[comp] - value
        return out

    def bc_jacobians(self):
        ja = np.zeros((self.k, self.k))
        jb = np.zeros((self.k, self.k))
        for i, (side, comp, _) in enumerate(self._conditions):
            (ja if side == 0 else jb)[i, comp] = 1.0
        return ja, jb


@dataclass
class SensitivityResult:
    """Sensitivity functions s_j = dx/dp_j and the energy sensitivity dW/dp_j."""

    j: int
    method: str
    solution: CollocationSolution  # coupled 12-component solution
    energy_sensitivity: float

    @property
    def converged(self) -> bool:
        return self.solution.converged

    @property
    def mesh(self) -> Mesh:
        return self.solution.mesh

    @property
    def s_values(self) -> np.ndarray:
        """Nodal sensitivity values, shape (6, n_nodes)."""
        return self.solution.values[6:]

    @property
    def base_values(self) -> np.ndarray:
        return self.solution.values[:6]

    def evaluate(self, u) -> np.ndarray:
        """Sensitivity components at u: (6,) or (6, m)."""
        return self.solution.evaluate(u)[6:]

    def evaluate_derivative(self, u) -> np.ndarray:
        return self.solution.evaluate_derivative(u)[6:]


def forward_sensitivity(
    problem: BvpProblem,
    base: CollocationSolution,
    j: int,
    settings: SolverSettings | None = None,
) -> SensitivityResult:
    """Solve the appended 12-equation system for s_j, j in {1, 2, 3}.

    The base solution warm-starts the state block (zeros for the
    sensitivity block).  Returns the sensitivities together with the
    forward energy sensitivity dW/dp_j.
    """
    _require_parametric(problem)
    if j not in PARAMETER_INDICES:
        raise ValueError(f"parameter index must be 1, 2 or 3, got {j}")
    settings = settings or SolverSettings()
    system = _AugmentedSystem(problem, j)
    n = base.mesh.nodes.size
    X0 = np.vstack([base.values, np.zeros((6, n))])
    sol = solve_collocation(system, base.mesh, X0, settings)
    result = SensitivityResult(j=j, method="forward", solution=sol, energy_sensitivity=np.nan)
    result.energy_sensitivity = energy_sensitivity_forward(problem, sol, result, j)
    return result


def energy_sensitivity_forward(
    problem: BvpProblem, base, sens: SensitivityResult, j: int
) -> float:
    """dW/dp_j = int dw/dp_j + (D_x w) s_j, Simpson on the solution mesh.

    `base` may be the base CollocationSolution or the coupled 12-component
    solution; the state block is read from `sens` either way so the
    quadrature stays consistent with the sensitivity mesh.
    """
    _require_parametric(problem)
    sol = sens.solution
    mesh = sol.mesh
    p = problem.profile
    arc = problem.formulation is FormulationKind.ARC_LENGTH

    def integrand(u, X12):
        x, s = X12[:6], X12[6:]
        c, _ = kernels.curvature_batch(p.kind.code, p.C0, p.gamma, p.u0, p.R0, p.const_value, u)
        dc, _ = kernels.curvature_partials_batch(p.kind.code, p.C0, p.gamma, p.u0, p.R0, u)
        hc = x[3] - c
        if arc:
            return 2.0 * hc * (s[3] - dc[j - 1]) * x[0] + hc**2 * s[0]
        return 2.0 * hc * (s[3] - dc[j - 1])

    f_nodes = integrand(mesh.nodes, sol.values)
    f_mids = integrand(mesh.midpoints, sol.evaluate(mesh.midpoints))
    return _simpson(mesh.widths, f_nodes, f_mids)


# ---------------------------------------------------------------------------
# adjoint route


_ADJOINT_ZERO_COMPONENTS = {
    # free state components at each endpoint get vanishing adjoint values
    BoundaryKind.TYPE_I: (("start", 2), ("start", 4), ("start", 6),
                          ("end", 1), ("end", 4), ("end", 5)),
    BoundaryKind.TYPE_II: (("start", 2), ("start", 4), ("start", 5), ("start", 6),
                           ("end", 1), ("end", 4)),
}


@dataclass
class AdjointSolution:
    """Adjoint functions v1..v6 along the frozen base trajectory."""

    solution: CollocationSolution

    @property
    def mesh(self) -> Mesh:
        return self.solution.mesh

    @property
    def converged(self) -> bool:
        return self.solution.converged

    @property
    def values(self) -> np.ndarray:
        return self.solution.values

    def evaluate(self, u) -> np.ndarray:
        return self.solution.evaluate(u)


class _AdjointSystem:
    """Linear system vdot = (D_x F)^T v - grad_x w along the base solution."""

    def __init__(self, problem: BvpProblem, base: CollocationSolution,
                 conditions):
        self.k = 6
        self.problem = problem
        self.base = base
        p = problem.profile
        self._p = p
        self._form = problem.formulation.code
        self._kappa = problem.kappa_tilde
        self._conditions = conditions

    def _coeffs(self, u):
        x = np.ascontiguousarray(self.base.evaluate(u))
        p = self._p
        c, cd = kernels.curvature_batch(p.kind.code, p.C0, p.gamma, p.u0, p.R0, p.const_value, u)
        DxF = kernels.state_jacobian_batch(self._form, self._kappa, x, c, cd)
        gradw = np.zeros_like(x)
        hc = x[3] - c
        if self.problem.formulation is FormulationKind.ARC_LENGTH:
            gradw[0] = hc**2
            gradw[3] = 2.0 * hc * x[0]
        else:
            gradw[3] = 2.0 * hc
        return DxF, gradw

    def rhs(self, u, V):
        DxF, gradw = self._coeffs(u)
        return np.einsum("mji,jm->im", DxF, V) - gradw

    def jac(self, u, V):
        DxF, _ = self._coeffs(u)
        return DxF.transpose(0, 2, 1)

    def bc(self, xa, xb):
        out = np.empty(6)
        for i, (side, comp, value) in enumerate(self._conditions):
            out[i] = (xa if side == 0 else xb)[comp] - value
        return out

    def bc_jacobians(self):
        ja = np.zeros((6, 6))
        jb = np.zeros((6, 6))
        for i, (side, comp, _) in enumerate(self._conditions):
            (ja if side == 0 else jb)[i, comp] = 1.0
        return ja, jb


def adjoint_solve(
    problem: BvpProblem,
    base: CollocationSolution,
    settings: SolverSettings | None = None,
    allow_second_bc_kind: bool = False,
) -> AdjointSolution:
    """Solve the adjoint BVP along `base`.

    Side conditions pin the adjoint components conjugate to the free state
    components at each endpoint, which makes the sensitivity boundary term
    vanish.  Derived for the first boundary family; the second family's
    conditions follow the same argument but are exposed only behind
    `allow_second_bc_kind` (validated by forward agreement, not proof).
    """
    kind = problem.bc.kind
    if kind is BoundaryKind.TYPE_II and not allow_second_bc_kind:
        raise ValueError(
            "adjoint side conditions for the second boundary family are "
            "experimental; pass allow_second_bc_kind=True to use them"
        )
    if kind not in _ADJOINT_ZERO_COMPONENTS:
        raise ValueError("adjoint solve supports the standard boundary families only")
    settings = settings or SolverSettings()
    conditions = [
        (0 if end == "start" else 1, comp - 1, 0.0)
        for end, comp in _ADJOINT_ZERO_COMPONENTS[kind]
    ]
    system = _AdjointSystem(problem, base, conditions)
    V0 = np.zeros((6, base.mesh.nodes.size))
    sol = solve_collocation(system, base.mesh, V0, settings)
    return AdjointSolution(solution=sol)


def energy_sensitivity_adjoint(
    problem: BvpProblem,
    base: CollocationSolution,
    adjoint: AdjointSolution,
    j: int,
) -> float:
    """dW/dp_j = int (dw/dp_j - v^T dF/dp_j), Simpson on the base mesh."""
    _require_parametric(problem)
    if j not in PARAMETER_INDICES:
        raise ValueError(f"parameter index must be 1, 2 or 3, got {j}")
    mesh = base.mesh
    p = problem.profile
    arc = problem.formulation is FormulationKind.ARC_LENGTH

    def integrand(u, X, V):
        x = np.ascontiguousarray(X)
        c, cd = kernels.curvature_batch(p.kind.code, p.C0, p.gamma, p.u0, p.R0, p.const_value, u)
        dc, dcd = kernels.curvature_partials_batch(p.kind.code, p.C0, p.gamma, p.u0, p.R0, u)
        P = kernels.param_jacobian_batch(problem.formulation.code, problem.kappa_tilde,
                                         x, c, cd, dc, dcd)
        hc = x[3] - c
        dwdp = -2.0 * hc * dc[j - 1]
        if arc:
            dwdp = dwdp * x[0]
        return dwdp - np.einsum("im,mi->m", V, P[:, :, j - 1])

    f_nodes = integrand(mesh.nodes, base.values, adjoint.values)
    mids = mesh.midpoints
    f_mids = integrand(mids, base.evaluate(mids), adjoint.evaluate(mids))
    return _simpson(mesh.widths, f_nodes, f_mids)


# ---------------------------------------------------------------------------
# dimensional rescaling

_RESCALE_FACTORS = {
    # dimensionless mean-curvature sensitivity -> dimensional, arc length
    "h_wrt_C0": lambda r0: 1.0 / r0,
    "h_wrt_gamma": lambda r0: 1.0,
    "h_wrt_u0": lambda r0: 1.0 / r0**2,
    # area parametrization companions (gamma = 2*pi*R0^2*xi, u0 = a0/(2*pi*R0^2))
    "area_h_wrt_C0": lambda r0: 1.0 / r0,
    "area_h_wrt_gamma": lambda r0: 2.0 * math.pi * r0,
    "area_h_wrt_u0": lambda r0: 1.0 / (2.0 * math.pi * r0**3),
}


def rescale_sensitivity(value, which: str, R0: float):
    """Convert a dimensionless sensitivity to its dimensional counterpart.

    The dimensionless and dimensional sensitivities differ by exact powers
    of R0 (and 2*pi for the area parametrization): e.g. dh/dC0 = R0 * dH/dC0,
    dh/dgamma = dH/dxi, dh/du0 = R0^2 * dH/ds0.
    """
    try:
        factor = _RESCALE_FACTORS[which](R0)
    except KeyError:
        raise ValueError(f"unknown sensitivity selector {which!r}") from None
    return np.asarray(value) * factor if not np.isscalar(value) else value * factor
