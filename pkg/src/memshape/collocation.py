"""Nonlinear two-point BVP solver by piecewise-cubic collocation.

General-purpose core for first-order systems in implicit form
F(x, xdot, u) = 0 with identity rate Jacobian (so xdot = G(x, u)) and
separated Dirichlet boundary conditions.  On each mesh subinterval the
solution is a cubic polynomial; the scheme enforces the ODE at both
endpoints and the midpoint of every subinterval plus C1 continuity at
the nodes, which reduces to the three-point Lobatto (Simpson) condition

    X_{i+1} - X_i = h/6 * (G_i + 4*G_mid + G_{i+1}),
    X_mid = (X_i + X_{i+1})/2 + h/8 * (G_i - G_{i+1}),

for the nodal unknowns.  The Newton correction solves the almost-block-
diagonal linearization with a sparse LU; a backtracking line search keeps
the defect norm strictly decreasing.  Non-convergence is reported as a
value (converged=False on the best iterate); only a singular Newton
matrix raises.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .errors import OutOfDomainError, SingularSystemError
from .model import (
    BoundaryKind,
    BvpProblem,
    CurvatureKind,
    FormulationKind,
    StateVector,
)

logger = logging.getLogger(__name__)

_MAX_HALVINGS = 30


@dataclass(frozen=True)
class Mesh:
    """Strictly increasing collocation nodes spanning the solve domain."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("mesh needs at least two nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("mesh nodes must be strictly increasing")

    @classmethod
    def uniform(cls, start: float, end: float, n: int) -> "Mesh":
        """n subintervals (n+1 nodes) equally spaced on [start, end]."""
        return cls(np.linspace(start, end, n + 1))

    @property
    def n_intervals(self) -> int:
        return self.nodes.size - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    def halved(self) -> "Mesh":
        """Every subinterval split in two."""
        return Mesh(np.sort(np.concatenate([self.nodes, self.midpoints])))

    def with_extra_nodes(self, extra) -> "Mesh":
        """Mesh with additional nodes merged in (near-duplicates dropped)."""
        merged = np.sort(np.concatenate([self.nodes, np.atleast_1d(extra)]))
        span = merged[-1] - merged[0]
        keep = np.concatenate([[True], np.diff(merged) > 1e-9 * max(span, 1.0)])
        merged = merged[keep]
        merged[-1] = self.nodes[-1]
        return Mesh(merged)


@dataclass(frozen=True)
class SolverSettings:
    """Newton iteration controls."""

    newton_tol: float = 1e-10
    max_newton_iters: int = 40
    damping: bool = True
    max_mesh_points: int = 20000
    refine: bool = False

    def __post_init__(self):
        if self.newton_tol <= 0:
            raise ValueError("newton_tol must be positive")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be at least 1")


@dataclass
class CollocationSolution:
    """Piecewise-cubic (Hermite) representation of a k-component solution.

    `values` and `slopes` hold the nodal states and nodal derivatives,
    shape (k, n_nodes); together they determine the C1 cubic interpolant.
    """

    mesh: Mesh
    values: np.ndarray
    slopes: np.ndarray
    converged: bool
    final_residual_norm: float
    newton_iterations: int = 0

    @property
    def k(self) -> int:
        return self.values.shape[0]

    def _locate(self, u):
        nodes = self.mesh.nodes
        u = np.asarray(u, dtype=float)
        span = nodes[-1] - nodes[0]
        tol = 1e-12 * max(1.0, abs(span))
        if np.any(u < nodes[0] - tol) or np.any(u > nodes[-1] + tol):
            raise OutOfDomainError(
                f"evaluation outside [{nodes[0]}, {nodes[-1]}]"
            )
        idx = np.clip(np.searchsorted(nodes, u, side="right") - 1, 0, nodes.size - 2)
        h = nodes[idx + 1] - nodes[idx]
        w = np.clip((u - nodes[idx]) / h, 0.0, 1.0)
        return idx, h, w

    def evaluate(self, u) -> np.ndarray:
        """Interpolant value at u: shape (k,) for scalar u, (k, m) for arrays."""
        scalar = np.isscalar(u)
        idx, h, w = self._locate(np.atleast_1d(u))
        h00 = 1.0 + w * w * (2.0 * w - 3.0)
        h01 = w * w * (3.0 - 2.0 * w)
        h10 = w * (1.0 - w) ** 2 * h
        h11 = w * w * (w - 1.0) * h
        out = (
            self.values[:, idx] * h00
            + self.values[:, idx + 1] * h01
            + self.slopes[:, idx] * h10
            + self.slopes[:, idx + 1] * h11
        )
        return out[:, 0] if scalar else out

    def evaluate_derivative(self, u) -> np.ndarray:
        """Interpolant derivative at u, same shapes as `evaluate`."""
        scalar = np.isscalar(u)
        idx, h, w = self._locate(np.atleast_1d(u))
        d00 = 6.0 * w * (w - 1.0) / h
        d01 = -d00
        d10 = 1.0 - 4.0 * w + 3.0 * w * w
        d11 = w * (3.0 * w - 2.0)
        out = (
            self.values[:, idx] * d00
            + self.values[:, idx + 1] * d01
            + self.slopes[:, idx] * d10
            + self.slopes[:, idx + 1] * d11
        )
        return out[:, 0] if scalar else out

    def __call__(self, u) -> np.ndarray:
        return self.evaluate(u)


def evaluate(solution: CollocationSolution, u) -> StateVector:
    """Interpolant state at a single point of a six-component solution."""
    return StateVector.from_array(solution.evaluate(float(u)))


# ---------------------------------------------------------------------------
# systems


class BvpSystem:
    """Explicit-form adapter xdot = G(x, u) for a membrane problem."""

    def __init__(self, problem: BvpProblem):
        self.problem = problem
        self.k = 6
        p = problem.profile
        self._curv_args = (p.kind.code, p.C0, p.gamma, p.u0, p.R0, p.const_value)
        self._form = problem.formulation.code
        self._kappa = problem.kappa_tilde
        self._conditions = [
            (0 if end == "start" else 1, comp - 1, value)
            for end, comp, value in problem.bc.conditions()
        ]

    def curvature(self, u):
        return kernels.curvature_batch(*self._curv_args, u)

    def rhs(self, u, X):
        c, cd = self.curvature(u)
        F = kernels.residual_batch(self._form, self._kappa, X, np.zeros_like(X), c, cd)
        return -F

    def jac(self, u, X):
        c, cd = self.curvature(u)
        return -kernels.state_jacobian_batch(self._form, self._kappa, X, c, cd)

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


# ---------------------------------------------------------------------------
# Newton collocation core


def _residual_parts(system, nodes, mids, h, X):
    with np.errstate(all="ignore"):
        G = system.rhs(nodes, X)
        Xm = 0.5 * (X[:, :-1] + X[:, 1:]) + (h / 8.0) * (G[:, :-1] - G[:, 1:])
        Gm = system.rhs(mids, Xm)
        phi = (X[:, 1:] - X[:, :-1]) / h - (G[:, :-1] + 4.0 * Gm + G[:, 1:]) / 6.0
        bc = system.bc(X[:, 0], X[:, -1])
    return bc, phi, G, Gm, Xm


def _defect_norm(bc, phi) -> float:
    vals = np.concatenate([np.abs(bc), 1.5 * np.abs(phi).ravel()])
    if not np.all(np.isfinite(vals)):
        return np.inf
    # the interpolant's midpoint ODE defect is exactly 1.5x the scaled
    # Simpson residual, so this norm bounds the collocation defect
    return float(vals.max())


class _JacobianStructure:
    """Cached sparsity pattern of the almost-block-diagonal Newton matrix."""

    def __init__(self, n_int: int, k: int):
        self.n_int = n_int
        self.k = k
        rows = []
        cols = []
        blk_r = np.repeat(np.arange(k), k)
        blk_c = np.tile(np.arange(k), k)
        rows.append(blk_r)
        cols.append(blk_c)
        rows.append(blk_r)
        cols.append(n_int * k + blk_c)
        for n in range(n_int):
            rows.append(k + n * k + blk_r)
            cols.append(n * k + blk_c)
            rows.append(k + n * k + blk_r)
            cols.append((n + 1) * k + blk_c)
        self.rows = np.concatenate(rows)
        self.cols = np.concatenate(cols)
        self.shape = ((n_int + 1) * k, (n_int + 1) * k)

    def matrix(self, ja, jb, A, B):
        data = np.concatenate(
            [ja.ravel(), jb.ravel(), np.stack([A, B], axis=1).ravel()]
        )
        return sp.csc_matrix((data, (self.rows, self.cols)), shape=self.shape)


def _newton_blocks(system, nodes, mids, h, X, G, Gm, Xm):
    k = system.k
    with np.errstate(all="ignore"):
        J = system.jac(nodes, X)
        Jm = system.jac(mids, Xm)
    eye = np.eye(k)
    J0, J1 = J[:-1], J[1:]
    hcol = h[:, None, None]
    inner0 = 0.5 * eye + (hcol / 8.0) * J0
    inner1 = 0.5 * eye - (hcol / 8.0) * J1
    A = -eye / hcol - (J0 + 4.0 * np.einsum("nij,njk->nik", Jm, inner0)) / 6.0
    B = eye / hcol - (J1 + 4.0 * np.einsum("nij,njk->nik", Jm, inner1)) / 6.0
    return A, B


def solve_collocation(system, mesh: Mesh, guess_values: np.ndarray,
                      settings: SolverSettings) -> CollocationSolution:
    """Damped-Newton collocation solve of `system` on `mesh`.

    `guess_values` holds nodal states, shape (k, n_nodes).  Returns the
    best iterate with `converged` set accordingly; raises
    SingularSystemError if the Newton matrix cannot be factorized.
    """
    nodes = mesh.nodes
    mids = mesh.midpoints
    h = mesh.widths
    k = system.k
    n_int = mesh.n_intervals
    X = np.array(guess_values, dtype=float)
    if X.shape != (k, nodes.size):
        raise ValueError(f"guess shape {X.shape} does not match (k={k}, nodes={nodes.size})")

    structure = _JacobianStructure(n_int, k)
    ja, jb = system.bc_jacobians()

    bc, phi, G, Gm, Xm = _residual_parts(system, nodes, mids, h, X)
    err = _defect_norm(bc, phi)
    iterations = 0

    for it in range(settings.max_newton_iters):
        if err < settings.newton_tol:
            break
        if not np.isfinite(err):
            # the supplied guess is not evaluable; no direction to move in
            break
        A, B = _newton_blocks(system, nodes, mids, h, X, G, Gm, Xm)
        R = np.concatenate([bc, phi.T.ravel()])
        M = structure.matrix(ja, jb, A, B)
        try:
            lu = spla.splu(M)
        except RuntimeError as exc:
            raise SingularSystemError(it, f"Newton matrix factorization failed: {exc}") from exc
        delta = lu.solve(-R)
        if not np.all(np.isfinite(delta)):
            raise SingularSystemError(it, "Newton matrix is numerically singular")
        step = delta.reshape(nodes.size, k).T

        alpha = 1.0
        accepted = False
        for _ in range(_MAX_HALVINGS + 1):
            X_try = X + alpha * step
            bc_t, phi_t, G_t, Gm_t, Xm_t = _residual_parts(system, nodes, mids, h, X_try)
            err_t = _defect_norm(bc_t, phi_t)
            if err_t < err:
                X, bc, phi, G, Gm, Xm, err = X_try, bc_t, phi_t, G_t, Gm_t, Xm_t, err_t
                accepted = True
                break
            if not settings.damping:
                # undamped Newton commits to the full step
                X, bc, phi, G, Gm, Xm, err = X_try, bc_t, phi_t, G_t, Gm_t, Xm_t, err_t
                accepted = True
                break
            alpha *= 0.5
        iterations = it + 1
        if not accepted:
            logger.debug("line search stalled at iteration %d (defect %.3e)", it, err)
            break

    converged = bool(err < settings.newton_tol)
    return CollocationSolution(
        mesh=mesh,
        values=X,
        slopes=G,
        converged=converged,
        final_residual_norm=err,
        newton_iterations=iterations,
    )


def _coerce_guess(guess, mesh: Mesh, k: int) -> np.ndarray:
    if isinstance(guess, CollocationSolution):
        return guess.evaluate(mesh.nodes)
    if callable(guess):
        vals = np.asarray(guess(mesh.nodes), dtype=float)
    else:
        vals = np.asarray(guess, dtype=float)
    if vals.shape != (k, mesh.nodes.size):
        raise ValueError(f"guess shape {vals.shape}, expected ({k}, {mesh.nodes.size})")
    return vals


def _off_collocation_defect(system, solution: CollocationSolution) -> np.ndarray:
    """Max ODE defect per interval at the quarter points (not collocated)."""
    nodes = solution.mesh.nodes
    h = solution.mesh.widths
    defects = np.zeros(h.size)
    for frac in (0.25, 0.75):
        u = nodes[:-1] + frac * h
        with np.errstate(all="ignore"):
            d = solution.evaluate_derivative(u) - system.rhs(u, solution.evaluate(u))
        defects = np.maximum(defects, np.abs(d).max(axis=0))
    return defects


def solve_bvp(problem: BvpProblem, guess, mesh: Mesh | None = None,
              settings: SolverSettings | None = None) -> CollocationSolution:
    """Solve a membrane boundary value problem.

    `guess` may be a callable u -> (6, m) array, a (6, n_nodes) array on
    the mesh nodes, or a previous CollocationSolution (warm start).  With
    settings.refine on, subintervals whose off-collocation defect exceeds
    the Newton tolerance are split (up to max_mesh_points) and the solve
    is repeated from the interpolated previous solution.
    """
    settings = settings or SolverSettings()
    mesh = mesh or default_mesh(problem)
    system = BvpSystem(problem)
    X0 = _coerce_guess(guess, mesh, system.k)
    solution = solve_collocation(system, mesh, X0, settings)
    if not settings.refine:
        return solution
    for _ in range(3):
        if not solution.converged:
            break
        defects = _off_collocation_defect(system, solution)
        bad = np.nonzero(defects > settings.newton_tol)[0]
        if bad.size == 0 or solution.mesh.nodes.size + bad.size > settings.max_mesh_points:
            break
        new_mesh = solution.mesh.with_extra_nodes(solution.mesh.midpoints[bad])
        solution = solve_collocation(
            system, new_mesh, solution.evaluate(new_mesh.nodes), settings
        )
    return solution


# ---------------------------------------------------------------------------
# meshes and guesses


def default_mesh(problem: BvpProblem, n: int = 200) -> Mesh:
    """Uniform n-interval mesh with gradings where the problem needs them.

    Non-mollifying tanh profiles (gamma*u0 > 3) get a refined window of
    half-width 6/gamma around the transition, with local spacing capped at
    min(h/3, 0.25/gamma) so the transition itself is resolved.  Area-
    formulation closed-pole problems additionally get a geometrically
    graded first cell (the radial coordinate behaves like sqrt near 0).
    """
    end = problem.domain_end
    mesh = Mesh.uniform(0.0, end, n)
    h = end / n
    p = problem.profile
    if p.has_parameters and p.gamma > 0 and p.gamma * p.u0 > 3.0:
        w0 = max(p.u0 - 6.0 / p.gamma, 0.0)
        w1 = min(p.u0 + 6.0 / p.gamma, end)
        if w1 > w0:
            spacing = min(h / 3.0, 0.25 / p.gamma)
            count = int(np.ceil((w1 - w0) / spacing))
            mesh = mesh.with_extra_nodes(np.linspace(w0, w1, count + 1))
    if (
        problem.formulation is FormulationKind.AREA
        and problem.bc.kind is BoundaryKind.TYPE_I
    ):
        first = mesh.nodes[1]
        mesh = mesh.with_extra_nodes(first * 0.5 ** np.arange(1, 9))
    return mesh


def default_initial_guess(problem: BvpProblem):
    """Smooth boundary-condition-respecting guess for the standard problems.

    The tangent angle interpolates its boundary values (decaying fast
    enough that the radial coordinate stays positive), x1/x2 follow the
    kinematic rows for that angle, x4 = c/2, x5 = 0, and x6 sits at the
    far-end tension value.
    """
    end = problem.domain_end
    cond = {(e, c): v for e, c, v in problem.bc.conditions()}
    theta0 = cond.get(("start", 3), 0.0)
    x1_start = cond.get(("start", 1), 1.0)
    lam_end = cond.get(("end", 6), 0.0)

    grid = np.linspace(0.0, end, 4097)
    if theta0 == 0.0:
        x3 = np.zeros_like(grid)
    else:
        ell = min(max(abs(x1_start), 1e-2), end / 4.0)
        ramp = np.clip(1.0 - grid / ell, 0.0, None)
        x3 = theta0 * ramp**2
    cos3 = np.cos(x3)
    sin3 = np.sin(x3)
    dg = grid[1] - grid[0]
    cum_cos = np.concatenate([[0.0], np.cumsum(0.5 * (cos3[1:] + cos3[:-1]) * dg)])
    if problem.formulation is FormulationKind.ARC_LENGTH:
        x1 = x1_start + cum_cos
        x1 = np.maximum(x1, 1e-6)
        sin_over = sin3
    else:
        x1 = np.sqrt(np.maximum(x1_start**2 + 2.0 * cum_cos, 1e-12))
        sin_over = sin3 / x1
    cum_sin = np.concatenate([[0.0], np.cumsum(0.5 * (sin_over[1:] + sin_over[:-1]) * dg)])
    x2 = cum_sin - cum_sin[-1]
    p = problem.profile
    c, _ = kernels.curvature_batch(p.kind.code, p.C0, p.gamma, p.u0, p.R0, p.const_value, grid)
    table = np.vstack([x1, x2, x3, 0.5 * c, np.zeros_like(grid), np.full_like(grid, lam_end)])

    def guess(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return np.vstack([np.interp(u, grid, row) for row in table])

    return guess


def solve_with_continuation(
    problem: BvpProblem,
    settings: SolverSettings | None = None,
    mesh: Mesh | None = None,
    n_steps: int = 10,
    c0_start: float = 0.0,
    initial: CollocationSolution | None = None,
    on_step=None,
) -> CollocationSolution:
    """Solve by ramping the profile's C0 from c0_start up to its value.

    Each converged solution seeds the next step's Newton iteration; a
    failing step is bisected (down to 1/64 of the nominal increment)
    before giving up.  `on_step(c0, solution)` is called after every
    accepted step.  Returns the last solution (converged flag tells
    whether the target was reached).
    """
    settings = settings or SolverSettings()
    mesh = mesh or default_mesh(problem)
    target = problem.profile.C0
    if not problem.profile.has_parameters or target == c0_start or n_steps < 1:
        guess = initial if initial is not None else default_initial_guess(problem)
        sol = solve_bvp(problem, guess, mesh, settings)
        if on_step is not None:
            on_step(target, sol)
        return sol

    first = problem.with_profile(problem.profile.with_params(C0=c0_start))
    guess = initial if initial is not None else default_initial_guess(first)
    sol = solve_bvp(first, guess, mesh, settings)
    if on_step is not None:
        on_step(c0_start, sol)
    if not sol.converged:
        return sol

    nominal = (target - c0_start) / n_steps
    min_step = abs(nominal) / 64.0
    c0 = c0_start
    while c0 != target:
        step = nominal if abs(target - c0) > abs(nominal) else target - c0
        while True:
            c0_try = target if abs(target - (c0 + step)) < 0.5 * min_step else c0 + step
            candidate = problem.with_profile(problem.profile.with_params(C0=c0_try))
            trial = solve_bvp(candidate, sol, mesh, settings)
            if trial.converged:
                sol = trial
                c0 = c0_try
                if on_step is not None:
                    on_step(c0, sol)
                break
            if abs(step) <= min_step:
                return trial
            step *= 0.5
    return sol
