"""Pure-numpy batch kernels for the membrane ODE systems.

These are the hot inner-loop evaluations of the collocation solver:
spontaneous-curvature profiles and their closed-form derivatives, the
six-component residual F(x, xdot, u), the state Jacobian D_x F, and the
parameter columns dF/dp_j for p = (C0, gamma, u0).  The compiled module
`_kernels` implements the identical API; `kernels` selects one at import.

All functions take and return float64 arrays with points along the last
axis.  No argument validation happens here: callers guarantee shapes, and
x1 <= 0 produces inf/nan rather than an exception (the Newton line search
treats non-finite trial residuals as rejected steps).
"""

import numpy as np

BACKEND = "python"

# curvature profile kinds
TYPE_I = 1
TYPE_II = 2
CONSTANT = 3

# formulation codes
ARC_LENGTH = 1
AREA = 2

# sech^2 underflows past |z| ~ 355; clip to keep cosh finite
_Z_CLIP = 350.0


def curvature_batch(kind, c0, gamma, u0, r0, const_value, u):
    """Profile value c(u) and derivative cdot(u) at each point of `u`."""
    u = np.asarray(u, dtype=np.float64)
    if kind == CONSTANT:
        return np.full_like(u, const_value), np.zeros_like(u)
    z = gamma * (u - u0)
    t = np.tanh(z)
    s2 = np.cosh(np.clip(z, -_Z_CLIP, _Z_CLIP)) ** -2.0
    if kind == TYPE_I:
        c = 0.5 * r0 * c0 * (1.0 - t)
        cdot = -0.5 * r0 * c0 * gamma * s2
    else:
        k = 0.5 * r0 * c0 / u0
        d = u - u0
        c = -k * d * (1.0 - t)
        cdot = -k * (1.0 - t) + k * gamma * d * s2
    return c, cdot


def curvature_partials_batch(kind, c0, gamma, u0, r0, u):
    """Partials (dc/dp_j, dcdot/dp_j), j over (C0, gamma, u0): two (3, m) arrays."""
    u = np.asarray(u, dtype=np.float64)
    m = u.shape[0]
    dc = np.empty((3, m))
    dcd = np.empty((3, m))
    z = gamma * (u - u0)
    t = np.tanh(z)
    s2 = np.cosh(np.clip(z, -_Z_CLIP, _Z_CLIP)) ** -2.0
    d = u - u0
    if kind == TYPE_I:
        dc[0] = 0.5 * r0 * (1.0 - t)
        dc[1] = -0.5 * r0 * c0 * d * s2
        dc[2] = 0.5 * r0 * c0 * gamma * s2
        dcd[0] = -0.5 * r0 * gamma * s2
        dcd[1] = -0.5 * r0 * c0 * s2 + r0 * c0 * gamma * d * s2 * t
        dcd[2] = -r0 * c0 * gamma**2 * s2 * t
    else:
        k = 0.5 * r0 * c0 / u0
        dc[0] = -(0.5 * r0 / u0) * d * (1.0 - t)
        dc[1] = k * d**2 * s2
        dc[2] = (0.5 * r0 * c0 / u0**2) * d * (1.0 - t) + k * (1.0 - t) - k * gamma * d * s2
        dcd[0] = -(0.5 * r0 / u0) * (1.0 - t) + (0.5 * r0 * gamma / u0) * d * s2
        dcd[1] = 2.0 * k * d * s2 - 2.0 * k * gamma * d**2 * s2 * t
        dcd[2] = (
            (0.5 * r0 * c0 / u0**2) * (1.0 - t)
            - (r0 * c0 * gamma / u0) * s2
            - (0.5 * r0 * c0 * gamma / u0**2) * d * s2
            + (r0 * c0 * gamma**2 / u0) * d * s2 * t
        )
    return dc, dcd


def residual_batch(form, kappa, x, xdot, c, cdot):
    """Implicit-form residual F(x, xdot, u): (6, m) array."""
    x1, x2, x3, x4, x5, x6 = x
    sin3 = np.sin(x3)
    cos3 = np.cos(x3)
    hc = x4 - c
    F = np.empty_like(x)
    if form == ARC_LENGTH:
        q = x4 - sin3 / x1
        F[0] = xdot[0] - cos3
        F[1] = xdot[1] - sin3
        F[2] = xdot[2] - 2.0 * x4 + sin3 / x1
        F[3] = xdot[3] - x5 / x1 - cdot
        F[4] = (
            xdot[4]
            - 2.0 * x1 * x4 * (hc**2 + x6 / kappa)
            + 2.0 * x1 * hc * (x4**2 + q**2)
        )
        F[5] = xdot[5] - 2.0 * kappa * cdot * x4 + 2.0 * kappa * c * cdot
    else:
        q = x4 - sin3 / x1
        F[0] = xdot[0] - cos3 / x1
        F[1] = xdot[1] - sin3 / x1
        F[2] = xdot[2] - 2.0 * x4 / x1 + sin3 / x1**2
        F[3] = xdot[3] - x5 / x1**2 - cdot
        F[4] = (
            xdot[4]
            - 2.0 * x4 * (hc**2 + x6 / kappa)
            + 2.0 * hc * (x4**2 + q**2)
        )
        F[5] = xdot[5] - 2.0 * kappa * cdot * x4 + 2.0 * kappa * c * cdot
    return F


def state_jacobian_batch(form, kappa, x, c, cdot):
    """State Jacobian D_x F as an (m, 6, 6) array (independent of xdot)."""
    x1, x2, x3, x4, x5, x6 = x
    m = x1.shape[0]
    sin3 = np.sin(x3)
    cos3 = np.cos(x3)
    hc = x4 - c
    J = np.zeros((m, 6, 6))
    if form == ARC_LENGTH:
        q = x4 - sin3 / x1
        J[:, 0, 2] = sin3
        J[:, 1, 2] = -cos3
        J[:, 2, 0] = -sin3 / x1**2
        J[:, 2, 2] = cos3 / x1
        J[:, 2, 3] = -2.0
        J[:, 3, 0] = x5 / x1**2
        J[:, 3, 4] = -1.0 / x1
        J[:, 4, 0] = (
            -2.0 * x4 * (hc**2 + x6 / kappa)
            + 2.0 * hc * x4**2
            + 2.0 * hc * q**2
            + 4.0 * x1 * hc * (sin3 / x1**2) * q
        )
        J[:, 4, 2] = 4.0 * x1 * hc * (-cos3 / x1) * q
        J[:, 4, 3] = (
            -2.0 * x1 * hc**2
            - 2.0 * x1 * x6 / kappa
            + 2.0 * x1 * x4**2
            + 2.0 * x1 * q**2
            + 4.0 * x1 * hc * q
        )
        J[:, 4, 5] = -2.0 * x1 * x4 / kappa
        J[:, 5, 3] = -2.0 * kappa * cdot
    else:
        q = x4 - sin3 / x1
        J[:, 0, 0] = cos3 / x1**2
        J[:, 0, 2] = sin3 / x1
        J[:, 1, 0] = sin3 / x1**2
        J[:, 1, 2] = -cos3 / x1
        J[:, 2, 0] = 2.0 * x4 / x1**2 - 2.0 * sin3 / x1**3
        J[:, 2, 2] = cos3 / x1**2
        J[:, 2, 3] = -2.0 / x1
        J[:, 3, 0] = 2.0 * x5 / x1**3
        J[:, 3, 4] = -1.0 / x1**2
        J[:, 4, 0] = 4.0 * hc * (sin3 / x1**2) * q
        J[:, 4, 2] = 4.0 * hc * (-cos3 / x1) * q
        J[:, 4, 3] = (
            -2.0 * hc**2
            - 2.0 * x6 / kappa
            + 2.0 * x4**2
            + 2.0 * q**2
            + 4.0 * hc * q
        )
        J[:, 4, 5] = -2.0 * x4 / kappa
        J[:, 5, 3] = -2.0 * kappa * cdot
    return J


def param_jacobian_batch(form, kappa, x, c, cdot, dc, dcd):
    """Parameter columns dF/dp_j as an (m, 6, 3) array."""
    x1, x2, x3, x4, x5, x6 = x
    m = x1.shape[0]
    sin3 = np.sin(x3)
    hc = x4 - c
    q = x4 - sin3 / x1
    P = np.zeros((m, 6, 3))
    if form == ARC_LENGTH:
        w5 = 4.0 * x1 * x4 * hc - 2.0 * x1 * (x4**2 + q**2)
    else:
        w5 = 4.0 * x4 * hc - 2.0 * (x4**2 + q**2)
    for j in range(3):
        P[:, 3, j] = -dcd[j]
        P[:, 4, j] = w5 * dc[j]
        P[:, 5, j] = -2.0 * kappa * x4 * dcd[j] + 2.0 * kappa * (dc[j] * cdot + c * dcd[j])
    return P
