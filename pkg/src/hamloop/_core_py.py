"""Pure-numpy kernels; drop-in fallback for the compiled core.

Both backends implement fixed-step RK4 for the bump-times-quadratic field

    xdot = J grad( rho(|x|^2) * (A s1 + B s2 + C s3 + D s4) )

with the coefficient values pre-sampled at the 2n+1 stage times
t0, t0+h/2, t0+h, ...  Points at or outside the support radius see an
exactly zero field, so they are returned bit-for-bit unchanged.
"""

import numpy as np

BACKEND = "python"


def _stage_derivative(a, b, c, d, x, bumped, r0sq, bigr0sq, sharp):
    x1, y1, x2, y2 = x[:, 0], x[:, 1], x[:, 2], x[:, 3]
    gx1 = 2.0 * a * x1 + c * x2 + d * y2
    gy1 = 2.0 * a * y1 + c * y2 - d * x2
    gx2 = 2.0 * b * x2 + c * x1 - d * y1
    gy2 = 2.0 * b * y2 + c * y1 + d * x1
    if bumped:
        q = x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2
        rho = np.ones_like(q)
        drho = np.zeros_like(q)
        outside = q >= bigr0sq
        rho[outside] = 0.0
        mid = (q > r0sq) & (q < bigr0sq)
        if np.any(mid):
            qm = q[mid]
            u1 = bigr0sq - qm
            u2 = qm - r0sq
            g1 = np.exp(-sharp / u1)
            g2 = np.exp(-sharp / u2)
            rho[mid] = g1 / (g1 + g2)
            drho[mid] = (
                -sharp * g1 * g2 * (1.0 / (u1 * u1) + 1.0 / (u2 * u2)) / (g1 + g2) ** 2
            )
        h = (
            a * (x1 * x1 + y1 * y1)
            + b * (x2 * x2 + y2 * y2)
            + c * (x1 * x2 + y1 * y2)
            + d * (x1 * y2 - x2 * y1)
        )
        w = 2.0 * drho * h
        gx1 = rho * gx1 + w * x1
        gy1 = rho * gy1 + w * y1
        gx2 = rho * gx2 + w * x2
        gy2 = rho * gy2 + w * y2
    return np.stack([gy1, -gx1, gy2, -gx2], axis=1)


def rk4_quad_bump(x0, acoef, bcoef, ccoef, dcoef, h, r0sq, bigr0sq, sharp, bumped):
    """Integrate the batch x0 (m,4) over n steps; coefficient tables have 2n+1 rows."""
    x = np.array(x0, dtype=float, copy=True)
    nsteps = (len(acoef) - 1) // 2
    for k in range(nsteps):
        i0, i1, i2 = 2 * k, 2 * k + 1, 2 * k + 2
        k1 = _stage_derivative(
            acoef[i0], bcoef[i0], ccoef[i0], dcoef[i0], x, bumped, r0sq, bigr0sq, sharp
        )
        k2 = _stage_derivative(
            acoef[i1], bcoef[i1], ccoef[i1], dcoef[i1],
            x + (0.5 * h) * k1, bumped, r0sq, bigr0sq, sharp,
        )
        k3 = _stage_derivative(
            acoef[i1], bcoef[i1], ccoef[i1], dcoef[i1],
            x + (0.5 * h) * k2, bumped, r0sq, bigr0sq, sharp,
        )
        k4 = _stage_derivative(
            acoef[i2], bcoef[i2], ccoef[i2], dcoef[i2],
            x + h * k3, bumped, r0sq, bigr0sq, sharp,
        )
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x
