"""Fixed-step implicit midpoint integration for planar fields."""
import math

import numpy as np

FIXED_POINT_TOL = 1e-15
FIXED_POINT_MAXITER = 50


def implicit_midpoint(rhs, x, u, t, step=1e-3):
    """Integrate dz/dt = rhs(z) from time 0 to ``t`` with step at most ``step``.

    ``rhs(x, u)`` returns the pair (dx/dt, du/dt) and must accept arrays.
    The midpoint equation is solved by fixed-point iteration, which
    converges for step * Lipschitz < 1.  Negative ``t`` runs the same scheme
    backwards; the scheme is symmetric, so that is its exact inverse up to
    the fixed-point tolerance.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    x = np.array(x, dtype=float, copy=True)
    u = np.array(u, dtype=float, copy=True)
    if t == 0:
        return x, u
    n = max(1, math.ceil(abs(t) / step - 1e-12))
    h = t / n
    for _ in range(n):
        dx, du = rhs(x, u)
        xn = x + h * dx
        un = u + h * du
        for _ in range(FIXED_POINT_MAXITER):
            dx, du = rhs(0.5 * (x + xn), 0.5 * (u + un))
            xk = x + h * dx
            uk = u + h * du
            err = max(np.max(np.abs(xk - xn), initial=0.0), np.max(np.abs(uk - un), initial=0.0))
            xn, un = xk, uk
            if err <= FIXED_POINT_TOL:
                break
        x, u = xn, un
    return x, u
