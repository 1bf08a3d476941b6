"""Hot loops for particle integration.

Each kernel is numba-compiled when available (see :mod:`subjet._jit`); the
uncompiled body is the numpy fallback and is reachable through
``python_version(kernel)`` for benchmarks and cross-checks.
"""

import numpy as np

from ._jit import njit

# status codes returned by the kernels
OK = 0
LEFT_CONE = 1


@njit
def lorentz_quadratic(g, v):
    return v @ (g @ v)


@njit
def rk4_uniform_field(z0, v0, step, n_steps, project_every, g, K):
    """Classical RK4 for z'' = K z' with velocity renormalisation.

    ``K`` is the constant matrix mapping velocity to acceleration (zero for
    a free particle).  Every ``project_every`` steps v is rescaled so that
    g(v, v) = 1; ``violation[k]`` holds |g(v, v) - 1| before that rescaling.

    Returns (z, v, violation, status, failed_step).
    """
    m = z0.shape[0]
    zs = np.empty((n_steps + 1, m))
    vs = np.empty((n_steps + 1, m))
    viol = np.empty(n_steps + 1)
    z = z0.copy()
    v = v0.copy()
    zs[0] = z
    vs[0] = v
    viol[0] = abs(lorentz_quadratic(g, v) - 1.0)
    h = step
    for k in range(n_steps):
        a1 = K @ v
        v2 = v + 0.5 * h * a1
        a2 = K @ v2
        v3 = v + 0.5 * h * a2
        a3 = K @ v3
        v4 = v + h * a3
        a4 = K @ v4
        if (lorentz_quadratic(g, v2) <= 0.0 or lorentz_quadratic(g, v3) <= 0.0
                or lorentz_quadratic(g, v4) <= 0.0):
            return zs[: k + 1], vs[: k + 1], viol[: k + 1], LEFT_CONE, k
        z = z + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        n2 = lorentz_quadratic(g, v)
        if n2 <= 0.0:
            return zs[: k + 1], vs[: k + 1], viol[: k + 1], LEFT_CONE, k
        viol[k + 1] = abs(n2 - 1.0)
        if project_every > 0 and (k + 1) % project_every == 0:
            v = v / np.sqrt(n2)
        zs[k + 1] = z
        vs[k + 1] = v
    return zs, vs, viol, OK, -1


@njit
def polyline_distances(points, vertices):
    """Distance from each point to the piecewise-linear curve through ``vertices``."""
    npts = points.shape[0]
    out = np.empty(npts)
    a = vertices[:-1]
    d = vertices[1:] - a
    dd = np.sum(d * d, axis=1)
    safe = np.where(dd > 0.0, dd, 1.0)
    for i in range(npts):
        rel = points[i] - a
        t = np.sum(rel * d, axis=1) / safe
        t = np.minimum(np.maximum(t, 0.0), 1.0)
        t = np.where(dd > 0.0, t, 0.0)
        gap = rel - t.reshape(-1, 1) * d
        out[i] = np.sqrt(np.min(np.sum(gap * gap, axis=1)))
    return out
