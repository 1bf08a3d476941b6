"""Relativistic particle trajectories under the four-velocity constraint.

The constrained equations of motion are integrated directly:
z'' = 0 for the free particle and z''^A = -g^{AC} F_CB z'^B in an external
field, with F_CB = d_C A_B - d_B A_C.  These are the Euler-Lagrange
equations of the point-particle Lagrangians restricted to g(v, v) = 1.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainViolation, StepFailure
from .varcalc import LagrangianModel

#: initial states must satisfy the constraint this tightly
INITIAL_CONSTRAINT_TOL = 1e-10


@dataclass(frozen=True)
class ParticleState:
    tau: float
    z: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", np.array(self.z, dtype=float))
        object.__setattr__(self, "v", np.array(self.v, dtype=float))


def _particle_data(model: LagrangianModel):
    if model.n != 1 or "metric" not in model.params:
        raise ValueError(f"{model.name} is not a point-particle model")
    return model.params["metric"], model.params.get("potential")


def acceleration_matrix(model: LagrangianModel, z):
    """Matrix K with z'' = K z' at position z."""
    metric, potential = _particle_data(model)
    if potential is None:
        return np.zeros((metric.m, metric.m))
    return -metric.g_inv @ potential.field_strength(z)


def constraint_value(model: LagrangianModel, v):
    metric, _ = _particle_data(model)
    return float(metric.inner(v, v))


def particle_rhs(model: LagrangianModel, s: ParticleState, tol: float = 1e-6) -> np.ndarray:
    """Acceleration z^A_tautau on the constraint surface g(v, v) = 1."""
    n2 = constraint_value(model, s.v)
    if n2 <= 0.0 or abs(n2 - 1.0) > tol:
        raise DomainViolation(f"velocity is not unit timelike: g(v, v) = {n2!r}")
    return acceleration_matrix(model, s.z) @ s.v


@dataclass(frozen=True)
class Trajectory:
    tau: np.ndarray
    z: np.ndarray
    v: np.ndarray
    violation: np.ndarray
    model: str
    step: float
    project_every: int = 1
    periods: np.ndarray | None = field(default=None, compare=False)

    @property
    def drift(self) -> float:
        """Largest pre-projection constraint violation along the run."""
        return float(np.max(self.violation))

    def __len__(self):
        return self.tau.shape[0]

    def state(self, k) -> ParticleState:
        return ParticleState(self.tau[k], self.z[k], self.v[k])

    def reparametrized(self, scale=1.0, stride=1) -> "Trajectory":
        """Same samples under tau' = scale * tau, keeping every ``stride``-th one."""
        sl = slice(None, None, stride)
        return Trajectory(scale * self.tau[sl], self.z[sl], self.v[sl] / scale,
                          self.violation[sl], self.model, self.step * scale * stride,
                          self.project_every, self.periods)

    def display_z(self):
        """Positions with periodic coordinates wrapped into [0, period)."""
        if self.periods is None:
            return self.z
        per = np.asarray(self.periods, dtype=float)
        out = self.z.copy()
        wrap = per > 0
        out[:, wrap] = np.mod(out[:, wrap], per[wrap])
        return out

    def header(self):
        m = self.z.shape[1]
        return (["tau"] + [f"z{i}" for i in range(m)] + [f"v{i}" for i in range(m)]
                + ["constraint_violation"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        zs = self.display_z()
        for k in range(len(self)):
            w.writerow([repr(float(x)) for x in
                        np.concatenate([[self.tau[k]], zs[k], self.v[k], [self.violation[k]]])])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "step": self.step,
            "project_every": self.project_every,
            "drift": self.drift,
            "columns": self.header(),
            "tau": self.tau.tolist(),
            "z": self.display_z().tolist(),
            "v": self.v.tolist(),
            "constraint_violation": self.violation.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _rk4_general(model, z0, v0, h, n_steps, project_every):
    """RK4 for position-dependent fields; mirrors the compiled kernel."""
    g = model.params["metric"].g
    m = z0.size
    zs, vs = np.empty((n_steps + 1, m)), np.empty((n_steps + 1, m))
    viol = np.empty(n_steps + 1)
    z, v = z0.copy(), v0.copy()
    zs[0], vs[0], viol[0] = z, v, abs(v @ g @ v - 1.0)

    def acc(zz, vv):
        return acceleration_matrix(model, zz) @ vv

    for k in range(n_steps):
        a1 = acc(z, v)
        z2, v2 = z + 0.5 * h * v, v + 0.5 * h * a1
        a2 = acc(z2, v2)
        z3, v3 = z + 0.5 * h * v2, v + 0.5 * h * a2
        a3 = acc(z3, v3)
        z4, v4 = z + h * v3, v + h * a3
        a4 = acc(z4, v4)
        z = z + (h / 6.0) * (v + 2 * v2 + 2 * v3 + v4)
        v = v + (h / 6.0) * (a1 + 2 * a2 + 2 * a3 + a4)
        n2 = v @ g @ v
        if min(v2 @ g @ v2, v3 @ g @ v3, v4 @ g @ v4, n2) <= 0.0:
            return zs[: k + 1], vs[: k + 1], viol[: k + 1], kernels.LEFT_CONE, k
        viol[k + 1] = abs(n2 - 1.0)
        if project_every > 0 and (k + 1) % project_every == 0:
            v = v / np.sqrt(n2)
        zs[k + 1], vs[k + 1] = z, v
    return zs, vs, viol, kernels.OK, -1


def integrate(model: LagrangianModel, s0: ParticleState, step: float, n_steps: int,
              project_every: int = 1, periods=None) -> Trajectory:
    """Integrate the constrained particle equations with classical RK4.

    Uniform fields (and the free particle) run through the compiled kernel;
    position-dependent fields fall back to a Python loop.
    """
    metric, potential = _particle_data(model)
    if step <= 0 or n_steps < 0:
        raise ValueError("step must be positive and n_steps non-negative")
    n2 = metric.inner(s0.v, s0.v)
    if abs(n2 - 1.0) > INITIAL_CONSTRAINT_TOL:
        raise DomainViolation(f"initial velocity violates g(v, v) = 1: got {n2!r}")
    z0 = np.ascontiguousarray(s0.z, dtype=float)
    v0 = np.ascontiguousarray(s0.v, dtype=float)
    if potential is None or potential.uniform_curl:
        K = np.ascontiguousarray(acceleration_matrix(model, z0))
        zs, vs, viol, status, k = kernels.rk4_uniform_field(
            z0, v0, float(step), int(n_steps), int(project_every),
            np.ascontiguousarray(metric.g), K)
    else:
        zs, vs, viol, status, k = _rk4_general(model, z0, v0, float(step), int(n_steps),
                                               int(project_every))
    if status != kernels.OK:
        raise StepFailure(f"velocity left the timelike cone during step {k} "
                          f"(tau = {s0.tau + k * step:g})")
    tau = s0.tau + step * np.arange(n_steps + 1)
    return Trajectory(tau, zs, vs, viol, model.name, float(step), int(project_every),
                      None if periods is None else np.asarray(periods, dtype=float))


def reparametrization_equivalence(t1: Trajectory, t2: Trajectory, tol: float) -> bool:
    """True iff every sample of t1 lies within ``tol`` of t2's polyline."""
    if t1.z.shape[1] != t2.z.shape[1]:
        return False
    if len(t2) == 1:
        d = np.linalg.norm(t1.z - t2.z[0], axis=1)
    else:
        d = kernels.polyline_distances(np.ascontiguousarray(t1.z), np.ascontiguousarray(t2.z))
    return bool(np.max(d) < tol)


def helix_oracle(z0, v0, B, tau, plane=(1, 2)):
    """Closed-form solution in a uniform field F_ij = B with the magnetic gauge.

    The in-plane velocity rotates as w(tau) = w0 exp(-i B tau) (w = v^i + i v^j)
    and every other component moves linearly.
    """
    i, j = plane
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    z0 = np.asarray(z0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    z = z0 + np.outer(tau, v0)
    v = np.tile(v0, (tau.size, 1))
    w0 = v0[i] + 1j * v0[j]
    rot = np.exp(-1j * B * tau)
    if B != 0:
        disp = w0 * (rot - 1.0) / (-1j * B)
    else:
        disp = w0 * tau
    z[:, i] = z0[i] + disp.real
    z[:, j] = z0[j] + disp.imag
    v[:, i] = (w0 * rot).real
    v[:, j] = (w0 * rot).imag
    return z, v
