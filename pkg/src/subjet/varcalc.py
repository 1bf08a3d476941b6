"""Variational operators for first-order Lagrangians on J^1(Q x Z).

All second derivatives of a density come from one hyper-dual evaluation
over the seed vector ``(z^A, z^A_mu)``; seeds are laid out as ``z`` first
followed by ``zq`` flattened row-major, so the seed of ``z^A_mu`` is
``m + A * n + mu``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import hyperdual as hd
from .charts import SecondJet, SectionJet
from .errors import DomainViolation, UnsupportedDimension


def _always(z, zq):
    return True


@dataclass(frozen=True)
class LagrangianModel:
    """q-independent density L(z, z_q) with its domain predicate.

    ``density(z, zq)`` must accept float arrays as well as object arrays of
    hyper-dual numbers; ``zq`` has shape (m, n).  Extra model data (metric,
    potentials) lives in ``params`` for consumers such as the integrator.
    """

    name: str
    n: int
    m: int
    density: Callable[[Any, Any], Any]
    domain_ok: Callable[[Any, Any], bool] = _always
    params: dict = field(default_factory=dict, compare=False)

    @property
    def nseeds(self):
        return self.m + self.m * self.n

    def check_domain(self, z, zq):
        z = np.asarray(z, dtype=float)
        zq = np.reshape(np.asarray(zq, dtype=float), (self.m, self.n))
        if not self.domain_ok(z, zq):
            raise DomainViolation(f"{self.name}: density is not smooth at z={z.tolist()}, "
                                  f"zq={zq.tolist()}")
        return z, zq

    def __call__(self, z, zq):
        z, zq = self.check_domain(z, zq)
        return float(self.density(z, zq))

    def derivatives(self, z, zq):
        """(value, gradient, Hessian) over the seeds (z, zq)."""
        z, zq = self.check_domain(z, zq)
        m, n = self.m, self.n

        def f(x):
            return self.density(x[:m], x[m:].reshape(m, n))

        return hd.derivatives(f, np.concatenate([z, zq.ravel()]))


class JetDerivatives:
    """Gradient and Hessian of a density at a jet, sliced by jet role."""

    def __init__(self, model: LagrangianModel, j: SectionJet):
        m, n = model.m, model.n
        if (j.m, j.n) != (m, n):
            raise ValueError(f"{model.name} expects m={m}, n={n}; jet has m={j.m}, n={j.n}")
        self.value, g, H = model.derivatives(j.z, j.zq)
        self.dz = g[:m]                      # d_A L
        self.dzq = g[m:].reshape(m, n)       # d^mu_A L
        # d_B d^mu_A L  -> [A, mu, B]
        self.dzq_dz = H[m:, :m].reshape(m, n, m)
        # d^nu_B d^mu_A L -> [A, mu, B, nu]
        self.dzq_dzq = H[m:, m:].reshape(m, n, m, n)
        self.scale = max(1.0, abs(self.value), float(np.max(np.abs(g), initial=0.0)))

    def total_derivative_momenta(self, j: SecondJet):
        """d_mu (d^mu_A L) summed over mu, for a q-independent density."""
        return (np.einsum("amb,bm->a", self.dzq_dz, j.zq)
                + np.einsum("ambn,bmn->a", self.dzq_dzq, j.zqq))


def residual_scale(model: LagrangianModel, j: SectionJet) -> float:
    """max(1, |L|, max|dL|) at the jet, the yardstick for residual tolerances."""
    return JetDerivatives(model, j).scale


def euler_lagrange(model: LagrangianModel, j: SecondJet) -> np.ndarray:
    """E_A = d_A L - d_mu d^mu_A L."""
    d = JetDerivatives(model, j)
    return d.dz - d.total_derivative_momenta(j)


def noether_identity_residual(model: LagrangianModel, j: SecondJet) -> np.ndarray:
    """r_nu = z^A_nu E_A; vanishes identically for reparametrization-invariant L."""
    return j.zq.T @ euler_lagrange(model, j)


# -- vector fields -----------------------------------------------------------

@dataclass(frozen=True)
class FieldValues:
    base: np.ndarray          # u^mu
    base_dq: np.ndarray       # d_nu u^mu -> [mu, nu]
    base_dqq: np.ndarray      # d_nu d_lam u^mu -> [mu, nu, lam]
    fiber: np.ndarray         # u^A
    fiber_dq: np.ndarray      # d_mu u^A -> [A, mu]
    fiber_dz: np.ndarray      # d_B u^A -> [A, B]


@dataclass(frozen=True)
class VectorFieldOnZQ:
    """u = u^mu(q) d_mu + u^A(q, z) d_A on Q x Z.

    ``base(q)`` returns n components and ``fiber(q, z)`` returns m; both are
    written with generic arithmetic, and every derivative is taken by the
    hyper-dual engine.  ``None`` stands for an identically zero part.
    """

    n: int
    m: int
    base: Callable | None = None
    fiber: Callable | None = None
    name: str = "u"

    def evaluate(self, q, z) -> FieldValues:
        n, m = self.n, self.m
        q = np.atleast_1d(np.asarray(q, dtype=float))
        z = np.asarray(z, dtype=float)
        ub, dub, ddub = np.zeros(n), np.zeros((n, n)), np.zeros((n, n, n))
        if self.base is not None:
            for mu, comp in enumerate(self.base(hd.seed(q))):
                if isinstance(comp, hd.HyperDual):
                    ub[mu], dub[mu], ddub[mu] = comp.value, comp.grad, comp.hess
                else:
                    ub[mu] = float(comp)
        uf, dufq, dufz = np.zeros(m), np.zeros((m, n)), np.zeros((m, m))
        if self.fiber is not None:
            x = hd.seed(np.concatenate([q, z]))
            for a, comp in enumerate(self.fiber(x[:n], x[n:])):
                if isinstance(comp, hd.HyperDual):
                    uf[a] = comp.value
                    dufq[a], dufz[a] = comp.grad[:n], comp.grad[n:]
                else:
                    uf[a] = float(comp)
        return FieldValues(ub, dub, ddub, uf, dufq, dufz)

    def __add__(self, other: "VectorFieldOnZQ") -> "VectorFieldOnZQ":
        def add(f, g, *args):
            if f is None:
                return g(*args) if g is not None else None
            if g is None:
                return f(*args)
            return np.asarray(f(*args), dtype=object) + np.asarray(g(*args), dtype=object)

        base = None if self.base is None and other.base is None else (
            lambda q: add(self.base, other.base, q))
        fiber = None if self.fiber is None and other.fiber is None else (
            lambda q, z: add(self.fiber, other.fiber, q, z))
        return VectorFieldOnZQ(self.n, self.m, base, fiber, f"{self.name}+{other.name}")

    @classmethod
    def zero(cls, n, m):
        return cls(n, m, None, None, "zero")

    @classmethod
    def base_translation(cls, n, m, direction):
        d = np.asarray(direction, dtype=float)
        return cls(n, m, lambda q: d, None, "base-translation")

    @classmethod
    def fiber_translation(cls, n, m, direction):
        d = np.asarray(direction, dtype=float)
        return cls(n, m, None, lambda q, z: d, "fiber-translation")

    @classmethod
    def reparametrization(cls, n, m, base):
        """Field induced on Q x Z by a vector field u^mu(q) on Q."""
        return cls(n, m, base, None, "reparametrization")


def polynomial_field(n, m, rng, *, base_degree=2, fiber_degree=2, with_fiber=True,
                     with_base=True, scale=0.5, name="polynomial"):
    """Random vector field with polynomial components of bounded degree.

    Base components are polynomials in q; fiber components are polynomials
    in (q, z).  Coefficients are drawn from ``rng`` in [-scale, scale].
    """
    def coeffs(nout, nin, degree):
        c0 = rng.uniform(-scale, scale, nout)
        c1 = rng.uniform(-scale, scale, (nout, nin)) if degree >= 1 else np.zeros((nout, nin))
        c2 = (rng.uniform(-scale, scale, (nout, nin, nin)) if degree >= 2
              else np.zeros((nout, nin, nin)))
        return c0, c1, c2

    def poly(c, x):
        c0, c1, c2 = c
        x = np.asarray(x, dtype=object)
        return np.array([c0[i] + c1[i] @ x + x @ (c2[i] @ x) for i in range(len(c0))],
                        dtype=object)

    base = fiber = None
    if with_base:
        cb = coeffs(n, n, base_degree)
        base = lambda q: poly(cb, q)  # noqa: E731
    if with_fiber:
        cf = coeffs(m, n + m, fiber_degree)
        fiber = lambda q, z: poly(cf, np.concatenate(  # noqa: E731
            [np.asarray(q, dtype=object), np.asarray(z, dtype=object)]))
    return VectorFieldOnZQ(n, m, base, fiber, name)


@dataclass(frozen=True)
class Prolongation:
    base: np.ndarray            # u^mu
    fiber: np.ndarray           # u^A
    jet: np.ndarray             # u^A_mu = d_mu u^A - z^A_nu d_mu u^nu, [A, mu]
    vertical: np.ndarray        # u^A - u^nu z^A_nu
    vertical_jet: np.ndarray    # d_mu (u^A - u^nu z^A_nu), [A, mu]


def _total_fiber_derivative(fv: FieldValues, j: SectionJet):
    """d_mu u^A = d_mu u^A + z^B_mu d_B u^A for u^A(q, z); shape [A, mu]."""
    return fv.fiber_dq + fv.fiber_dz @ j.zq


def prolong(u: VectorFieldOnZQ, j: SecondJet, q=None) -> Prolongation:
    """Jet prolongation of u onto J^1 and its vertical part at ``j``."""
    q = j.q if q is None else np.atleast_1d(q)
    fv = u.evaluate(q, j.z)
    du_fiber = _total_fiber_derivative(fv, j)
    # u^mu depends on q only, so d_mu u^nu = partial derivative; [nu, mu]
    jet = du_fiber - j.zq @ fv.base_dq
    vertical = fv.fiber - j.zq @ fv.base
    vertical_jet = jet - np.einsum("anm,n->am", j.zqq, fv.base)
    return Prolongation(fv.base, fv.fiber, jet, vertical, vertical_jet)


def noether_current(model: LagrangianModel, u: VectorFieldOnZQ, j: SectionJet, q=None):
    """J^mu = d^mu_A L (u^A - u^nu z^A_nu) + u^mu L."""
    q = j.q if q is None else np.atleast_1d(q)
    d = JetDerivatives(model, j)
    fv = u.evaluate(q, j.z)
    vertical = fv.fiber - j.zq @ fv.base
    return d.dzq.T @ vertical + fv.base * d.value


def _current_divergence(d: JetDerivatives, fv: FieldValues, j: SecondJet):
    """d_mu J^mu expanded by the product rule (second derivatives from d)."""
    vertical = fv.fiber - j.zq @ fv.base
    dvertical = (_total_fiber_derivative(fv, j) - j.zq @ fv.base_dq
                 - np.einsum("anm,n->am", j.zqq, fv.base))
    d_momenta = d.total_derivative_momenta(j)
    dL = d.dz @ j.zq + np.einsum("an,anm->m", d.dzq, j.zqq)   # d_mu L, [mu]
    return (d_momenta @ vertical + np.sum(d.dzq * dvertical)
            + np.trace(fv.base_dq) * d.value + fv.base @ dL)


def first_variation_residual(model: LagrangianModel, u: VectorFieldOnZQ, j: SecondJet,
                             q=None) -> float:
    """|L_u L - (u^A - u^mu z^A_mu) E_A - d_mu J^mu| at a second jet.

    The Lie derivative of the density L omega includes the divergence of the
    base component: u^A d_A L + u^A_mu d^mu_A L + (d_mu u^mu) L.
    """
    q = j.q if q is None else np.atleast_1d(q)
    d = JetDerivatives(model, j)
    fv = u.evaluate(q, j.z)
    pro = prolong(u, j, q)
    lie = fv.fiber @ d.dz + np.sum(pro.jet * d.dzq) + np.trace(fv.base_dq) * d.value
    el = d.dz - d.total_derivative_momenta(j)
    rhs = pro.vertical @ el + _current_divergence(d, fv, j)
    return abs(lie - rhs)


# -- interaction terms -------------------------------------------------------

def interaction_term(field_value, zq):
    """Pull-back density of a one-form (n=1) or two-form (n=2) field value.

    For n = 1 ``field_value`` is the covector A_B and the result is
    -A_B z^B_tau.  For n = 2 it is the antisymmetric matrix F_AB and the
    result is 1/2 F_AB (z^A_1 z^B_2 - z^A_2 z^B_1).  Generic over the element
    type so it can sit inside a hyper-dual density.
    """
    n = zq.shape[1]
    if n == 1:
        return -(np.asarray(field_value, dtype=object) @ zq[:, 0])
    if n == 2:
        F = np.asarray(field_value, dtype=object)
        a, b = zq[:, 0], zq[:, 1]
        return 0.5 * (a @ (F @ b)) - 0.5 * (b @ (F @ a))
    raise UnsupportedDimension(f"interaction densities are implemented for n in (1, 2), got {n}")


def interaction_density(form, j: SectionJet) -> float:
    """Value of the interaction density for a field object at a section jet.

    ``form`` is either a callable z -> field value or an object with a
    ``value(z)`` method (see :mod:`subjet.models`).
    """
    if j.n > 2:
        raise UnsupportedDimension(f"interaction densities are implemented for n in (1, 2), got {j.n}")
    value = form.value(j.z) if hasattr(form, "value") else form(j.z)
    return float(hd.value_of(interaction_term(np.asarray(value, dtype=float), j.zq)))
