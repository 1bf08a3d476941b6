"""Polysymplectic Hamiltonian side: momenta p^mu_A over Q x Z.

Momenta are stored as n x m matrices (row mu, column A).  Hyper-dual seeds
for a Hamiltonian are ``z`` followed by ``p`` flattened row-major.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import hyperdual as hd
from .charts import SectionJet, _frozen
from .errors import DomainViolation
from .varcalc import JetDerivatives, LagrangianModel


@dataclass(frozen=True)
class PhasePoint:
    q: np.ndarray
    z: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _frozen(np.atleast_1d(self.q), 1))
        object.__setattr__(self, "z", _frozen(self.z, 1))
        p = np.reshape(np.asarray(self.p, dtype=float), (self.q.shape[0], self.z.shape[0]))
        object.__setattr__(self, "p", _frozen(p, 2))

    @property
    def n(self):
        return self.q.shape[0]

    @property
    def m(self):
        return self.z.shape[0]


@dataclass(frozen=True)
class PhaseSecondJet(PhasePoint):
    """Phase point with velocities z^A_mu (m x n) and divergences p^mu_{mu A} (m)."""

    zq: np.ndarray = None
    pdiv: np.ndarray = None

    def __post_init__(self):
        super().__post_init__()
        zq = np.zeros((self.m, self.n)) if self.zq is None else self.zq
        pdiv = np.zeros(self.m) if self.pdiv is None else self.pdiv
        object.__setattr__(self, "zq", _frozen(np.reshape(zq, (self.m, self.n)), 2))
        object.__setattr__(self, "pdiv", _frozen(pdiv, 1))


def _always(z, p):
    return True


@dataclass(frozen=True)
class HamiltonianModel:
    """q-independent Hamiltonian density H(z, p) with its domain predicate."""

    name: str
    n: int
    m: int
    density: Callable[[Any, Any], Any]
    domain_ok: Callable[[Any, Any], bool] = _always
    params: dict = field(default_factory=dict, compare=False)

    def check_domain(self, z, p):
        z = np.asarray(z, dtype=float)
        p = np.reshape(np.asarray(p, dtype=float), (self.n, self.m))
        if not self.domain_ok(z, p):
            raise DomainViolation(f"{self.name}: Hamiltonian is not smooth at p={p.tolist()}")
        return z, p

    def __call__(self, z, p):
        z, p = self.check_domain(z, p)
        return float(self.density(z, p))

    def derivatives(self, z, p):
        z, p = self.check_domain(z, p)
        m, n = self.m, self.n

        def f(x):
            return self.density(x[:m], x[m:].reshape(n, m))

        return hd.derivatives(f, np.concatenate([z, p.ravel()]))


class PhaseDerivatives:
    def __init__(self, H: HamiltonianModel, pp: PhasePoint):
        if (pp.n, pp.m) != (H.n, H.m):
            raise ValueError(f"{H.name} expects n={H.n}, m={H.m}; point has n={pp.n}, m={pp.m}")
        self.value, g, hess = H.derivatives(pp.z, pp.p)
        m, n = H.m, H.n
        self.dz = g[:m]                      # d_A H
        self.dp = g[m:].reshape(n, m)        # d^A_mu H, stored [mu, A]
        self.hess = hess
        self.scale = max(1.0, abs(self.value), float(np.max(np.abs(g), initial=0.0)))


def legendre(model: LagrangianModel, j: SectionJet) -> PhasePoint:
    """p^mu_A = d^mu_A L at the jet."""
    d = JetDerivatives(model, j)
    return PhasePoint(j.q, j.z, d.dzq.T)


def hamiltonian_map(H: HamiltonianModel, pp: PhasePoint) -> SectionJet:
    """z^A_mu = d^A_mu H at the phase point."""
    d = PhaseDerivatives(H, pp)
    return SectionJet(pp.q, pp.z, d.dp.T)


@dataclass(frozen=True)
class AssociationResiduals:
    r1: np.ndarray   # p^mu_A - d^mu_A L(z_hat), n x m
    r2: float        # p^mu_A d^A_mu H - H - L(z_hat)
    scale: float

    @property
    def max_abs(self):
        return max(float(np.max(np.abs(self.r1))), abs(self.r2))


def associated_hamiltonian_residuals(model: LagrangianModel, H: HamiltonianModel,
                                     pp: PhasePoint) -> AssociationResiduals:
    """Defects of the two relations tying a Hamiltonian to a Lagrangian.

    Residuals are reported, not raised on, so callers can test candidate
    pairs and off-shell points alike.  Raises DomainViolation only when the
    density cannot be evaluated.
    """
    dH = PhaseDerivatives(H, pp)
    zhat = SectionJet(pp.q, pp.z, dH.dp.T)
    dL = JetDerivatives(model, zhat)
    r1 = pp.p - dL.dzq.T
    r2 = float(np.sum(pp.p * dH.dp) - dH.value - dL.value)
    return AssociationResiduals(r1, r2, max(dH.scale, dL.scale))


@dataclass(frozen=True)
class HamiltonResiduals:
    eA_mu: np.ndarray   # z^A_mu - d^A_mu H, m x n
    eA: np.ndarray      # -p^mu_{mu A} - d_A H


def hamilton_residual(H: HamiltonianModel, pj: PhaseSecondJet) -> HamiltonResiduals:
    """Variational derivatives of L_H = p^mu_A z^A_mu - H at a phase second jet."""
    d = PhaseDerivatives(H, pj)
    return HamiltonResiduals(pj.zq - d.dp.T, -pj.pdiv - d.dz)


def hamiltonian_noether_residual(H: HamiltonianModel, pp: PhasePoint, n: int | None = None):
    """R^mu_nu = delta^mu_nu H - (n - 1) p^mu_A d^A_nu H.

    Zero for Hamiltonians compatible with reparametrizations of Q.  For
    n = 1 the matrix is just H, so only H = 0 passes.
    """
    n = H.n if n is None else n
    d = PhaseDerivatives(H, pp)
    return np.eye(n) * d.value - (n - 1) * (pp.p @ d.dp.T)


def hamiltonian_scale(H: HamiltonianModel, pp: PhasePoint) -> float:
    return PhaseDerivatives(H, pp).scale
