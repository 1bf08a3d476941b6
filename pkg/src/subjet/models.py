"""Built-in Lagrangians and Hamiltonians over a constant target metric."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import hyperdual as hd
from .errors import ConfigError, UnsupportedDimension
from .varcalc import LagrangianModel, interaction_term


@dataclass(frozen=True)
class ConstantMetric:
    g: np.ndarray
    g_inv: np.ndarray = field(default=None)

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"metric must be a square matrix, got shape {g.shape}")
        if not np.array_equal(g, g.T):
            raise ValueError("metric must be symmetric")
        if abs(np.linalg.det(g)) < 1e-12:
            raise ValueError("metric is degenerate")
        g_inv = np.linalg.inv(g) if self.g_inv is None else np.array(self.g_inv, dtype=float)
        if np.max(np.abs(g @ g_inv - np.eye(g.shape[0]))) > 1e-12:
            raise ValueError("g_inv is not the inverse of g to 1e-12")
        g.setflags(write=False)
        g_inv.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "g_inv", g_inv)

    @classmethod
    def diagonal(cls, diag):
        d = np.asarray(diag, dtype=float)
        return cls(np.diag(d), np.diag(1.0 / d))

    @classmethod
    def minkowski(cls, m=4):
        return cls.diagonal([1.0] + [-1.0] * (m - 1))

    @classmethod
    def euclidean(cls, m=3):
        return cls.diagonal(np.ones(m))

    @property
    def m(self):
        return self.g.shape[0]

    def gram(self, cols, inverse=False):
        """Matrix of inner products between columns: cols^T g cols."""
        g = self.g_inv if inverse else self.g
        cols = np.asarray(cols)
        return cols.T @ (g @ cols)

    def inner(self, u, v):
        return np.asarray(u) @ (self.g @ np.asarray(v))


# -- external fields ---------------------------------------------------------

@dataclass(frozen=True)
class OneForm:
    """Covector field A_B(z) with its analytic Jacobian jac[B, C] = d_C A_B."""

    value: Callable
    jacobian: Callable
    uniform_curl: bool = False   # field strength independent of z

    def field_strength(self, z):
        """F_CB = d_C A_B - d_B A_C."""
        J = np.asarray(self.jacobian(np.asarray(z, dtype=float)), dtype=float)
        return J.T - J


def linear_one_form(offset, matrix=None):
    """A_B(z) = a_B + K_BC z^C; constant offsets are pure gauge."""
    a = np.asarray(offset, dtype=float)
    K = np.zeros((a.size, a.size)) if matrix is None else np.asarray(matrix, dtype=float)
    return OneForm(lambda z: a + K @ np.asarray(z, dtype=object), lambda z: K, True)


def magnetic_gauge(B, m=4, plane=(1, 2)):
    """Potential A_j = B z^i for plane (i, j): uniform F_ij = B."""
    i, j = plane
    K = np.zeros((m, m))
    K[j, i] = B
    return linear_one_form(np.zeros(m), K)


@dataclass(frozen=True)
class TwoForm:
    """Antisymmetric field F_AB(z); ``value`` must be generic over the element type."""

    value: Callable


def constant_two_form(F):
    F = np.asarray(F, dtype=float)
    if not np.array_equal(F, -F.T):
        raise ValueError("two-form matrix must be antisymmetric")
    return TwoForm(lambda z: F)


def linear_two_form(C, D):
    """F_AB(z) = C_AB + D_ABK z^K, both antisymmetric in (A, B)."""
    C = np.asarray(C, dtype=float)
    D = np.asarray(D, dtype=float)
    if not (np.array_equal(C, -C.T) and np.array_equal(D, -D.transpose(1, 0, 2))):
        raise ValueError("two-form coefficients must be antisymmetric")
    return TwoForm(lambda z: C + D @ np.asarray(z, dtype=object))


@dataclass(frozen=True)
class ModelConfig:
    metric: ConstantMetric
    sign: int = 1
    potential: Optional[OneForm] = None
    two_form: Optional[TwoForm] = None

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign convention must be +1 or -1, got {self.sign}")


# -- Lagrangians -------------------------------------------------------------

def _particle_norm(metric):
    g = metric.g

    def norm2(zq):
        v = zq[:, 0]
        return v @ (g @ v)

    return norm2


def free_particle_lagrangian(cfg: ModelConfig) -> LagrangianModel:
    """L = (g_AB z^A_tau z^B_tau)^(1/2), smooth on the open timelike cone."""
    norm2 = _particle_norm(cfg.metric)

    def density(z, zq):
        return hd.sqrt(norm2(zq))

    return LagrangianModel("free-particle", 1, cfg.metric.m, density,
                           lambda z, zq: norm2(zq) > 0,
                           {"metric": cfg.metric, "potential": None,
                            "radicand": lambda z, zq: norm2(zq)})


def charged_particle_lagrangian(cfg: ModelConfig) -> LagrangianModel:
    """Free particle plus the minimal coupling -A_B(z) z^B_tau."""
    if cfg.potential is None:
        raise ConfigError("charged-particle needs a potential")
    norm2 = _particle_norm(cfg.metric)
    A = cfg.potential

    def density(z, zq):
        return hd.sqrt(norm2(zq)) + interaction_term(A.value(z), zq)

    return LagrangianModel("charged-particle", 1, cfg.metric.m, density,
                           lambda z, zq: norm2(zq) > 0,
                           {"metric": cfg.metric, "potential": A,
                            "radicand": lambda z, zq: norm2(zq)})


def nambu_goto_lagrangian(cfg: ModelConfig, n: int = 2) -> LagrangianModel:
    """L = (s det h)^(1/2) with h_{mu nu} = g_AB z^A_mu z^B_nu.

    A two-form in ``cfg`` adds its pull-back density (n = 2 only).
    """
    metric, s = cfg.metric, cfg.sign
    F = cfg.two_form
    if F is not None and n != 2:
        raise UnsupportedDimension("two-form coupling needs n = 2")

    def area2(zq):
        return s * hd.det(metric.gram(zq))

    def density(z, zq):
        out = hd.sqrt(area2(zq))
        if F is not None:
            out = out + interaction_term(F.value(z), zq)
        return out

    return LagrangianModel("nambu-goto", n, metric.m, density,
                           lambda z, zq: area2(zq) > 0,
                           {"metric": metric, "sign": s, "two_form": F,
                            "radicand": lambda z, zq: area2(zq)})


def quadratic_control_lagrangian(cfg: ModelConfig) -> LagrangianModel:
    """L = 1/2 g_AB z^A_tau z^B_tau: not reparametrization invariant."""
    norm2 = _particle_norm(cfg.metric)
    return LagrangianModel("quadratic-control", 1, cfg.metric.m,
                           lambda z, zq: 0.5 * norm2(zq), params={"metric": cfg.metric})


# -- Hamiltonians ------------------------------------------------------------

def _always(z, p):
    return True


def string_hamiltonian(cfg: ModelConfig, n: int = 2):
    """H = (s det H)^(1/2), H^{mu nu} = g^AB p^mu_A p^nu_B; momenta are n x m."""
    from .phase import HamiltonianModel

    metric, s = cfg.metric, cfg.sign

    def area2(p):
        return s * hd.det(metric.gram(np.asarray(p).T, inverse=True))

    return HamiltonianModel("string-hamiltonian", n, metric.m,
                            lambda z, p: hd.sqrt(area2(p)),
                            lambda z, p: area2(p) > 0,
                            {"metric": metric, "sign": s,
                             "radicand": lambda z, p: area2(p)})


def trace_hamiltonian(cfg: ModelConfig, n: int = 2):
    """Control Hamiltonian tr H = g^AB p^mu_A p^mu_B (degree 2, not a density)."""
    from .phase import HamiltonianModel

    metric = cfg.metric

    def density(z, p):
        G = metric.gram(np.asarray(p).T, inverse=True)
        return sum(G[i, i] for i in range(n))

    return HamiltonianModel("trace-control", n, metric.m, density, _always,
                            {"metric": metric})


# -- registry ----------------------------------------------------------------

LAGRANGIANS = {
    "free-particle": free_particle_lagrangian,
    "charged-particle": charged_particle_lagrangian,
    "nambu-goto": nambu_goto_lagrangian,
    "quadratic-control": quadratic_control_lagrangian,
}

HAMILTONIANS = {
    "string-hamiltonian": string_hamiltonian,
    "trace-control": trace_hamiltonian,
}

# metric used when a configuration leaves it out
DEFAULT_METRICS = {
    "free-particle": [1.0, -1.0, -1.0, -1.0],
    "charged-particle": [1.0, -1.0, -1.0, -1.0],
    "quadratic-control": [1.0, -1.0, -1.0, -1.0],
    "nambu-goto": [1.0, 1.0, 1.0],
    "string-hamiltonian": [1.0, 1.0, 1.0],
    "trace-control": [1.0, 1.0, 1.0],
}


def metric_from_config(spec, default=None) -> ConstantMetric:
    if spec is None:
        if default is None:
            raise ConfigError("no metric given")
        return ConstantMetric.diagonal(default)
    if "diag" in spec:
        return ConstantMetric.diagonal(spec["diag"])
    if "matrix" in spec:
        try:
            return ConstantMetric(spec["matrix"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    raise ConfigError("metric needs 'diag' or 'matrix'")


def potential_from_config(spec, m) -> Optional[OneForm]:
    if spec is None:
        return None
    kind = spec.get("kind", "linear")
    if kind == "magnetic":
        return magnetic_gauge(spec["B"], m, tuple(spec.get("plane", (1, 2))))
    if kind == "linear":
        return linear_one_form(spec.get("offset", np.zeros(m)), spec.get("matrix"))
    raise ConfigError(f"unknown potential kind {kind!r}")


def two_form_from_config(spec) -> Optional[TwoForm]:
    if spec is None:
        return None
    if "linear" in spec:
        return linear_two_form(spec["constant"], spec["linear"])
    return constant_two_form(spec["constant"])


def config_from_dict(name, cfg: dict) -> ModelConfig:
    metric = metric_from_config(cfg.get("metric"), DEFAULT_METRICS.get(name))
    potential = potential_from_config(cfg.get("potential"), metric.m)
    if name == "charged-particle" and potential is None:
        potential = magnetic_gauge(1.0, metric.m)
    return ModelConfig(metric, int(cfg.get("sign", 1)), potential,
                       two_form_from_config(cfg.get("two_form")))


def build_lagrangian(name, cfg: dict | None = None) -> LagrangianModel:
    if name not in LAGRANGIANS:
        raise ConfigError(f"unknown Lagrangian {name!r}; choose from {sorted(LAGRANGIANS)}")
    return LAGRANGIANS[name](config_from_dict(name, cfg or {}))


def build_hamiltonian(name, cfg: dict | None = None):
    if name not in HAMILTONIANS:
        raise ConfigError(f"unknown Hamiltonian {name!r}; choose from {sorted(HAMILTONIANS)}")
    return HAMILTONIANS[name](config_from_dict(name, cfg or {}))
