"""Residual campaigns over seeded random samples, and the report they produce."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import ConfigError, DomainViolation
from .models import build_hamiltonian, build_lagrangian
from .phase import (associated_hamiltonian_residuals, hamiltonian_noether_residual,
                    hamiltonian_scale, legendre)
from .sampling import (SamplingSpec, field_family, sample_phase_points,
                       sample_second_jets)
from .varcalc import (JetDerivatives, LagrangianModel, first_variation_residual,
                      noether_identity_residual)

# Default pass thresholds, relative to the per-sample scale max(1, |L|, max|dL|).
TOLERANCES = {
    "noether-identity": 1e-8,        # z^A_nu E_A = 0
    "first-variation": 1e-8,         # L_u L = (u^A - u^mu z^A_mu) E_A + d_mu J^mu
    "hamiltonian-noether": 1e-8,     # delta^mu_nu H = (n-1) p^mu_A d^A_nu H
    "associated-hamiltonian": 1e-8,  # p = dL(dH/dp), p dH/dp - H = L(dH/dp)
    "grad-audit": 1e-6,              # hyper-dual vs central differences, relative
}

IDENTITIES = {
    "noether-identity": "z^A_nu E_A = 0",
    "first-variation": "L_u L = (u^A - u^mu z^A_mu) E_A + d_mu J^mu",
    "hamiltonian-noether": "delta^mu_nu H = (n-1) p^mu_A d^A_nu H",
    "associated-hamiltonian": "p^mu_A = d^mu_A L(z_hat), p^mu_A d^A_mu H - H = L(z_hat)",
    "grad-audit": "hyper-dual derivatives = central finite differences",
}

CHECKS = tuple(TOLERANCES)

FD_STEP_GRAD = 1e-5
FD_STEP_HESS = 1e-4
# Central differences at these steps lose accuracy like h^2 / s^2 as a
# square-root radicand s approaches zero; the audit samples s >= this floor.
AUDIT_RADICAND_FLOOR = 0.25


@dataclass
class CheckRecord:
    name: str
    identity: str
    subject: str
    samples_attempted: int
    samples_accepted: int
    max_residual: float
    scale: float
    tolerance: float
    passed: bool


@dataclass
class Report:
    seed: int
    config_hash: str
    version: str = __version__
    checks: list = field(default_factory=list)
    timestamp: str = ""

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "version": self.version,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "timestamp": self.timestamp,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def table(self):
        rows = [f"{'check':<24}{'subject':<20}{'samples':>9}{'max residual':>14}"
                f"{'scale':>10}{'tol':>9}  result"]
        for c in self.checks:
            rows.append(f"{c.name:<24}{c.subject:<20}{c.samples_accepted:>9}"
                        f"{c.max_residual:>14.3e}{c.scale:>10.3g}{c.tolerance:>9.1e}  "
                        f"{'PASS' if c.passed else 'FAIL'}")
        rows.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(rows)


def config_hash(scenario: dict) -> str:
    """sha256 of the canonical scenario JSON; the output block does not count."""
    blob = json.dumps({k: v for k, v in scenario.items() if k != "output"},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _record(name, subject, attempted, residuals, scales, tol):
    """Summarise a campaign by its worst sample (largest residual / scale)."""
    if len(residuals) == 0:
        return CheckRecord(name, IDENTITIES[name], subject, attempted, 0, 0.0, 1.0, tol, True)
    residuals = np.asarray(residuals, dtype=float)
    scales = np.asarray(scales, dtype=float)
    ratio = residuals / scales
    k = int(np.argmax(ratio)) if np.all(np.isfinite(ratio)) else int(np.argmax(~np.isfinite(ratio)))
    worst, sc = float(residuals[k]), float(scales[k])
    return CheckRecord(name, IDENTITIES[name], subject, attempted, residuals.size,
                       worst, sc, tol, bool(np.isfinite(worst) and worst < tol * sc))


# -- individual campaigns ----------------------------------------------------

def run_noether_identity(model: LagrangianModel, rng, spec: SamplingSpec, tol):
    jets, attempts = sample_second_jets(model, rng, spec)
    res, scales = [], []
    for j in jets:
        res.append(float(np.max(np.abs(noether_identity_residual(model, j)))))
        scales.append(JetDerivatives(model, j).scale)
    return _record("noether-identity", model.name, attempts, res, scales, tol)


def run_first_variation(model: LagrangianModel, rng, spec: SamplingSpec, tol):
    fields = field_family(model.n, model.m, rng)
    jets, attempts = sample_second_jets(model, rng, spec)
    res, scales = [], []
    for j in jets:
        sc = JetDerivatives(model, j).scale
        for u in fields:
            res.append(first_variation_residual(model, u, j))
            scales.append(sc)
    return _record("first-variation", model.name, attempts * len(fields), res, scales, tol)


def run_hamiltonian_noether(H, rng, spec: SamplingSpec, tol):
    points, attempts = sample_phase_points(H, rng, spec)
    res, scales = [], []
    for pp in points:
        res.append(float(np.max(np.abs(hamiltonian_noether_residual(H, pp)))))
        scales.append(hamiltonian_scale(H, pp))
    return _record("hamiltonian-noether", H.name, attempts, res, scales, tol)


def run_associated(model: LagrangianModel, H, rng, spec: SamplingSpec, tol):
    """Residuals at Legendre images of random jets."""
    res, scales = [], []
    attempts = 0
    while len(res) < spec.count:
        batch = SamplingSpec(**{**asdict(spec), "count": 1})
        jets, a = sample_second_jets(model, rng, batch)
        attempts += a
        if attempts > spec.rejection_limit:
            break
        pp = legendre(model, jets[0])
        if not H.domain_ok(pp.z, pp.p):
            continue
        try:
            r = associated_hamiltonian_residuals(model, H, pp)
        except DomainViolation:
            continue
        res.append(r.max_abs)
        scales.append(r.scale)
    return _record("associated-hamiltonian", f"{model.name}/{H.name}", attempts, res, scales, tol)


def finite_difference_derivatives(fn, x, h1=FD_STEP_GRAD, h2=FD_STEP_HESS):
    """Central-difference gradient and Hessian of a scalar function of a flat vector."""
    x = np.asarray(x, dtype=float)
    k = x.size
    grad = np.empty(k)
    hess = np.empty((k, k))
    f0 = fn(x)
    eye = np.eye(k)
    for i in range(k):
        grad[i] = (fn(x + h1 * eye[i]) - fn(x - h1 * eye[i])) / (2 * h1)
        hess[i, i] = (fn(x + h2 * eye[i]) - 2 * f0 + fn(x - h2 * eye[i])) / h2 ** 2
        for jj in range(i):
            ei, ej = h2 * eye[i], h2 * eye[jj]
            val = (fn(x + ei + ej) - fn(x + ei - ej) - fn(x - ei + ej) + fn(x - ei - ej)) / (4 * h2 ** 2)
            hess[i, jj] = hess[jj, i] = val
    return f0, grad, hess


def derivative_audit_error(subject, z, second):
    """Relative disagreement between hyper-dual and finite-difference derivatives.

    ``second`` is zq (Lagrangians) or p (Hamiltonians).  Returns
    (first-derivative error, second-derivative error), each normalised by
    max(1, largest magnitude of the hyper-dual derivative array).
    """
    m = subject.m
    shape = np.shape(second)
    value, g, H = subject.derivatives(z, second)
    x = np.concatenate([np.asarray(z, dtype=float), np.asarray(second, dtype=float).ravel()])

    def f(xx):
        return float(subject.density(xx[:m], xx[m:].reshape(shape)))

    _, gfd, Hfd = finite_difference_derivatives(f, x)
    e1 = np.max(np.abs(g - gfd)) / max(1.0, np.max(np.abs(g)))
    e2 = np.max(np.abs(H - Hfd)) / max(1.0, np.max(np.abs(H)))
    return float(e1), float(e2)


def run_grad_audit(subject, rng, spec: SamplingSpec, tol):
    audit_spec = SamplingSpec(**{**asdict(spec), "margin": max(spec.margin, AUDIT_RADICAND_FLOOR)})
    if isinstance(subject, LagrangianModel):
        jets, attempts = sample_second_jets(subject, rng, audit_spec)
        points = [(j.z, j.zq) for j in jets]
    else:
        pps, attempts = sample_phase_points(subject, rng, audit_spec)
        points = [(pp.z, pp.p) for pp in pps]
    res = [max(derivative_audit_error(subject, z, s)) for z, s in points]
    return _record("grad-audit", subject.name, attempts, res, [1.0] * len(res), tol)


# -- scenario driver ---------------------------------------------------------

def sampling_from_scenario(scenario: dict) -> SamplingSpec:
    s = dict(scenario.get("sampling", {}))
    s.pop("seed", None)
    for key in ("z_range", "velocity_range", "accel_range", "q_range", "momentum_range"):
        if key in s:
            s[key] = tuple(s[key])
    return SamplingSpec(**s)


def run_checks(scenario: dict, *, timestamp: bool = True) -> Report:
    """Run every check listed in the scenario in declared order."""
    seed = int(scenario.get("sampling", {}).get("seed", 0))
    checks = list(scenario.get("checks", []))
    spec = sampling_from_scenario(scenario)
    overrides = scenario.get("tolerances", {})
    model_cfg = {k: scenario[k] for k in ("metric", "sign", "potential", "two_form")
                 if k in scenario}
    model = build_lagrangian(scenario["model"], model_cfg) if "model" in scenario else None
    hamiltonian = None
    if "hamiltonian" in scenario:
        hamiltonian = build_hamiltonian(scenario["hamiltonian"], model_cfg)

    report = Report(seed=seed, config_hash=config_hash(scenario))
    streams = np.random.SeedSequence(seed).spawn(len(checks))
    for name, ss in zip(checks, streams):
        if name not in TOLERANCES:
            raise ConfigError(f"unknown check {name!r}; choose from {list(CHECKS)}")
        tol = float(overrides.get(name, TOLERANCES[name]))
        rng = np.random.default_rng(ss)
        if name == "hamiltonian-noether":
            if hamiltonian is None:
                raise ConfigError("hamiltonian-noether needs a 'hamiltonian'")
            report.checks.append(run_hamiltonian_noether(hamiltonian, rng, spec, tol))
            continue
        if name == "grad-audit":
            subjects = [s for s in (model, hamiltonian) if s is not None]
            if not subjects:
                raise ConfigError("grad-audit needs a 'model' or a 'hamiltonian'")
            for s in subjects:
                report.checks.append(run_grad_audit(s, rng, spec, tol))
            continue
        if model is None:
            raise ConfigError(f"{name} needs a Lagrangian 'model'")
        if name == "noether-identity":
            report.checks.append(run_noether_identity(model, rng, spec, tol))
        elif name == "first-variation":
            report.checks.append(run_first_variation(model, rng, spec, tol))
        elif name == "associated-hamiltonian":
            if hamiltonian is None:
                raise ConfigError("associated-hamiltonian needs a 'hamiltonian'")
            report.checks.append(run_associated(model, hamiltonian, rng, spec, tol))
    if timestamp:
        report.timestamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return report
