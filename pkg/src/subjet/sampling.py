"""Seeded random jets and phase points for residual campaigns."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import SecondJet, SectionJet
from .errors import SamplingExhausted
from .phase import HamiltonianModel, PhasePoint
from .varcalc import LagrangianModel, VectorFieldOnZQ, polynomial_field


@dataclass(frozen=True)
class SamplingSpec:
    count: int = 100
    z_range: tuple = (-1.0, 1.0)
    velocity_range: tuple = (-1.0, 1.0)
    accel_range: tuple = (-1.0, 1.0)
    q_range: tuple = (-1.0, 1.0)
    momentum_range: tuple = (-1.0, 1.0)
    rejection_limit: int = 100_000
    # square-root densities: reject points whose radicand is below this floor
    margin: float = 0.0


def _symmetric(a):
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def random_second_jet(rng, n, m, spec: SamplingSpec = SamplingSpec()) -> SecondJet:
    q = rng.uniform(*spec.q_range, n)
    z = rng.uniform(*spec.z_range, m)
    zq = rng.uniform(*spec.velocity_range, (m, n))
    zqq = _symmetric(rng.uniform(*spec.accel_range, (m, n, n)))
    return SecondJet(q, z, zq, zqq)


def _inside(model, z, zq_or_p, margin):
    if not model.domain_ok(z, zq_or_p):
        return False
    radicand = model.params.get("radicand")
    if margin <= 0 or radicand is None:
        return True
    return float(radicand(z, zq_or_p)) >= margin


def sample_second_jets(model: LagrangianModel, rng, spec: SamplingSpec = SamplingSpec()):
    """``spec.count`` second jets inside the model's domain.

    Returns (jets, attempts).  Raises SamplingExhausted past the rejection limit.
    """
    jets, attempts = [], 0
    while len(jets) < spec.count:
        if attempts >= spec.rejection_limit:
            raise SamplingExhausted(f"{model.name}: {len(jets)}/{spec.count} samples after "
                                    f"{attempts} draws")
        attempts += 1
        j = random_second_jet(rng, model.n, model.m, spec)
        if _inside(model, j.z, j.zq, spec.margin):
            jets.append(j)
    return jets, attempts


def sample_phase_points(H: HamiltonianModel, rng, spec: SamplingSpec = SamplingSpec()):
    points, attempts = [], 0
    while len(points) < spec.count:
        if attempts >= spec.rejection_limit:
            raise SamplingExhausted(f"{H.name}: {len(points)}/{spec.count} samples after "
                                    f"{attempts} draws")
        attempts += 1
        pp = PhasePoint(rng.uniform(*spec.q_range, H.n), rng.uniform(*spec.z_range, H.m),
                        rng.uniform(*spec.momentum_range, (H.n, H.m)))
        if _inside(H, pp.z, pp.p, spec.margin):
            points.append(pp)
    return points, attempts


def sample_section_jets(model: LagrangianModel, rng, spec: SamplingSpec = SamplingSpec()):
    jets, attempts = sample_second_jets(model, rng, spec)
    return [j.first for j in jets], attempts


def field_family(n, m, rng) -> list[VectorFieldOnZQ]:
    """Five polynomial vector fields covering the qualitatively distinct cases.

    Constant base translation, linear and quadratic reparametrizations of
    Q, a fiber-only field, and a general mixed field.
    """
    return [
        VectorFieldOnZQ.base_translation(n, m, rng.uniform(-1, 1, n)),
        polynomial_field(n, m, rng, base_degree=1, with_fiber=False, name="linear-reparam"),
        polynomial_field(n, m, rng, base_degree=2, with_fiber=False, name="quadratic-reparam"),
        polynomial_field(n, m, rng, with_base=False, name="fiber-polynomial"),
        polynomial_field(n, m, rng, name="mixed-polynomial"),
    ]
