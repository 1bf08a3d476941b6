import numpy as np
import pytest

from subjet.charts import lorentz_boost
from subjet.errors import ConfigError, DomainViolation
from subjet.models import (ConstantMetric, build_hamiltonian, build_lagrangian,
                           config_from_dict)
from subjet.phase import PhaseDerivatives, PhasePoint


def col(*v):
    return np.reshape(np.asarray(v, dtype=float), (-1, 1))


def test_free_particle_values(free):
    assert free(np.zeros(4), col(1, 0, 0, 0)) == 1.0
    assert free(np.zeros(4), col(1.25, 0.75, 0, 0)) == pytest.approx(1.0, abs=1e-15)


def test_free_particle_spacelike(free):
    with pytest.raises(DomainViolation):
        free(np.zeros(4), col(0.5, 1, 0, 0))


def test_nambu_goto_values(nambu_goto):
    assert nambu_goto(np.zeros(3), np.eye(3)[:, :2]) == 1.0
    assert nambu_goto(np.zeros(3), [[2, 0], [0, 3], [0, 0]]) == pytest.approx(6.0)
    with pytest.raises(DomainViolation):
        nambu_goto(np.zeros(3), [[1, 2], [1, 2], [0, 0]])


def test_nambu_goto_lorentzian_sign():
    model = build_lagrangian("nambu-goto", {"metric": {"diag": [1, -1, -1]}, "sign": -1})
    # timelike worldsheet: one timelike and one spacelike tangent
    assert model(np.zeros(3), [[1, 0], [0, 1], [0, 0]]) == pytest.approx(1.0)
    assert not model.domain_ok(np.zeros(3), np.array([[1.0, 0], [0, 0], [0, 0.0]]))


def test_string_hamiltonian_values(string_h):
    assert string_h(np.zeros(3), [[1, 0, 0], [0, 1, 0]]) == 1.0
    with pytest.raises(DomainViolation):
        string_h(np.zeros(3), np.zeros((2, 3)))


def test_lorentz_invariance(rng, free):
    for _ in range(50):
        v = np.array([2.0, *rng.uniform(-1, 1, 3)])
        boost = lorentz_boost(rng.uniform(-2, 2), axis=int(rng.integers(1, 4)))
        _, jac = boost.z_jacobian(np.zeros(4))
        assert free(np.zeros(4), (jac @ v).reshape(4, 1)) == pytest.approx(
            free(np.zeros(4), v.reshape(4, 1)), abs=1e-12)


def test_nambu_goto_right_gl_covariance(rng, nambu_goto):
    for _ in range(50):
        zq = rng.uniform(-1, 1, (3, 2))
        M = rng.uniform(-1, 1, (2, 2))
        if not nambu_goto.domain_ok(None, zq) or abs(np.linalg.det(M)) < 1e-3:
            continue
        assert nambu_goto(np.zeros(3), zq @ M) == pytest.approx(
            abs(np.linalg.det(M)) * nambu_goto(np.zeros(3), zq), rel=1e-12)


def test_hamiltonian_homogeneity(rng, string_h):
    for _ in range(50):
        p = rng.uniform(-1, 1, (2, 3))
        lam = rng.uniform(0.1, 3)
        if not string_h.domain_ok(None, p):
            continue
        assert string_h(np.zeros(3), lam * p) == pytest.approx(lam ** 2 * string_h(np.zeros(3), p),
                                                               rel=1e-12)
        d = PhaseDerivatives(string_h, PhasePoint(np.zeros(2), np.zeros(3), p))
        assert np.sum(p * d.dp) == pytest.approx(2 * d.value, rel=1e-12)


def test_metric_validation():
    with pytest.raises(ValueError):
        ConstantMetric(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        ConstantMetric(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        ConstantMetric(np.eye(2), 2 * np.eye(2))
    m = ConstantMetric.minkowski()
    np.testing.assert_array_equal(m.g @ m.g_inv, np.eye(4))


def test_config_parsing():
    cfg = config_from_dict("nambu-goto", {"metric": {"diag": [1, 1, 1, 1]}, "sign": 1})
    assert cfg.metric.m == 4 and cfg.sign == 1
    with pytest.raises(ConfigError):
        build_lagrangian("no-such-model")
    with pytest.raises(ConfigError):
        build_hamiltonian("nambu-goto")
    with pytest.raises(ConfigError):
        config_from_dict("free-particle", {"metric": {}})
    with pytest.raises(ValueError):
        config_from_dict("nambu-goto", {"sign": 3})


def test_registry_names():
    for name in ("free-particle", "charged-particle", "nambu-goto", "quadratic-control"):
        assert build_lagrangian(name).name == name
    assert build_hamiltonian("string-hamiltonian").name == "string-hamiltonian"


def test_field_strength_of_magnetic_gauge(charged):
    F = charged.params["potential"].field_strength(np.zeros(4))
    assert F[1, 2] == pytest.approx(1.3) and F[2, 1] == pytest.approx(-1.3)
    assert np.count_nonzero(F) == 2
