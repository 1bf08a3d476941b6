import numpy as np
import pytest

from subjet.charts import (SecondJet, SectionJet, SplitChart, SubmanifoldJet, affine,
                           identity_transition, inverse_relation_residual, is_regular, lift,
                           lift_relation_residual, lorentz_boost, permutation, project,
                           quadratic, regular_chart, transform_section_jet,
                           transform_submanifold_jet)
from subjet.errors import NotRegularInChart, SingularJacobian, SingularM

LN2 = np.log(2.0)


def three_velocity(u, z=None):
    z = np.zeros(4) if z is None else z
    return SubmanifoldJet(SplitChart.leading(4, 1), z[:1], z[1:], np.reshape(u, (3, 1)))


def random_submanifold_jet(rng, m, n, base=None):
    chart = SplitChart(m, n, tuple(range(n)) if base is None else base)
    return SubmanifoldJet(chart, rng.uniform(-1, 1, n), rng.uniform(-1, 1, m - n),
                          rng.uniform(-0.5, 0.5, (m - n, n)))


def near_identity_quadratic(rng, m, n, with_q=True):
    A = np.eye(m) + 0.2 * rng.uniform(-1, 1, (m, m))
    c = 0.05 * rng.uniform(-1, 1, (m, m, m))
    kw = {}
    if with_q:
        kw = dict(q_matrix=np.eye(n) + 0.2 * rng.uniform(-1, 1, (n, n)),
                  q_coeffs=0.05 * rng.uniform(-1, 1, (n, n, n)))
    return quadratic(A, rng.uniform(-1, 1, m), c, **kw)


# -- submanifold jets --------------------------------------------------------

def test_identity_leaves_jet_unchanged(rng):
    j = random_submanifold_jet(rng, 5, 2)
    out = transform_submanifold_jet(j, identity_transition())
    np.testing.assert_array_equal(out.yx, j.yx)
    np.testing.assert_array_equal(out.z, j.z)


def test_boost_ln2_of_rest_frame():
    out = transform_submanifold_jet(three_velocity([0, 0, 0]), lorentz_boost(LN2))
    np.testing.assert_allclose(out.yx[:, 0], [-0.6, 0.0, 0.0], atol=1e-15)


def test_boost_velocity_addition(rng):
    for _ in range(20):
        a1, a2 = rng.uniform(-1.5, 1.5, 2)
        u = rng.uniform(-0.5, 0.5, 3)
        j = three_velocity(u, rng.uniform(-1, 1, 4))
        twice = transform_submanifold_jet(transform_submanifold_jet(j, lorentz_boost(a1)),
                                          lorentz_boost(a2))
        once = transform_submanifold_jet(j, lorentz_boost(a1 + a2))
        np.testing.assert_allclose(twice.yx, once.yx, rtol=0, atol=1e-12)
        # relativistic addition along the boost axis (collinear case)
    j = three_velocity([0.5, 0, 0])
    out = transform_submanifold_jet(j, lorentz_boost(-np.arctanh(0.5)))
    assert out.yx[0, 0] == pytest.approx((0.5 + 0.5) / (1 + 0.25), abs=1e-14)


def test_cocycle_for_polynomial_transitions(rng):
    for _ in range(30):
        j = random_submanifold_jet(rng, 4, 2)
        t1 = near_identity_quadratic(rng, 4, 2, with_q=False)
        t2 = near_identity_quadratic(rng, 4, 2, with_q=False)
        stepwise = transform_submanifold_jet(transform_submanifold_jet(j, t1), t2)
        direct = transform_submanifold_jet(j, t1.then(t2))
        scale = max(1.0, np.max(np.abs(direct.yx)))
        assert np.max(np.abs(stepwise.yx - direct.yx)) < 1e-10 * scale
        np.testing.assert_allclose(stepwise.z, direct.z, atol=1e-12)


def test_chart_change_round_trip(rng):
    j = random_submanifold_jet(rng, 4, 1)
    t = permutation([1, 0, 2, 3])
    target = SplitChart(4, 1, (0,))
    jp = transform_submanifold_jet(j, t, target)
    assert inverse_relation_residual(j, jp, t) < 1e-12
    back = transform_submanifold_jet(jp, t, j.chart)
    np.testing.assert_allclose(back.yx, j.yx, atol=1e-12)


def test_singular_m_names_chart():
    # tangent along z^1 only: a chart with base z^0 cannot see it after the swap
    chart = SplitChart(3, 1, (1,))
    j = SubmanifoldJet(chart, [0.0], [0.0, 0.0], [[0.0], [0.0]])
    with pytest.raises(SingularM, match="SplitChart"):
        transform_submanifold_jet(j, identity_transition(), SplitChart(3, 1, (0,)))


# -- section jets ------------------------------------------------------------

def test_section_identity(rng):
    j = SectionJet(rng.uniform(size=2), rng.uniform(size=4), rng.uniform(size=(4, 2)))
    out = transform_section_jet(j, identity_transition())
    np.testing.assert_array_equal(out.zq, j.zq)


def test_section_boost_column():
    j = SectionJet([0.0], np.zeros(4), [[1.0], [0.0], [0.0], [0.0]])
    out = transform_section_jet(j, lorentz_boost(LN2))
    np.testing.assert_allclose(out.zq[:, 0], [1.25, -0.75, 0, 0], atol=1e-15)


def test_section_transform_preserves_rank(rng):
    for k in range(100):
        rank = 1 + k % 2
        cols = rng.uniform(-1, 1, (5, rank))
        zq = cols @ rng.uniform(-1, 1, (rank, 2))
        j = SectionJet(rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 5), zq)
        out = transform_section_jet(j, near_identity_quadratic(rng, 5, 2))
        assert np.linalg.matrix_rank(out.zq, tol=1e-9) == np.linalg.matrix_rank(zq, tol=1e-9)
        assert is_regular(out) == is_regular(j)


def test_singular_jacobian_raises():
    t = affine(np.diag([1.0, 0.0, 1.0]))
    with pytest.raises(SingularJacobian):
        transform_section_jet(SectionJet([0.0], np.zeros(3), np.ones((3, 1))), t)


def test_lift_relation_survives_transitions(rng):
    for _ in range(30):
        sj = random_submanifold_jet(rng, 4, 2)
        j = lift(sj, np.eye(2) + 0.3 * rng.uniform(-1, 1, (2, 2)))
        assert lift_relation_residual(sj, j) < 1e-14
        t = near_identity_quadratic(rng, 4, 2)
        assert lift_relation_residual(transform_submanifold_jet(sj, t),
                                      transform_section_jet(j, t)) < 1e-10


# -- lift / project ----------------------------------------------------------

def test_lift_identity_and_example():
    sj = three_velocity([0.6, 0, 0])
    np.testing.assert_allclose(lift(sj).zq[:, 0], [1.0, 0.6, 0, 0])
    j = lift(sj, [[1.25]])
    np.testing.assert_allclose(j.zq[:2, 0], [1.25, 0.75])


def test_project_four_velocity():
    j = SectionJet([0.0], np.zeros(4), [[1.25], [0.75], [0.0], [0.0]])
    out = project(j, SplitChart.leading(4, 1))
    np.testing.assert_allclose(out.yx[:, 0], [0.6, 0, 0], atol=1e-15)


def test_project_identity_block(rng):
    zq = np.vstack([np.eye(2), rng.uniform(size=(3, 2))])
    out = project(SectionJet(np.zeros(2), np.zeros(5), zq), SplitChart.leading(5, 2))
    np.testing.assert_array_equal(out.yx, zq[2:])


def test_project_lift_round_trip(rng):
    for _ in range(100):
        m, n = 5, 2
        sj = random_submanifold_jet(rng, m, n, tuple(sorted(rng.choice(m, n, replace=False))))
        xq = rng.uniform(-1, 1, (n, n)) + 2 * np.eye(n)
        back = project(lift(sj, xq), sj.chart)
        assert np.max(np.abs(back.yx - sj.yx)) < 1e-12
        np.testing.assert_array_equal(back.z, sj.z)


def test_project_right_gl_invariance(rng):
    for _ in range(100):
        j = SectionJet(np.zeros(2), rng.uniform(size=4), rng.uniform(-1, 1, (4, 2)))
        M = rng.uniform(-1, 1, (2, 2))
        if abs(np.linalg.det(M)) < 0.1:
            continue
        chart = regular_chart(j)
        a = project(j, chart)
        b = project(SectionJet(j.q, j.z, j.zq @ M), chart)
        assert np.max(np.abs(a.yx - b.yx)) < 1e-10 * max(1.0, np.max(np.abs(a.yx)))


def test_project_rank_deficient_names_chart():
    j = SectionJet([0.0], [0.0, 0.0], [[0.0], [0.0]])
    with pytest.raises(NotRegularInChart, match=r"SplitChart\(m=2, n=1, base=\[0\]\)"):
        project(j, SplitChart.leading(2, 1))


def test_project_other_chart_when_leading_fails():
    j = SectionJet([0.0], np.zeros(3), [[0.0], [1.0], [2.0]])
    with pytest.raises(NotRegularInChart):
        project(j, SplitChart.leading(3, 1))
    assert regular_chart(j).base != (0,)
    out = project(j, regular_chart(j))
    assert lift_relation_residual(out, j) < 1e-15


def test_is_regular_cases():
    assert is_regular(SectionJet(np.zeros(2), np.zeros(4), np.eye(4)[:, :2]))
    assert not is_regular(SectionJet(np.zeros(2), np.zeros(4), np.zeros((4, 2))))
    col = np.array([1.0, 2.0, 3.0, 4.0])
    assert not is_regular(SectionJet(np.zeros(2), np.zeros(4), np.column_stack([col, -3 * col])))


# -- value types -------------------------------------------------------------

def test_jets_are_immutable():
    j = SectionJet([0.0], np.zeros(2), [[1.0], [0.0]])
    with pytest.raises(ValueError):
        j.zq[0, 0] = 2.0


def test_second_jet_symmetry():
    zqq = np.zeros((3, 2, 2))
    zqq[0, 0, 1] = 1.0
    with pytest.raises(ValueError, match="symmetric"):
        SecondJet(np.zeros(2), np.zeros(3), np.ones((3, 2)), zqq)
    zqq[0, 1, 0] = 1.0
    j = SecondJet(np.zeros(2), np.zeros(3), np.ones((3, 2)), zqq)
    assert np.array_equal(j.zqq, j.zqq.transpose(0, 2, 1))


def test_bad_charts_rejected():
    with pytest.raises(ValueError):
        SplitChart(3, 1, (3,))
    with pytest.raises(ValueError):
        SplitChart(3, 2, (0, 0))
    with pytest.raises(ValueError):
        permutation([0, 0, 1])
