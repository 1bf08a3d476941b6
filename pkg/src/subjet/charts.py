"""Split charts, transition maps and first-order jet coordinates.

A point of Z carries coordinates ``z`` (an m-vector).  A :class:`SplitChart`
declares which n of them play the role of base coordinates ``x`` for jets of
n-dimensional submanifolds; the remaining m - n are the fiber coordinates
``y``.  Jets of sections of ``Q x Z -> Q`` carry the full velocity matrix
``zq`` (m x n), so the same section jet can be projected through any split
chart.

Indices are zero-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import hyperdual as hd
from .errors import NotRegularInChart, SingularJacobian, SingularM

#: smallest singular value <= RANK_TOL * largest counts as singular
RANK_TOL = 1e-9


def _frozen(a, ndim=None):
    arr = np.array(a, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("jet coordinates must be finite")
    arr.setflags(write=False)
    return arr


def _singular(mat, tol=RANK_TOL):
    s = np.linalg.svd(np.atleast_2d(mat), compute_uv=False)
    return s.size == 0 or s[-1] <= tol * max(s[0], np.finfo(float).tiny)


@dataclass(frozen=True)
class SplitChart:
    """Partition of the m coordinates of Z into n base and m - n fiber ones."""

    m: int
    n: int
    base: tuple[int, ...]

    def __post_init__(self):
        base = tuple(int(i) for i in self.base)
        object.__setattr__(self, "base", base)
        if not 0 < self.n < self.m:
            raise ValueError(f"need 0 < n < m, got n={self.n}, m={self.m}")
        if len(base) != self.n or len(set(base)) != self.n:
            raise ValueError(f"base indices {base} must be {self.n} distinct entries")
        if any(i < 0 or i >= self.m for i in base):
            raise ValueError(f"base indices {base} out of range for m={self.m}")

    @classmethod
    def leading(cls, m, n):
        """Chart whose base coordinates are the first n ones."""
        return cls(m, n, tuple(range(n)))

    @property
    def fiber(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.m) if i not in self.base)

    def split(self, z):
        z = np.asarray(z)
        return z[list(self.base)], z[list(self.fiber)]

    def join(self, x, y):
        z = np.empty(self.m, dtype=np.result_type(np.asarray(x), np.asarray(y)))
        z[list(self.base)] = x
        z[list(self.fiber)] = y
        return z

    def __str__(self):
        return f"SplitChart(m={self.m}, n={self.n}, base={list(self.base)})"


@dataclass(frozen=True)
class SubmanifoldJet:
    """Point (x^a, y^i, y^i_a) of the first-order jet manifold of submanifolds."""

    chart: SplitChart
    x: np.ndarray
    y: np.ndarray
    yx: np.ndarray

    def __post_init__(self):
        c = self.chart
        object.__setattr__(self, "x", _frozen(self.x, 1))
        object.__setattr__(self, "y", _frozen(self.y, 1))
        object.__setattr__(self, "yx", _frozen(np.reshape(self.yx, (c.m - c.n, c.n)), 2))
        if self.x.shape != (c.n,) or self.y.shape != (c.m - c.n,):
            raise ValueError("jet coordinate shapes do not match the chart")

    @property
    def z(self):
        return self.chart.join(self.x, self.y)

    def tangent_frame(self):
        """m x n matrix spanning the tangent plane: columns d_a + y^i_a d_i."""
        c = self.chart
        frame = np.zeros((c.m, c.n))
        frame[list(c.base)] = np.eye(c.n)
        frame[list(c.fiber)] = self.yx
        return frame


@dataclass(frozen=True)
class SectionJet:
    """Point (q^mu, z^A, z^A_mu) of the jet manifold of Q x Z -> Q."""

    q: np.ndarray
    z: np.ndarray
    zq: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _frozen(np.atleast_1d(self.q), 1))
        object.__setattr__(self, "z", _frozen(self.z, 1))
        zq = np.reshape(np.asarray(self.zq, dtype=float), (self.z.shape[0], self.q.shape[0]))
        object.__setattr__(self, "zq", _frozen(zq, 2))

    @property
    def n(self):
        return self.q.shape[0]

    @property
    def m(self):
        return self.z.shape[0]


@dataclass(frozen=True)
class SecondJet(SectionJet):
    """Section jet extended by symmetric second derivatives z^A_{mu nu}."""

    zqq: np.ndarray = field(default=None)

    def __post_init__(self):
        super().__post_init__()
        m, n = self.m, self.n
        if self.zqq is None:
            zqq = np.zeros((m, n, n))
        else:
            zqq = np.reshape(np.asarray(self.zqq, dtype=float), (m, n, n))
        asym = np.max(np.abs(zqq - zqq.transpose(0, 2, 1)), initial=0.0)
        if asym > 1e-12 * max(1.0, np.max(np.abs(zqq), initial=0.0)):
            raise ValueError(f"zqq is not symmetric in its jet indices (defect {asym:.3g})")
        zqq = 0.5 * (zqq + zqq.transpose(0, 2, 1))
        object.__setattr__(self, "zqq", _frozen(zqq, 3))

    @property
    def first(self) -> SectionJet:
        return SectionJet(self.q, self.z, self.zq)


@dataclass(frozen=True)
class TransitionMap:
    """Coordinate change z' = z_map(z), q' = q_map(q).

    Both maps must be written with generic arithmetic (see
    :mod:`subjet.hyperdual`) so that their Jacobians come from the
    differentiation engine.  ``name`` is informational.
    """

    z_map: Callable
    q_map: Callable = None
    name: str = "transition"

    def apply_z(self, z):
        return np.array(hd.value_of(np.asarray(self.z_map(np.asarray(z, dtype=float)),
                                               dtype=object)), dtype=float)

    def z_jacobian(self, z):
        vals, jac = hd.jacobian(self.z_map, z)
        if _singular(jac):
            raise SingularJacobian(f"{self.name}: dz'/dz is singular at z={np.asarray(z)}")
        return vals, jac

    def q_jacobian(self, q):
        q = np.atleast_1d(np.asarray(q, dtype=float))
        if self.q_map is None:
            return q.copy(), np.eye(q.size)
        vals, jac = hd.jacobian(self.q_map, q)
        if _singular(jac):
            raise SingularJacobian(f"{self.name}: dq'/dq is singular at q={q}")
        return vals, jac

    def then(self, other: "TransitionMap") -> "TransitionMap":
        """Composite map: apply ``self`` first, then ``other``."""
        qa, qb = self.q_map, other.q_map
        if qa is None:
            q_map = qb
        elif qb is None:
            q_map = qa
        else:
            q_map = lambda q: qb(qa(q))  # noqa: E731
        return TransitionMap(lambda z: other.z_map(np.asarray(self.z_map(z), dtype=object)),
                             q_map, f"{other.name}*{self.name}")


# -- catalog ---------------------------------------------------------------

def identity_transition():
    return TransitionMap(lambda z: z, None, "identity")


def lorentz_boost(alpha, axis=1, m=4):
    """Boost mixing coordinate 0 with ``axis``: z'^0 = z^0 ch - z^a sh, ..."""
    ch, sh = float(np.cosh(alpha)), float(np.sinh(alpha))

    def z_map(z):
        out = np.array(z, dtype=object)
        out[0] = z[0] * ch - z[axis] * sh
        out[axis] = -z[0] * sh + z[axis] * ch
        return out

    return TransitionMap(z_map, None, f"boost(alpha={alpha:g}, axis={axis})")


def permutation(perm):
    """z'^i = z^{perm[i]}: the exchange of coordinates between split charts."""
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(len(perm))):
        raise ValueError(f"{perm} is not a permutation")
    return TransitionMap(lambda z: np.array([z[p] for p in perm], dtype=object), None,
                         f"permutation({perm})")


def affine(matrix, offset=None, q_matrix=None, q_offset=None):
    """z' = A z + b and optionally q' = C q + d."""
    A = np.asarray(matrix, dtype=float)
    b = np.zeros(A.shape[0]) if offset is None else np.asarray(offset, dtype=float)
    q_map = None
    if q_matrix is not None:
        C = np.asarray(q_matrix, dtype=float)
        d = np.zeros(C.shape[0]) if q_offset is None else np.asarray(q_offset, dtype=float)
        q_map = lambda q: C @ np.asarray(q, dtype=object) + d  # noqa: E731
    return TransitionMap(lambda z: A @ np.asarray(z, dtype=object) + b, q_map, "affine")


def quadratic(matrix, offset, coeffs, q_matrix=None, q_coeffs=None):
    """z'^A = b^A + A^A_B z^B + c^A_{BC} z^B z^C (a polynomial transition).

    ``q_coeffs`` adds the analogous quadratic part on the base.
    """
    A = np.asarray(matrix, dtype=float)
    b = np.asarray(offset, dtype=float)
    c = np.asarray(coeffs, dtype=float)

    def z_map(z):
        z = np.asarray(z, dtype=object)
        return b + A @ z + np.array([z @ (c[i] @ z) for i in range(len(b))], dtype=object)

    q_map = None
    if q_matrix is not None:
        C = np.asarray(q_matrix, dtype=float)
        cq = np.zeros((C.shape[0],) * 3) if q_coeffs is None else np.asarray(q_coeffs, dtype=float)

        def q_map(q):
            q = np.asarray(q, dtype=object)
            return C @ q + np.array([q @ (cq[i] @ q) for i in range(C.shape[0])], dtype=object)

    return TransitionMap(z_map, q_map, "quadratic")


# -- operations --------------------------------------------------------------

def _jet_blocks(jac, source: SplitChart, target: SplitChart):
    tb, tf = list(target.base), list(target.fiber)
    sb, sf = list(source.base), list(source.fiber)
    return (jac[np.ix_(tb, sb)], jac[np.ix_(tb, sf)],
            jac[np.ix_(tf, sb)], jac[np.ix_(tf, sf)])


def transform_submanifold_jet(j: SubmanifoldJet, t: TransitionMap,
                              target: SplitChart | None = None,
                              tol: float = RANK_TOL) -> SubmanifoldJet:
    """Express a submanifold jet in the coordinates z' = t(z), split by ``target``.

    y'^j_a = (dy'^j/dy^k y^k_b + dy'^j/dx^b) (M^{-1})^b_a with
    M^c_b = dx'^c/dy^k y^k_b + dx'^c/dx^b.
    """
    target = j.chart if target is None else target
    if (target.m, target.n) != (j.chart.m, j.chart.n):
        raise ValueError("target chart dimensions differ from the jet's chart")
    zp, jac = t.z_jacobian(j.z)
    dxx, dxy, dyx, dyy = _jet_blocks(jac, j.chart, target)
    M = dxy @ j.yx + dxx
    if _singular(M, tol):
        raise SingularM(f"{target} does not cover this jet under {t.name}: "
                        f"M = {M.tolist()} is singular")
    yx_new = np.linalg.solve(M.T, (dyy @ j.yx + dyx).T).T
    x_new, y_new = target.split(zp)
    return SubmanifoldJet(target, x_new, y_new, yx_new)


def transform_section_jet(j: SectionJet, t: TransitionMap) -> SectionJet:
    """z'^A_mu = (dz'^A/dz^B) z^B_nu (dq^nu/dq'^mu)."""
    zp, jz = t.z_jacobian(j.z)
    qp, jq = t.q_jacobian(j.q)
    zq_new = np.linalg.solve(jq.T, (jz @ j.zq).T).T
    return SectionJet(qp, zp, zq_new)


def lift(j: SubmanifoldJet, xq=None, q=None) -> SectionJet:
    """Section jet with x^a_mu = xq and y^i_mu = y^i_a x^a_mu.

    The fiber over a submanifold jet is n^2-dimensional; ``xq`` defaults to
    the identity, which is a convention rather than a canonical choice.
    """
    c = j.chart
    xq = np.eye(c.n) if xq is None else np.reshape(np.asarray(xq, dtype=float), (c.n, c.n))
    q = np.zeros(c.n) if q is None else q
    zq = np.empty((c.m, c.n))
    zq[list(c.base)] = xq
    zq[list(c.fiber)] = j.yx @ xq
    return SectionJet(q, j.z, zq)


def project(j: SectionJet, chart: SplitChart, tol: float = RANK_TOL) -> SubmanifoldJet:
    """y^i_a = y^i_mu (x^{-1})^mu_a; requires the chart's x-block to be invertible."""
    if (chart.m, chart.n) != (j.m, j.n):
        raise ValueError(f"{chart} does not match jet dimensions m={j.m}, n={j.n}")
    xblock = j.zq[list(chart.base)]
    yblock = j.zq[list(chart.fiber)]
    if _singular(xblock, tol):
        raise NotRegularInChart(f"x-block of zq is singular in {chart}; try another split chart")
    yx = np.linalg.solve(xblock.T, yblock.T).T
    x, y = chart.split(j.z)
    return SubmanifoldJet(chart, x, y, yx)


def is_regular(j: SectionJet, tol: float = RANK_TOL) -> bool:
    """True iff zq has numerical rank n."""
    return not _singular(j.zq, tol)


def regular_chart(j: SectionJet, tol: float = RANK_TOL) -> SplitChart:
    """A split chart in which ``j`` projects, chosen by pivoted QR of zq^T."""
    if not is_regular(j, tol):
        raise NotRegularInChart("jet is not regular; no split chart covers it")
    from scipy.linalg import qr

    _, _, piv = qr(j.zq.T, pivoting=True)
    return SplitChart(j.m, j.n, tuple(sorted(int(i) for i in piv[: j.n])))


def lift_relation_residual(sj: SubmanifoldJet, j: SectionJet) -> float:
    """max |y^i_a x^a_mu - y^i_mu| between a submanifold jet and a section jet."""
    c = sj.chart
    return float(np.max(np.abs(sj.yx @ j.zq[list(c.base)] - j.zq[list(c.fiber)]),
                        initial=0.0))


def inverse_relation_residual(j: SubmanifoldJet, jp: SubmanifoldJet, t: TransitionMap) -> float:
    """Defect of the reciprocal relation between the M matrices of t and t^{-1}.

    Checks (dx^b/dy'^i y'^i_a + dx^b/dx'^a) M^c_b = delta^c_a, using the
    inverse Jacobian at the image point.
    """
    _, jac = t.z_jacobian(j.z)
    inv = np.linalg.inv(jac)
    dxx, dxy, _, _ = _jet_blocks(jac, j.chart, jp.chart)
    M = dxy @ j.yx + dxx
    ixx, ixy, _, _ = _jet_blocks(inv, jp.chart, j.chart)
    Minv = ixy @ jp.yx + ixx
    return float(np.max(np.abs(M @ Minv - np.eye(j.chart.n))))
