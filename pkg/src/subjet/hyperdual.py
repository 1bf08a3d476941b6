"""Second-order forward-mode differentiation.

A :class:`HyperDual` carries a value together with its gradient and Hessian
with respect to a fixed set of seed variables.  Arithmetic follows the
truncated second-order Taylor rules, so composing smooth operations yields
first and second derivatives exact to round-off.  Densities written with
plain operators and the functions below (``sqrt``, ``exp`` ...) accept
floats, numpy arrays and hyper-dual numbers alike.
"""

from __future__ import annotations

import math
from numbers import Real

import numpy as np


class HyperDual:
    __slots__ = ("value", "grad", "hess")
    # numpy scalars defer to the reflected operators below
    __array_ufunc__ = None

    def __init__(self, value, grad, hess):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @classmethod
    def constant(cls, value, nseeds):
        return cls(value, np.zeros(nseeds), np.zeros((nseeds, nseeds)))

    @classmethod
    def variable(cls, value, index, nseeds):
        g = np.zeros(nseeds)
        g[index] = 1.0
        return cls(value, g, np.zeros((nseeds, nseeds)))

    @property
    def nseeds(self):
        return self.grad.shape[0]

    def __repr__(self):
        return f"HyperDual({self.value!r}, nseeds={self.nseeds})"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, HyperDual):
            return HyperDual(self.value + other.value, self.grad + other.grad,
                             self.hess + other.hess)
        if isinstance(other, Real):
            return HyperDual(self.value + other, self.grad, self.hess)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, HyperDual):
            return HyperDual(self.value - other.value, self.grad - other.grad,
                             self.hess - other.hess)
        if isinstance(other, Real):
            return HyperDual(self.value - other, self.grad, self.hess)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Real):
            return HyperDual(other - self.value, -self.grad, -self.hess)
        return NotImplemented

    def __neg__(self):
        return HyperDual(-self.value, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, HyperDual):
            a, b = self.value, other.value
            ga, gb = self.grad, other.grad
            cross = np.outer(ga, gb)
            # cross + cross.T is symmetric bit-for-bit
            return HyperDual(a * b, a * gb + b * ga,
                             a * other.hess + b * self.hess + (cross + cross.T))
        if isinstance(other, Real):
            return HyperDual(self.value * other, self.grad * other, self.hess * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, HyperDual):
            return self * other._unary(1.0 / other.value, -1.0 / other.value ** 2,
                                       2.0 / other.value ** 3)
        if isinstance(other, Real):
            return HyperDual(self.value / other, self.grad / other, self.hess / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Real):
            v = self.value
            return self._unary(other / v, -other / v ** 2, 2.0 * other / v ** 3)
        return NotImplemented

    def __pow__(self, exponent):
        if isinstance(exponent, HyperDual):
            return exp(exponent * log(self))
        if not isinstance(exponent, Real):
            return NotImplemented
        if exponent == 2:
            return self * self
        v = self.value
        e = float(exponent)
        return self._unary(v ** e, e * v ** (e - 1.0), e * (e - 1.0) * v ** (e - 2.0))

    def __rpow__(self, base):
        if not isinstance(base, Real):
            return NotImplemented
        return exp(self * float(np.log(base)))

    def _unary(self, f0, f1, f2):
        """Chain rule for a scalar map with derivatives f1, f2 at self.value."""
        g = self.grad
        return HyperDual(f0, f1 * g, f1 * self.hess + f2 * np.outer(g, g))

    # comparisons act on the value so domain checks read naturally
    def __lt__(self, other):
        return self.value < _val(other)

    def __le__(self, other):
        return self.value <= _val(other)

    def __gt__(self, other):
        return self.value > _val(other)

    def __ge__(self, other):
        return self.value >= _val(other)

    def __float__(self):
        return self.value


def _val(x):
    return x.value if isinstance(x, HyperDual) else x


def value_of(x):
    """Strip derivative parts; works elementwise on arrays."""
    if isinstance(x, HyperDual):
        return x.value
    if isinstance(x, np.ndarray) and x.dtype == object:
        return np.vectorize(_val, otypes=[float])(x)
    return x


def sqrt(x):
    if isinstance(x, HyperDual):
        r = math.sqrt(x.value)
        return x._unary(r, 0.5 / r, -0.25 / (r * x.value))
    return np.sqrt(x)


def exp(x):
    if isinstance(x, HyperDual):
        e = math.exp(x.value)
        return x._unary(e, e, e)
    return np.exp(x)


def log(x):
    if isinstance(x, HyperDual):
        v = x.value
        return x._unary(math.log(v), 1.0 / v, -1.0 / v ** 2)
    return np.log(x)


def sin(x):
    if isinstance(x, HyperDual):
        s, c = math.sin(x.value), math.cos(x.value)
        return x._unary(s, c, -s)
    return np.sin(x)


def cos(x):
    if isinstance(x, HyperDual):
        s, c = math.sin(x.value), math.cos(x.value)
        return x._unary(c, -s, -c)
    return np.cos(x)


def cosh(x):
    if isinstance(x, HyperDual):
        return x._unary(math.cosh(x.value), math.sinh(x.value), math.cosh(x.value))
    return np.cosh(x)


def sinh(x):
    if isinstance(x, HyperDual):
        return x._unary(math.sinh(x.value), math.cosh(x.value), math.sinh(x.value))
    return np.sinh(x)


def seed(values):
    """Return an object array of hyper-dual variables seeded at ``values``."""
    flat = np.asarray(values, dtype=float).ravel()
    k = flat.size
    out = np.empty(k, dtype=object)
    for i, v in enumerate(flat):
        out[i] = HyperDual.variable(v, i, k)
    return out


def derivatives(fn, x):
    """Value, gradient and Hessian of a scalar function at a flat point ``x``.

    ``fn`` receives a 1-D object array of seeded variables.  A result that
    does not depend on the seeds (a plain number) yields zero derivatives.
    """
    x = np.asarray(x, dtype=float).ravel()
    k = x.size
    out = fn(seed(x))
    if isinstance(out, HyperDual):
        return out.value, out.grad, out.hess
    return float(out), np.zeros(k), np.zeros((k, k))


def jacobian(fn, x):
    """Value and Jacobian of a vector function ``fn: R^k -> R^r`` at ``x``."""
    x = np.asarray(x, dtype=float).ravel()
    k = x.size
    out = fn(seed(x))
    vals = np.empty(len(out))
    jac = np.zeros((len(out), k))
    for i, comp in enumerate(out):
        if isinstance(comp, HyperDual):
            vals[i] = comp.value
            jac[i] = comp.grad
        else:
            vals[i] = float(comp)
    return vals, jac


def det(mat):
    """Determinant by cofactor expansion; generic over the element type.

    Intended for the small (n <= 3) matrices of worldsheet metrics, where it
    keeps hyper-dual entries differentiable.
    """
    mat = np.asarray(mat, dtype=object) if not isinstance(mat, np.ndarray) else mat
    n = mat.shape[0]
    if n == 1:
        return mat[0, 0]
    if n == 2:
        return mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(mat, 0, axis=0), j, axis=1)
        term = mat[0, j] * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total
