"""Forward-mode automatic differentiation with nestable dual numbers.

A :class:`Dual` carries a value and a tangent vector. Nesting duals (a dual
whose value and tangent entries are themselves duals) gives higher
derivatives; every seeding gets a fresh tag so that independent
differentiation levels never mix.

Functions written with plain arithmetic and the elementary functions below
(``exp``, ``log``, ``sqrt``) work unchanged on floats and on duals.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

_tags = itertools.count(1)


class Dual:
    __slots__ = ("val", "eps", "tag")

    def __init__(self, val, eps, tag: int):
        self.val = val
        self.eps = eps
        self.tag = tag

    # a dual whose tag is lower than ours is a constant at our level
    def _split(self, other):
        if isinstance(other, Dual) and other.tag == self.tag:
            return other.val, other.eps
        return other, None

    def __add__(self, other):
        v, e = self._split(other)
        if isinstance(other, Dual) and other.tag > self.tag:
            return other.__radd__(self)
        return Dual(self.val + v, self.eps if e is None else self.eps + e, self.tag)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual) and other.tag > self.tag:
            return other.__rsub__(self)
        v, e = self._split(other)
        return Dual(self.val - v, self.eps if e is None else self.eps - e, self.tag)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.eps, self.tag)

    def __neg__(self):
        return Dual(-self.val, -self.eps, self.tag)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Dual) and other.tag > self.tag:
            return other.__rmul__(self)
        v, e = self._split(other)
        if e is None:
            return Dual(self.val * v, self.eps * v, self.tag)
        return Dual(self.val * v, self.eps * v + e * self.val, self.tag)

    def __rmul__(self, other):
        return Dual(other * self.val, self.eps * other, self.tag)

    def __truediv__(self, other):
        if isinstance(other, Dual) and other.tag > self.tag:
            return other.__rtruediv__(self)
        v, e = self._split(other)
        if e is None:
            return Dual(self.val / v, self.eps * (1.0 / v), self.tag)
        inv = 1.0 / v
        return Dual(self.val * inv, (self.eps * v - e * self.val) * (inv * inv), self.tag)

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        return Dual(other * inv, self.eps * (-other * inv * inv), self.tag)

    def __pow__(self, k):
        if isinstance(k, Dual):
            return exp(k * log(self))
        if k == 2:
            return self * self
        return Dual(self.val ** k, self.eps * (k * self.val ** (k - 1)), self.tag)

    def __rpow__(self, base):
        return exp(self * math.log(base))

    # comparisons act on the real part so branchy code still runs
    def _real(self):
        v = self.val
        while isinstance(v, Dual):
            v = v.val
        return v

    def __lt__(self, other):
        return self._real() < _real(other)

    def __le__(self, other):
        return self._real() <= _real(other)

    def __gt__(self, other):
        return self._real() > _real(other)

    def __ge__(self, other):
        return self._real() >= _real(other)

    def __float__(self):
        return float(self._real())

    def __repr__(self):
        return f"Dual({self.val!r}, {self.eps!r}, tag={self.tag})"


def _real(x):
    return x._real() if isinstance(x, Dual) else x


def _lift(fn, dfn):
    def f(x):
        if isinstance(x, Dual):
            return Dual(f(x.val), x.eps * dfn(x.val), x.tag)
        return fn(x)
    return f


exp = _lift(math.exp, lambda v: exp(v))
log = _lift(math.log, lambda v: 1.0 / v)
sqrt = _lift(math.sqrt, lambda v: 0.5 / sqrt(v))
sin = _lift(math.sin, lambda v: cos(v))
cos = _lift(math.cos, lambda v: -sin(v))


def _seed(x):
    x = list(x)
    tag = next(_tags)
    m = len(x)
    eye = np.eye(m)
    return [Dual(xi, eye[i].astype(object) if isinstance(xi, Dual) else eye[i], tag)
            for i, xi in enumerate(x)], tag


def _tangent(y, tag, m):
    if isinstance(y, Dual) and y.tag == tag:
        return y.val, np.asarray(y.eps)
    return y, np.zeros(m)


def value_and_gradient(f, x):
    """Evaluate ``f`` at ``x`` and its gradient in one forward sweep."""
    xs, tag = _seed(x)
    y = f(xs)
    return _tangent(y, tag, len(xs))


def gradient(f, x) -> np.ndarray:
    return value_and_gradient(f, x)[1]


def jacobian(F, x) -> np.ndarray:
    """Jacobian of a vector-valued ``F``; rows index outputs."""
    xs, tag = _seed(x)
    ys = F(xs)
    rows = [_tangent(y, tag, len(xs))[1] for y in ys]
    return np.array(rows)


def derivatives(f, x):
    """Value, gradient and Hessian of a scalar function at a float point."""
    x = np.asarray(x, dtype=float)
    outer, tag = _seed(x)

    def grad_at(z):
        return value_and_gradient(f, z)

    val_d, grad_d = grad_at(outer)
    m = len(x)
    val = _tangent(val_d, tag, m)[0]
    grad = np.empty(m)
    hess = np.empty((m, m))
    for i in range(m):
        gv, gt = _tangent(grad_d[i], tag, m)
        grad[i] = float(gv)
        hess[i] = gt
    hess = 0.5 * (hess + hess.T)
    return float(val), grad, hess
