"""Darboux chart of the thermodynamic phase space.

Points are stored as a flat coordinate array in the fixed order
``(w, q^1..q^n, p_1..p_n)``; tangent and cotangent components use the same
order. The contact form is ``eta = dw + p_a dq^a`` and
``d eta = sum_a dp_a ^ dq^a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import ad
from .errors import DimensionError, NumericError, UnsupportedDimensionError


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TpsPoint:
    coords: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coords)
        if c.ndim != 1 or c.size < 3 or c.size % 2 == 0:
            raise DimensionError(f"expected 2n+1 >= 3 coordinates, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise NumericError("non-finite TPS coordinates")
        object.__setattr__(self, "coords", c)

    @classmethod
    def make(cls, w: float, q, p) -> "TpsPoint":
        q = np.atleast_1d(np.asarray(q, dtype=float))
        p = np.atleast_1d(np.asarray(p, dtype=float))
        if q.shape != p.shape:
            raise DimensionError("q and p must have the same length")
        return cls(np.concatenate([[w], q, p]))

    @property
    def n(self) -> int:
        return (self.coords.size - 1) // 2

    @property
    def dim(self) -> int:
        return self.coords.size

    @property
    def w(self) -> float:
        return float(self.coords[0])

    @property
    def q(self) -> np.ndarray:
        return self.coords[1:1 + self.n]

    @property
    def p(self) -> np.ndarray:
        return self.coords[1 + self.n:]

    def __eq__(self, other):
        return isinstance(other, TpsPoint) and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())

    def __repr__(self):
        return f"TpsPoint(w={self.w!r}, q={self.q.tolist()!r}, p={self.p.tolist()!r})"


def q_index(n: int, a: int) -> int:
    return 1 + a


def p_index(n: int, a: int) -> int:
    return 1 + n + a


@dataclass(frozen=True, eq=False)
class VectorAt:
    base: TpsPoint
    components: np.ndarray

    def __post_init__(self):
        c = _frozen(self.components)
        if c.shape != (self.base.dim,):
            raise DimensionError(
                f"vector has {c.size} components, base point needs {self.base.dim}")
        object.__setattr__(self, "components", c)

    def __repr__(self):
        return f"VectorAt({self.components.tolist()!r})"


@dataclass(frozen=True, eq=False)
class CovectorAt:
    base: TpsPoint
    components: np.ndarray

    def __post_init__(self):
        c = _frozen(self.components)
        if c.shape != (self.base.dim,):
            raise DimensionError(
                f"covector has {c.size} components, base point needs {self.base.dim}")
        object.__setattr__(self, "components", c)

    def __call__(self, X: VectorAt) -> float:
        _check_base(self.base, X)
        return float(self.components @ X.components)


def _check_base(pt: TpsPoint, *vecs: VectorAt) -> None:
    for v in vecs:
        if v.components.size != pt.dim:
            raise DimensionError(
                f"vector of length {v.components.size} at a point of dimension {pt.dim}")


class ScalarField:
    """Differentiable function on the TPS.

    ``func`` receives the coordinate sequence ``x`` (length 2n+1) and must be
    written with plain arithmetic and :mod:`contactthermo.ad` elementary
    functions, so that gradients and Hessians come from forward-mode AD.
    """

    def __init__(self, n: int, func: Callable[[Sequence], object], name: str = ""):
        self.n = n
        self.func = func
        self.name = name

    def __call__(self, pt: TpsPoint) -> float:
        return float(self.func(list(pt.coords)))

    def value(self, pt: TpsPoint) -> float:
        return self(pt)

    def gradient(self, pt: TpsPoint) -> CovectorAt:
        _, g = ad.value_and_gradient(self.func, pt.coords)
        return CovectorAt(pt, np.asarray(g, dtype=float))

    def hessian(self, pt: TpsPoint) -> np.ndarray:
        return ad.derivatives(self.func, pt.coords)[2]

    def evaluate(self, pt: TpsPoint):
        """Return ``(value, gradient covector, Hessian matrix)``."""
        v, g, h = ad.derivatives(self.func, pt.coords)
        return v, CovectorAt(pt, g), h

    def __repr__(self):
        return f"ScalarField(n={self.n}, name={self.name!r})"


class VectorFieldDef:
    """Vector field given by a function from coordinate arrays to component arrays."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], name: str = ""):
        self.func = func
        self.name = name

    def components(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def __call__(self, pt: TpsPoint) -> VectorAt:
        return VectorAt(pt, self.components(pt.coords))

    def __repr__(self):
        return f"VectorFieldDef({self.name!r})"


def constant_field(components, name: str = "") -> VectorFieldDef:
    c = np.array(components, dtype=float)
    return VectorFieldDef(lambda x: c.copy(), name)


# --- contact form ----------------------------------------------------------

def eta_covector(pt: TpsPoint) -> CovectorAt:
    n = pt.n
    c = np.zeros(pt.dim)
    c[0] = 1.0
    c[1:1 + n] = pt.p
    return CovectorAt(pt, c)


def deta_matrix(n: int) -> np.ndarray:
    """Matrix ``A`` with ``d eta(X, Y) = X @ A @ Y``."""
    A = np.zeros((2 * n + 1, 2 * n + 1))
    for a in range(n):
        A[p_index(n, a), q_index(n, a)] = 1.0
        A[q_index(n, a), p_index(n, a)] = -1.0
    return A


def eta_eval(pt: TpsPoint, X: VectorAt) -> float:
    _check_base(pt, X)
    return eta_covector(pt)(X)


def deta_eval(pt: TpsPoint, X: VectorAt, Y: VectorAt) -> float:
    _check_base(pt, X, Y)
    n = pt.n
    xq, xp = X.components[1:1 + n], X.components[1 + n:]
    yq, yp = Y.components[1:1 + n], Y.components[1 + n:]
    return float(xp @ yq - xq @ yp)


def reeb(pt: TpsPoint) -> VectorAt:
    c = np.zeros(pt.dim)
    c[0] = 1.0
    return VectorAt(pt, c)


def heisenberg_basis(pt: TpsPoint) -> list[VectorAt]:
    """Frame ``[xi, P^1..P^n, Q_1..Q_n]`` with ``P^i = d/dp_i`` and
    ``Q_i = p_i d/dw - d/dq^i``."""
    n = pt.n
    frame = [reeb(pt)]
    for i in range(n):
        c = np.zeros(pt.dim)
        c[p_index(n, i)] = 1.0
        frame.append(VectorAt(pt, c))
    for i in range(n):
        c = np.zeros(pt.dim)
        c[0] = pt.p[i]
        c[q_index(n, i)] = -1.0
        frame.append(VectorAt(pt, c))
    return frame


def heisenberg_fields(n: int) -> tuple[VectorFieldDef, list[VectorFieldDef], list[VectorFieldDef]]:
    """The Heisenberg frame as vector fields: ``(xi, [P^i], [Q_i])``."""
    dim = 2 * n + 1
    xi = constant_field(np.eye(dim)[0], "xi")
    P = [constant_field(np.eye(dim)[p_index(n, i)], f"P^{i + 1}") for i in range(n)]

    def make_Q(i):
        def f(x):
            c = np.zeros(dim)
            c[0] = x[p_index(n, i)]
            c[q_index(n, i)] = -1.0
            return c
        return VectorFieldDef(f, f"Q_{i + 1}")

    return xi, P, [make_Q(i) for i in range(n)]


# --- numerical differential calculus ---------------------------------------

def fd_step(x: np.ndarray, rel: float = 1e-5) -> float:
    return rel * max(1.0, float(np.linalg.norm(x)))


def jacobian_fd(F: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float) -> np.ndarray:
    """Central-difference Jacobian ``J[i, k] = dF_i/dx_k``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        fp = np.asarray(F(x + e), dtype=float)
        fm = np.asarray(F(x - e), dtype=float)
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise NumericError(f"non-finite field value near {x}")
        cols.append((fp - fm) / (2.0 * h))
    return np.stack(cols, axis=-1)


def lie_bracket(F: VectorFieldDef, G: VectorFieldDef, pt: TpsPoint) -> VectorAt:
    """``[F, G] = DG.F - DF.G`` with central differences."""
    if F is G:
        return VectorAt(pt, np.zeros(pt.dim))
    x = pt.coords
    h = fd_step(x)
    f, g = F.components(x), G.components(x)
    DF = jacobian_fd(F.components, x, h)
    DG = jacobian_fd(G.components, x, h)
    return VectorAt(pt, DG @ f - DF @ g)


# --- volume form ------------------------------------------------------------

def _det_fraction(M: list[list[Fraction]]) -> Fraction:
    M = [row[:] for row in M]
    size = len(M)
    det = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if M[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        for r in range(col + 1, size):
            factor = M[r][col] / M[col][col]
            if factor:
                for c in range(col, size):
                    M[r][c] -= factor * M[col][c]
    return det


def volume_frame(n: int) -> list[int]:
    """Coordinate indices of the oriented frame (d/dw, d/dp_1, d/dq^1, ...)."""
    order = [0]
    for a in range(n):
        order += [p_index(n, a), q_index(n, a)]
    return order


def volume_nondegeneracy(pt: TpsPoint) -> Fraction:
    """``eta ^ (d eta)^n`` on the oriented coordinate frame, in exact arithmetic.

    ``(d eta)^n`` is expanded into wedges of one-forms and each term is the
    determinant of one-forms paired with the frame vectors.
    """
    n = pt.n
    if n > 3:
        raise UnsupportedDimensionError("volume check implemented for n <= 3")
    dim = pt.dim
    eta_row = [Fraction(0)] * dim
    eta_row[0] = Fraction(1)
    for a in range(n):
        eta_row[q_index(n, a)] = Fraction(float(pt.p[a]))

    def unit(k):
        r = [Fraction(0)] * dim
        r[k] = Fraction(1)
        return r

    frame = volume_frame(n)
    total = Fraction(0)
    # d eta = sum_a dp_a ^ dq^a, so (d eta)^n = sum over index sequences
    for seq in np.ndindex(*([n] * n)):
        forms = [eta_row]
        for a in seq:
            forms += [unit(p_index(n, a)), unit(q_index(n, a))]
        M = [[row[k] for k in frame] for row in forms]
        total += _det_fraction(M)
    return total


def random_points(rng: np.random.Generator, n: int, count: int, *,
                  w_range=(-2.0, 2.0), q_range=(-2.0, 2.0), p_range=(0.5, 5.0)) -> list[TpsPoint]:
    pts = []
    for _ in range(count):
        w = rng.uniform(*w_range)
        q = rng.uniform(*q_range, size=n)
        p = rng.uniform(*p_range, size=n)
        pts.append(TpsPoint.make(w, q, p))
    return pts

