"""Legendre transformations, Legendre submanifolds and their induced metrics.

The discrete Legendre map on index set ``I`` sends
``(w, q, p) -> (w + q^I p_I, -p_I, q^I)`` and leaves the other coordinates
alone. It preserves ``eta = dw + p dq`` exactly.

A Legendre submanifold is generated by a function ``f(p_I, q_J)`` through

    q^i = df/dp_i,   p_j = -df/dq^j,   w = f - p_i df/dp_i.

Base coordinates ``x`` of an embedding are ordered by index: ``x[a]`` is
``p_a`` when ``a`` is in ``I`` and ``q^a`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import ad
from .chart import TpsPoint, eta_covector
from .errors import ConvergenceError, DimensionError, LegendreBreakdown
from .metric import gfr_matrix

NEWTON_TOL = 1e-12


class Potential:
    """Function of ``n`` variables with value, gradient and Hessian.

    ``func`` takes a coordinate sequence and is written with plain arithmetic
    and :mod:`contactthermo.ad` functions so that forward-mode AD applies.
    """

    def __init__(self, n: int, func: Callable[[Sequence], object], name: str = ""):
        self.n = n
        self.func = func
        self.name = name

    @classmethod
    def from_taylor(cls, n: int, evaluate: Callable[[np.ndarray], tuple], name: str = ""):
        """Wrap a ``(value, gradient, hessian)`` evaluator.

        Dual-number inputs are pushed through the second-order Taylor polynomial
        at their real part, which reproduces derivatives up to second order.
        """
        def func(x):
            x0 = np.array([float(xi) for xi in x])
            v, g, H = evaluate(x0)
            if not any(isinstance(xi, ad.Dual) for xi in x):
                return v
            d = [xi - x0i for xi, x0i in zip(x, x0)]
            out = v
            for i in range(n):
                out = out + g[i] * d[i]
                for j in range(n):
                    out = out + 0.5 * H[i, j] * d[i] * d[j]
            return out

        pot = cls(n, func, name)
        pot._evaluate = evaluate
        return pot

    def __call__(self, x) -> float:
        return self.value(x)

    def value(self, x) -> float:
        if hasattr(self, "_evaluate"):
            return float(self._evaluate(np.asarray(x, dtype=float))[0])
        return float(self.func(list(np.asarray(x, dtype=float))))

    def gradient(self, x) -> np.ndarray:
        return self.evaluate(x)[1]

    def hessian(self, x) -> np.ndarray:
        return self.evaluate(x)[2]

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionError(f"potential of {self.n} variables evaluated at shape {x.shape}")
        if hasattr(self, "_evaluate"):
            v, g, H = self._evaluate(x)
            return float(v), np.asarray(g, dtype=float), np.asarray(H, dtype=float)
        return ad.derivatives(self.func, x)

    def __repr__(self):
        return f"Potential(n={self.n}, name={self.name!r})"


@dataclass(frozen=True)
class LegendreSpec:
    """Partition ``I`` (transformed indices, 0-based) and generating function ``f``."""
    n: int
    I: frozenset
    f: Potential

    def __post_init__(self):
        I = frozenset(int(i) for i in self.I)
        if not I <= set(range(self.n)):
            raise DimensionError(f"index set {sorted(I)} not within 0..{self.n - 1}")
        if self.f.n != self.n:
            raise DimensionError("generating function arity must equal n")
        object.__setattr__(self, "I", I)

    @property
    def J(self) -> frozenset:
        return frozenset(range(self.n)) - self.I

    @classmethod
    def of_q(cls, f: Potential) -> "LegendreSpec":
        return cls(f.n, frozenset(), f)


def _mask(n: int, I: Iterable[int]) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[list(I)] = True
    return m


# --- discrete maps on the phase space ----------------------------------------

def legendre_point(pt: TpsPoint, I: Iterable[int]) -> TpsPoint:
    m = _mask(pt.n, I)
    q, p = pt.q.copy(), pt.p.copy()
    w = pt.w + float(np.sum(q[m] * p[m]))
    q_new, p_new = q.copy(), p.copy()
    q_new[m] = -p[m]
    p_new[m] = q[m]
    return TpsPoint.make(w, q_new, p_new)


def legendre_point_inverse(pt: TpsPoint, I: Iterable[int]) -> TpsPoint:
    m = _mask(pt.n, I)
    qt, pt_ = pt.q.copy(), pt.p.copy()
    q, p = qt.copy(), pt_.copy()
    q[m] = pt_[m]
    p[m] = -qt[m]
    w = pt.w - float(np.sum(q[m] * p[m]))
    return TpsPoint.make(w, q, p)


def legendre_jacobian(pt: TpsPoint, I: Iterable[int]) -> np.ndarray:
    """Exact differential of :func:`legendre_point` at ``pt``."""
    n = pt.n
    m = _mask(n, I)
    J = np.eye(pt.dim)
    for a in range(n):
        if m[a]:
            qa, pa = 1 + a, 1 + n + a
            J[qa, :] = 0.0
            J[pa, :] = 0.0
            J[qa, pa] = -1.0
            J[pa, qa] = 1.0
            J[0, qa] = pt.p[a]
            J[0, pa] = pt.q[a]
    return J


def pullback_eta_residual(pt: TpsPoint, I: Iterable[int], J: np.ndarray | None = None) -> float:
    """Max-norm of ``f^* eta - eta`` at ``pt``; ``J`` defaults to the exact differential."""
    image = legendre_point(pt, I)
    if J is None:
        J = legendre_jacobian(pt, I)
    pulled = J.T @ eta_covector(image).components
    return float(np.max(np.abs(pulled - eta_covector(pt).components)))


def plt_metric(pt: TpsPoint, I: Iterable[int]) -> np.ndarray:
    """Pullback of ``G_FR`` under the Legendre map, in the original chart: the
    ``dq^i (.) dp_i`` block changes sign for every ``i`` in ``I``."""
    G = gfr_matrix(pt.coords)
    n = pt.n
    for i in I:
        a, b = 1 + i, 1 + n + i
        G[a, b] += 1.0
        G[b, a] += 1.0
    return G


# --- Legendre submanifolds ----------------------------------------------------

def embed(spec: LegendreSpec, x) -> TpsPoint:
    x = np.asarray(x, dtype=float)
    _, g, _ = spec.f.evaluate(x)
    return _embed_from(spec, x, g)


def _embed_from(spec: LegendreSpec, x, g) -> TpsPoint:
    m = _mask(spec.n, spec.I)
    q = np.where(m, g, x)
    p = np.where(m, x, -g)
    w = spec.f.value(x) - float(np.sum(x[m] * g[m]))
    return TpsPoint.make(w, q, p)


def embedding_jacobian(spec: LegendreSpec, x) -> np.ndarray:
    """Differential of :func:`embed` as an ``n x (2n+1)`` matrix (rows: base directions)."""
    x = np.asarray(x, dtype=float)
    n = spec.n
    _, g, H = spec.f.evaluate(x)
    m = _mask(n, spec.I)
    D = np.zeros((n, 2 * n + 1))
    for a in range(n):
        if m[a]:
            D[:, 1 + a] = H[a]          # q^a = df/dp_a
            D[a, 1 + n + a] = 1.0       # p_a is a base coordinate
        else:
            D[a, 1 + a] = 1.0           # q^a is a base coordinate
            D[:, 1 + n + a] = -H[a]     # p_a = -df/dq^a
    # w = f - sum_I x_i g_i
    D[:, 0] = g - H[:, m] @ x[m] - np.where(m, g, 0.0)
    return D


def isotropy_residual(spec: LegendreSpec, x) -> float:
    """Max over base directions ``v`` of ``|eta(d embed v)|``."""
    pt = embed(spec, x)
    D = embedding_jacobian(spec, x)
    return float(np.max(np.abs(D @ eta_covector(pt).components)))


def induced_metric(spec: LegendreSpec, x) -> dict:
    """Pullback ``D G_FR D^T`` of the phase-space metric (the reference value),
    next to the Hessian of the generating function for comparison.

    For a generating function of the ``q`` variables only the pullback is
    ``+Hess f``; for one of the ``p`` variables only it is ``-Hess f``; mixed
    generating functions give ``diag(-f_pp, +f_qq)`` with no cross block.
    """
    x = np.asarray(x, dtype=float)
    pt = embed(spec, x)
    D = embedding_jacobian(spec, x)
    g = D @ gfr_matrix(pt.coords) @ D.T
    H = spec.f.hessian(x)
    m = _mask(spec.n, spec.I)
    sign = np.where(m, -1.0, 1.0)
    block = np.outer(m, m) | np.outer(~m, ~m)
    signed_hessian = np.where(block, sign[:, None] * H, 0.0)
    return {
        "pullback": g,
        "hessian": H,
        "hessian_sign_residual": float(np.max(np.abs(g - signed_hessian))),
    }


def pushforward(w: Potential, X, x) -> np.ndarray:
    """Tangent map of the equations of state ``p = -grad w``: ``X -> -Hess(w) X``."""
    H = w.hessian(x)
    return -H @ np.asarray(X, dtype=float)


# --- Legendre transform of potentials ----------------------------------------

def is_degenerate(H: np.ndarray, rel: float = 1e-10) -> bool:
    """Scale-aware singularity test ``|det H| < rel * (trace scale)^n``."""
    H = np.atleast_2d(H)
    n = H.shape[0]
    scale = max(float(np.sum(np.abs(np.diag(H)))) / n, float(np.max(np.abs(H))), 1e-300)
    return abs(float(np.linalg.det(H))) < rel * scale ** n


def _inertia(H: np.ndarray) -> tuple[int, int]:
    ev = np.linalg.eigvalsh(0.5 * (H + H.T))
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


def _seed_from_scan(w: Potential, I, target_p, fixed_q, lo=-5.0, hi=5.0, count=41):
    """Coarse grid scan of the transformed variables for the best stationarity residual."""
    idx = sorted(I)
    axes = [np.linspace(lo, hi, count)] * len(idx)
    best, best_r = None, np.inf
    for combo in np.array(np.meshgrid(*axes)).reshape(len(idx), -1).T:
        q = fixed_q.copy()
        q[idx] = combo
        try:
            g = w.gradient(q)
        except (ValueError, ArithmeticError, OverflowError):
            continue
        if not np.all(np.isfinite(g)):
            continue
        r = float(np.linalg.norm(-g[idx] - target_p))
        if r < best_r:
            best, best_r = q, r
    if best is None:
        raise ConvergenceError("grid scan found no admissible seed")
    return best


def solve_equations_of_state(w: Potential, I, y, guess=None, *, max_iter: int = 100,
                             tol: float = NEWTON_TOL, in_domain=None):
    """Solve ``p_i = -dw/dq^i`` (``i`` in ``I``) for ``q^I`` with ``q^J`` fixed.

    ``y`` holds the mixed base coordinates ``(p_I, q_J)`` in index order.
    Damped Newton with Armijo backtracking; raises :class:`LegendreBreakdown`
    if the Hessian block is singular or its inertia differs from the inertia
    at the seed somewhere on the iteration path.
    """
    n = w.n
    idx = sorted(I)
    m = _mask(n, idx)
    y = np.asarray(y, dtype=float)
    target = y[m]
    q = np.where(m, 0.0, y)
    if guess is None:
        q = _seed_from_scan(w, idx, target, q)
    else:
        q[m] = np.asarray(guess, dtype=float).reshape(-1)[: len(idx)] if np.size(guess) == len(idx) \
            else np.asarray(guess, dtype=float)[m]

    def residual(qq):
        g = w.gradient(qq)
        return -g[m] - target

    ref_inertia = None
    r = residual(q)
    for _ in range(max_iter):
        H = w.hessian(q)[np.ix_(m, m)]
        if is_degenerate(H):
            raise LegendreBreakdown("singular Hessian on the Legendre path", point=q.copy(), hessian=H)
        inertia = _inertia(H)
        if ref_inertia is None:
            ref_inertia = inertia
        elif inertia != ref_inertia:
            raise LegendreBreakdown("Hessian changes definiteness on the Legendre path",
                                    point=q.copy(), hessian=H)
        rn = float(np.linalg.norm(r))
        if rn <= tol * max(1.0, float(np.linalg.norm(target))):
            return q
        step = np.linalg.solve(-H, -r)   # d(residual)/dq^I = -H
        lam = 1.0
        while lam > 1e-12:
            q_try = q.copy()
            q_try[m] = q[m] + lam * step
            ok = in_domain is None or in_domain(q_try)
            if ok:
                try:
                    r_try = residual(q_try)
                    ok = np.all(np.isfinite(r_try))
                except (ValueError, ArithmeticError, OverflowError):
                    ok = False
            if ok and np.linalg.norm(r_try) <= (1.0 - 1e-4 * lam) * rn:
                break
            lam *= 0.5
        else:
            raise ConvergenceError("line search failed in Legendre Newton solve",
                                   residual=rn, iterate=q.copy())
        q, r = q_try, r_try
    raise ConvergenceError("Legendre Newton solve did not converge",
                           residual=float(np.linalg.norm(r)), iterate=q.copy())


def legendre_potential(w: Potential, I, guess=None, *, in_domain=None) -> Potential:
    """Generating function ``f(p_I, q_J) = w(q) + p_I q^I`` with ``p_I = -dw/dq^I``.

    Derivatives follow from the implicit function theorem:
    ``df/dp_I = q^I``, ``df/dq_J = dw/dq^J``, and the Hessian is built from the
    blocks of ``Hess w`` at the solution. Each evaluation warm-starts Newton
    from the previous solution.
    """
    n = w.n
    idx = sorted(I)
    m = _mask(n, idx)
    state = {"guess": None if guess is None else np.asarray(guess, dtype=float)}

    def evaluate(y):
        g0 = state["guess"]
        q = solve_equations_of_state(w, idx, y, g0, in_domain=in_domain)
        state["guess"] = q[m]
        v, g, H = w.evaluate(q)
        HII = H[np.ix_(m, m)]
        HIJ = H[np.ix_(m, ~m)]
        HJJ = H[np.ix_(~m, ~m)]
        inv = np.linalg.inv(HII)
        val = v + float(np.sum(y[m] * q[m]))
        grad = np.where(m, q, g)
        hess = np.zeros((n, n))
        hess[np.ix_(m, m)] = -inv
        hess[np.ix_(m, ~m)] = -inv @ HIJ
        hess[np.ix_(~m, m)] = (-inv @ HIJ).T
        hess[np.ix_(~m, ~m)] = HJJ - HIJ.T @ inv @ HIJ
        return val, grad, hess

    return Potential.from_taylor(n, evaluate, name=f"L[{','.join(map(str, idx))}]({w.name})")


def equations_of_state(w: Potential, q) -> np.ndarray:
    return -w.gradient(q)


def tlt_isometry_check(w: Potential, grid, I=None, in_domain=None, branch_tol: float = 1e-6) -> dict:
    """Compare the Hessian metric of ``w`` with the pulled-back Hessian metric of
    its Legendre transform, point by point on ``grid``.

    ``g = +Hess w(q)`` is the pullback of ``G_FR`` by the ``q``-embedding and
    ``g~ = -Hess f(p)`` is the metric of the transformed generating function
    (same sign rule). ``psi* g~ = D^T g~ D`` with ``D = dp/dq = -Hess w``
    restricted to the transformed rows. With ``I`` a proper subset the
    comparison is reported both with that sign and with the best global sign.

    Points are flagged, not compared, when the transformed Hessian block is
    singular, when its inertia differs from that at the first grid point, when
    the conjugate solve breaks down, or when the solve lands on another
    preimage of ``p(q)`` (the map ``q -> p`` is not injective there).
    """
    n = w.n
    idx = list(range(n)) if I is None else sorted(I)
    m = _mask(n, idx)
    rows = []
    flagged = []
    worst = 0.0
    worst_any = 0.0
    ref_inertia = None
    f = legendre_potential(w, idx, in_domain=in_domain)
    for q in grid:
        q = np.asarray(q, dtype=float)
        H = w.hessian(q)
        block = H[np.ix_(m, m)]
        if is_degenerate(block):
            flagged.append({"q": q.tolist(), "reason": "degenerate"})
            continue
        inertia = _inertia(block)
        if ref_inertia is None:
            ref_inertia = inertia
        elif inertia != ref_inertia:
            flagged.append({"q": q.tolist(), "reason": "inertia"})
            continue
        y = np.where(m, -w.gradient(q), q)
        try:
            _, gf, Hf = f.evaluate(y)
        except (LegendreBreakdown, ConvergenceError):
            flagged.append({"q": q.tolist(), "reason": "breakdown"})
            continue
        if np.max(np.abs(gf[m] - q[m])) > branch_tol * (1.0 + np.max(np.abs(q[m]))):
            flagged.append({"q": q.tolist(), "reason": "branch"})
            f = legendre_potential(w, idx, guess=q[m], in_domain=in_domain)
            continue
        D = np.eye(n)
        D[m] = -H[m]
        pulled = D.T @ (-Hf) @ D
        res = float(np.max(np.abs(pulled - H)))
        res_any = min(res, float(np.max(np.abs(-pulled - H))))
        worst = max(worst, res)
        worst_any = max(worst_any, res_any)
        rows.append({"q": q.tolist(), "residual": res, "residual_any_sign": res_any})
    return {
        "indices": idx,
        "total": len(idx) == n,
        "points": rows,
        "flagged": flagged,
        "max_residual": worst,
        "max_residual_any_sign": worst_any,
    }
