"""Fisher-Rao metric on the phase space and its para-contact structure.

``G_FR = eta (x) eta - dq^i (.) dp_i`` has signature ``(n+1, n)``. Together
with ``eta``, the Reeb field and the tensor ``phi`` it forms a para-contact
metric structure (the ``epsilon = -1`` branch). Curvature checks here are
numerical: Christoffel symbols and Ricci tensors come from central
differences of the metric components.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .chart import (CovectorAt, TpsPoint, VectorAt, VectorFieldDef, deta_matrix,
                    eta_covector, jacobian_fd, p_index, q_index, reeb)
from .errors import DegenerateMetricError, DomainError, UnsupportedDimensionError

STRUCTURE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MetricAt:
    base: TpsPoint
    matrix: np.ndarray

    def __call__(self, X: VectorAt, Y: VectorAt) -> float:
        return float(X.components @ self.matrix @ Y.components)


@dataclass(frozen=True, eq=False)
class MixedTensorAt:
    """A (1,1) tensor; ``matrix @ X`` gives the image of the vector ``X``."""
    base: TpsPoint
    matrix: np.ndarray

    def __call__(self, X: VectorAt) -> VectorAt:
        return VectorAt(self.base, self.matrix @ X.components)


def gfr_matrix(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = (x.size - 1) // 2
    eta = np.zeros(x.size)
    eta[0] = 1.0
    eta[1:1 + n] = x[1 + n:]
    G = np.outer(eta, eta)
    for a in range(n):
        i, j = q_index(n, a), p_index(n, a)
        G[i, j] -= 0.5
        G[j, i] -= 0.5
    return G


def gfr(pt: TpsPoint) -> MetricAt:
    return MetricAt(pt, gfr_matrix(pt.coords))


def signature(pt: TpsPoint, metric: Callable[[TpsPoint], MetricAt] = gfr) -> tuple[int, int]:
    ev = np.linalg.eigvalsh(metric(pt).matrix)
    if np.any(np.abs(ev) < 1e-10):
        raise DegenerateMetricError(f"metric has a zero eigenvalue at {pt}")
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


def _require_positive_p(pt: TpsPoint) -> None:
    if np.any(pt.p <= 0):
        raise DomainError(
            f"orthonormal frames need p_i > 0 (got p = {pt.p.tolist()}); "
            "energy-representation points with p_1 = -T fall outside this domain")


def orthonormal_coframe(pt: TpsPoint) -> list[CovectorAt]:
    """``[eta, theta_+^1..theta_+^n, theta_-^1..theta_-^n]``.

    ``theta_pm^i = (1 / (2 sqrt(p_i))) (-p_i dq^i +- dp_i)``.
    """
    _require_positive_p(pt)
    n = pt.n
    plus, minus = [], []
    for i in range(n):
        pi = pt.p[i]
        c = np.sqrt(pi) / (2.0 * pi)
        tp = np.zeros(pt.dim)
        tm = np.zeros(pt.dim)
        tp[q_index(n, i)] = tm[q_index(n, i)] = -c * pi
        tp[p_index(n, i)] = c
        tm[p_index(n, i)] = -c
        plus.append(CovectorAt(pt, tp))
        minus.append(CovectorAt(pt, tm))
    return [eta_covector(pt), *plus, *minus]


def canonical_basis(pt: TpsPoint) -> list[VectorAt]:
    """``[xi, e_+^1..e_+^n, e_-^1..e_-^n]`` with
    ``e_pm^i = sqrt(p_i) (Q_i / p_i +- P^i)``; dual to :func:`orthonormal_coframe`."""
    _require_positive_p(pt)
    n = pt.n
    plus, minus = [], []
    for i in range(n):
        pi = pt.p[i]
        s = np.sqrt(pi)
        Q = np.zeros(pt.dim)
        Q[0] = pi
        Q[q_index(n, i)] = -1.0
        P = np.zeros(pt.dim)
        P[p_index(n, i)] = 1.0
        plus.append(VectorAt(pt, s * (Q / pi + P)))
        minus.append(VectorAt(pt, s * (Q / pi - P)))
    return [reeb(pt), *plus, *minus]


def phi(pt: TpsPoint) -> MixedTensorAt:
    """``phi = -sum_i (e_+^i (x) theta_-^i + e_-^i (x) theta_+^i)`` assembled from frames."""
    n = pt.n
    cof = orthonormal_coframe(pt)
    frame = canonical_basis(pt)
    M = np.zeros((pt.dim, pt.dim))
    for i in range(n):
        ep, em = frame[1 + i].components, frame[1 + n + i].components
        tp, tm = cof[1 + i].components, cof[1 + n + i].components
        M -= np.outer(ep, tm) + np.outer(em, tp)
    return MixedTensorAt(pt, M)


def phi_matrix(x: np.ndarray) -> np.ndarray:
    """Coordinate form of ``phi``: ``d/dw -> 0``, ``d/dq^a -> Q_a``, ``d/dp_a -> d/dp_a``.

    Agrees with :func:`phi` where ``p > 0`` and stays polynomial for any ``p``.
    """
    x = np.asarray(x, dtype=float)
    n = (x.size - 1) // 2
    M = np.zeros((x.size, x.size))
    for a in range(n):
        qa, pa = q_index(n, a), p_index(n, a)
        M[0, qa] = x[pa]
        M[qa, qa] = -1.0
        M[pa, pa] = 1.0
    return M


def phi_coordinate(pt: TpsPoint) -> MixedTensorAt:
    return MixedTensorAt(pt, phi_matrix(pt.coords))


@dataclass(frozen=True)
class StructureBundle:
    """Pointwise evaluators of ``(eta, xi, phi, G)`` plus ``d eta`` as a matrix
    ``A`` with ``d eta(X, Y) = X @ A @ Y``."""
    eta: Callable[[TpsPoint], CovectorAt]
    reeb: Callable[[TpsPoint], VectorAt]
    phi: Callable[[TpsPoint], MixedTensorAt]
    metric: Callable[[TpsPoint], MetricAt]
    deta: Callable[[TpsPoint], np.ndarray]
    name: str = field(default="")

    def replace(self, **kw) -> "StructureBundle":
        d = dict(eta=self.eta, reeb=self.reeb, phi=self.phi, metric=self.metric,
                 deta=self.deta, name=self.name)
        d.update(kw)
        return StructureBundle(**d)


def default_bundle() -> StructureBundle:
    return StructureBundle(
        eta=eta_covector,
        reeb=reeb,
        phi=phi_coordinate,
        metric=gfr,
        deta=lambda pt: deta_matrix(pt.n),
        name="fisher-rao",
    )


def structure_residuals(bundle: StructureBundle, pt: TpsPoint) -> dict[str, float]:
    eta = bundle.eta(pt).components
    xi = bundle.reeb(pt).components
    Phi = bundle.phi(pt).matrix
    G = bundle.metric(pt).matrix
    A = bundle.deta(pt)
    I = np.eye(pt.dim)
    return {
        "reeb_normalization": abs(eta @ xi - 1.0),
        "reeb_deta": float(np.max(np.abs(xi @ A))),
        "phi_xi": float(np.max(np.abs(Phi @ xi))),
        "phi_squared": float(np.max(np.abs(Phi @ Phi - (I - np.outer(xi, eta))))),
        # G(phi X, phi Y) = -[G(X, Y) - eta(X) eta(Y)]
        "compatibility": float(np.max(np.abs(Phi.T @ G @ Phi + G - np.outer(eta, eta)))),
        # (1/2) d eta(X, Y) = G(X, phi Y)
        "associated": float(np.max(np.abs(0.5 * A - G @ Phi))),
    }


def check_structure(bundle: StructureBundle, pts, tol: float = STRUCTURE_TOL) -> dict:
    """Max residual of every para-contact metric identity over ``pts``."""
    worst: dict[str, float] = {}
    for pt in pts:
        for k, v in structure_residuals(bundle, pt).items():
            worst[k] = max(worst.get(k, 0.0), v)
    return {
        "points": len(pts),
        "tolerance": tol,
        "residuals": {k: {"max": v, "pass": bool(v < tol)} for k, v in worst.items()},
        "pass": bool(all(v < tol for v in worst.values())),
    }


# --- numerical Riemannian geometry ------------------------------------------

def metric_derivatives(metric_fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                       h: float) -> np.ndarray:
    """``dG[k, i, j] = d G_ij / d x^k`` by central differences."""
    x = np.asarray(x, dtype=float)
    out = np.empty((x.size, x.size, x.size))
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        out[k] = (metric_fn(x + e) - metric_fn(x - e)) / (2.0 * h)
    return out


def christoffel(metric_fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                rel_step: float = 1e-4) -> np.ndarray:
    """``Gamma[i, j, k]`` (upper index first) of the Levi-Civita connection."""
    x = np.asarray(x, dtype=float)
    h = rel_step * max(1.0, float(np.linalg.norm(x)))
    dG = metric_derivatives(metric_fn, x, h)
    Ginv = np.linalg.inv(metric_fn(x))
    # lower[l, j, k] = (d_j G_lk + d_k G_lj - d_l G_jk) / 2
    lower = 0.5 * (np.transpose(dG, (1, 0, 2)) + np.transpose(dG, (1, 2, 0)) - dG)
    return np.einsum("il,ljk->ijk", Ginv, lower)


def ricci(metric_fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
          outer_step: float = 1e-4, inner_step: float = 1e-4) -> np.ndarray:
    """Ricci tensor ``R_bd = d_a Gamma^a_bd - d_d Gamma^a_ba + Gamma^a_ae Gamma^e_bd
    - Gamma^a_de Gamma^e_ba`` from nested central differences."""
    x = np.asarray(x, dtype=float)
    m = x.size
    h = outer_step * max(1.0, float(np.linalg.norm(x)))
    Gam = christoffel(metric_fn, x, inner_step)
    dGam = np.empty((m, m, m, m))  # dGam[c, i, j, k] = d_c Gamma^i_jk
    for c in range(m):
        e = np.zeros(m)
        e[c] = h
        dGam[c] = (christoffel(metric_fn, x + e, inner_step)
                   - christoffel(metric_fn, x - e, inner_step)) / (2.0 * h)
    term1 = np.einsum("aabd->bd", dGam)
    term2 = np.einsum("daba->bd", dGam)
    term3 = np.einsum("aae,ebd->bd", Gam, Gam)
    term4 = np.einsum("ade,eba->bd", Gam, Gam)
    return term1 - term2 + term3 - term4


def _metric_fn(bundle: StructureBundle) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: bundle.metric(TpsPoint(x)).matrix


def lie_derivative_metric(metric_fn: Callable[[np.ndarray], np.ndarray],
                          field_fn: Callable[[np.ndarray], np.ndarray],
                          x: np.ndarray, rel_step: float = 1e-5) -> np.ndarray:
    """``(L_X G)_ij = X^k d_k G_ij + G_kj d_i X^k + G_ik d_j X^k``."""
    x = np.asarray(x, dtype=float)
    h = rel_step * max(1.0, float(np.linalg.norm(x)))
    X = np.asarray(field_fn(x), dtype=float)
    dG = metric_derivatives(metric_fn, x, h)
    DX = jacobian_fd(field_fn, x, h)  # DX[k, i] = d_i X^k
    G = metric_fn(x)
    return np.einsum("k,kij->ij", X, dG) + DX.T @ G + G @ DX


def killing_residual(bundle: StructureBundle, pt: TpsPoint,
                     field_def: VectorFieldDef | None = None) -> float:
    """Max-norm of ``L_X G``; ``X`` defaults to the bundle's Reeb field."""
    if field_def is None:
        field_fn = lambda x: bundle.reeb(TpsPoint(x)).components
    else:
        field_fn = field_def.components
    L = lie_derivative_metric(_metric_fn(bundle), field_fn, pt.coords)
    return float(np.max(np.abs(L)))


def nabla_xi(bundle: StructureBundle, pt: TpsPoint, rel_step: float = 1e-4) -> np.ndarray:
    """``(nabla xi)^i_j = d_j xi^i + Gamma^i_jk xi^k`` as a (1,1) matrix."""
    x = pt.coords
    xi_fn = lambda y: bundle.reeb(TpsPoint(y)).components
    Gam = christoffel(_metric_fn(bundle), x, rel_step)
    h = rel_step * max(1.0, float(np.linalg.norm(x)))
    return jacobian_fd(xi_fn, x, h) + np.einsum("ijk,k->ij", Gam, xi_fn(x))


def nabla_xi_check(bundle: StructureBundle, pt: TpsPoint) -> float:
    """Max-norm of ``nabla xi + phi``."""
    return float(np.max(np.abs(nabla_xi(bundle, pt) + bundle.phi(pt).matrix)))


def eta_einstein_target(pt: TpsPoint) -> np.ndarray:
    eta = eta_covector(pt).components
    return -(2 * pt.n + 2) * np.outer(eta, eta) + 2.0 * gfr_matrix(pt.coords)


def eta_einstein_residual(pt: TpsPoint) -> float:
    """Max-norm of ``Ric + (2n+2) eta (x) eta - 2 G_FR``."""
    if pt.n > 2:
        raise UnsupportedDimensionError("finite-difference Ricci check implemented for n <= 2")
    Ric = ricci(gfr_matrix, pt.coords)
    return float(np.max(np.abs(Ric - eta_einstein_target(pt))))


def isometry_generators(n_or_pt) -> list[VectorFieldDef]:
    """The ``n^2`` boosts ``p_i d/dp_j - q^j d/dq^i`` followed by the ``2n+1``
    translations ``d/dw, d/dq^i, d/dp_i - q^i d/dw``."""
    n = n_or_pt.n if isinstance(n_or_pt, TpsPoint) else int(n_or_pt)
    dim = 2 * n + 1
    gens = []

    def boost(i, j):
        def f(x):
            c = np.zeros(dim)
            c[p_index(n, j)] += x[p_index(n, i)]
            c[q_index(n, i)] -= x[q_index(n, j)]
            return c
        return VectorFieldDef(f, f"boost[{i + 1},{j + 1}]")

    for i in range(n):
        for j in range(n):
            gens.append(boost(i, j))

    gens.append(VectorFieldDef(lambda x: np.eye(dim)[0], "d/dw"))
    for i in range(n):
        gens.append(VectorFieldDef(lambda x, i=i: np.eye(dim)[q_index(n, i)], f"d/dq^{i + 1}"))
    for i in range(n):
        def f(x, i=i):
            c = np.zeros(dim)
            c[p_index(n, i)] = 1.0
            c[0] = -x[q_index(n, i)]
            return c
        gens.append(VectorFieldDef(f, f"d/dp_{i + 1} - q^{i + 1} d/dw"))
    return gens
