"""The thermodynamic contact Hamiltonian ``H = -w`` and its processes.

``X_H = (-w, 0, -p)``: ``q`` is frozen while ``w`` and ``p`` relax as ``e^{-t}``.
``H`` is evaluated in the chart where the ``p`` are the extensive variables,
so ``w`` is the Gibbs-Duhem potential that vanishes on equilibrium states of
homogeneous systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .chart import TpsPoint
from .dynamics import (ContactHamiltonian, Trajectory, hamiltonian, ham_field,
                       integrate, jacobi_bracket)
from .metric import gfr_matrix

EQUILIBRIUM_TOL = 1e-10
T_INFINITY = 50.0
SIMPSON_PANELS = 10_000


def thermo_hamiltonian(pt: TpsPoint) -> float:
    return -pt.w


def thermo_contact_hamiltonian(n: int) -> ContactHamiltonian:
    def vf(x):
        out = -np.asarray(x, dtype=float).copy()
        out[1:1 + n] = 0.0
        return out
    return hamiltonian(n, lambda x: -x[0], "H=-w", vf)


def analytic_flow(x0: TpsPoint, t: float) -> TpsPoint:
    if t < 0:
        raise ValueError("the analytic flow is tabulated for t >= 0")
    if t == 0:
        return x0
    decay = math.exp(-t)
    return TpsPoint.make(x0.w * decay, x0.q, x0.p * decay)


class OrbitKind(str, Enum):
    EQUILIBRIUM = "equilibrium"
    ADMISSIBLE = "admissible"
    INADMISSIBLE = "inadmissible"


@dataclass(frozen=True)
class OrbitClass:
    kind: OrbitKind
    H0: float
    tol: float


def classify(x0: TpsPoint, tol: float = EQUILIBRIUM_TOL) -> OrbitClass:
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    H0 = thermo_hamiltonian(x0)
    if abs(H0) <= tol:
        kind = OrbitKind.EQUILIBRIUM
    elif H0 > 0:
        kind = OrbitKind.ADMISSIBLE
    else:
        kind = OrbitKind.INADMISSIBLE
    return OrbitClass(kind, H0, tol)


def _xh(x: np.ndarray) -> np.ndarray:
    n = (x.size - 1) // 2
    X = -x.copy()
    X[1:1 + n] = 0.0
    return X


def norm_identity_check(pt: TpsPoint) -> float:
    """``|G_FR(X_H, X_H) - H^2|``."""
    X = _xh(pt.coords)
    return abs(float(X @ gfr_matrix(pt.coords) @ X) - thermo_hamiltonian(pt) ** 2)


def entropy_production(x0: TpsPoint, t_f: float, panels: int = SIMPSON_PANELS) -> float:
    """Arc length ``int_0^t_f sqrt(G_FR(X_H, X_H)) dt`` along the analytic flow,
    by composite Simpson. ``t_f = inf`` is replaced by ``T_INFINITY``."""
    if t_f < 0:
        raise ValueError("t_f must be nonnegative")
    t_f = min(float(t_f), T_INFINITY)
    if t_f == 0:
        return 0.0
    if panels % 2:
        panels += 1
    ts = np.linspace(0.0, t_f, panels + 1)
    n = x0.n
    decay = np.exp(-ts)
    # states along the analytic flow and X_H = (-w, 0, -p) there
    w = x0.w * decay
    p = np.outer(decay, x0.p)
    Xw, Xq, Xp = -w, np.zeros((ts.size, n)), -p
    # G_FR(X, X) = eta(X)^2 - dq(X) . dp(X)
    eta_X = Xw + np.sum(p * Xq, axis=1)
    vals = np.sqrt(np.maximum(eta_X ** 2 - np.sum(Xq * Xp, axis=1), 0.0))
    h = t_f / panels
    return float(h / 3 * (vals[0] + vals[-1] + 4 * vals[1:-1:2].sum() + 2 * vals[2:-1:2].sum()))


def entropy_production_closed_form(H0: float, t_f: float) -> float:
    return H0 * (1.0 - math.exp(-min(float(t_f), T_INFINITY)))


@dataclass(frozen=True)
class ProcessResult:
    trajectory: Trajectory
    orbit: OrbitClass
    entropy_production: float
    q_drift_max: float
    h_law_residual: float


def run_process(x0: TpsPoint, t_f: float, dt: float = 1e-2, tol: float = EQUILIBRIUM_TOL) -> ProcessResult:
    """Integrate ``H = -w`` numerically and collect the process summary.

    ``h_law_residual`` is the max relative deviation of the recorded ``H`` from
    ``H0 e^{-t}``.
    """
    orbit = classify(x0, tol)
    tr = integrate(thermo_contact_hamiltonian(x0.n), x0, min(t_f, T_INFINITY), dt)
    n = x0.n
    drift = float(np.max(np.abs(tr.x[:, 1:1 + n] - x0.q))) if n else 0.0
    law = orbit.H0 * np.exp(-tr.t)
    scale = max(abs(orbit.H0), 1e-300)
    return ProcessResult(tr, orbit, entropy_production(x0, t_f), drift,
                         float(np.max(np.abs(tr.h - law)) / scale))


def integrability_report(x0: TpsPoint, t_f: float, dt: float = 1e-2, samples: int = 5) -> dict:
    """First integrals ``q^a`` along the flow, their brackets and independence."""
    n = x0.n
    tr = integrate(thermo_contact_hamiltonian(n), x0, t_f, dt)
    drift = float(np.max(np.abs(tr.x[:, 1:1 + n] - x0.q)))
    qs = [hamiltonian(n, lambda x, a=a: x[1 + a], f"q^{a + 1}") for a in range(n)]
    one = hamiltonian(n, lambda x: 1.0 + 0 * x[0], "1")
    idx = np.linspace(0, len(tr) - 1, samples).astype(int)
    bracket_max = 0.0
    ranks = []
    for k in idx:
        pt = TpsPoint(tr.x[k])
        for a in range(n):
            for b in range(a + 1, n):
                bracket_max = max(bracket_max, abs(jacobi_bracket(qs[a], qs[b], pt)))
        M = np.array([ham_field(h).components(pt.coords) for h in [one] + qs])
        ranks.append(int(np.linalg.matrix_rank(M)))
    return {
        "q_drift_max": drift,
        "bracket_max": bracket_max,
        "ranks": ranks,
        "independent": all(r == n + 1 for r in ranks),
    }


def fluctuation_entropy_link(g_hessian, dx) -> float:
    """``-(1/2) dx^T g dx`` for the entropy Hessian ``g`` at the reference state."""
    dx = np.asarray(dx, dtype=float)
    return float(-0.5 * dx @ np.asarray(g_hessian, dtype=float) @ dx)


def fluctuation_check(model, state, dx) -> dict:
    """Displace the extensive state ``X`` by ``dx`` at the reference conjugates
    ``q = dS/dX`` and compare ``H = -w = -(S(X + dx) - q.(X + dx))`` with the
    second-order prediction. ``dx`` may omit trailing components (set to zero)."""
    S = model.entropy
    X = np.asarray(state, dtype=float)
    d = np.zeros_like(X)
    d[:len(dx)] = dx
    S0, q, Hs = S.evaluate(X)
    gibbs_duhem = S0 - float(q @ X)
    H = -(S.value(X + d) - float(q @ (X + d)) - gibbs_duhem)
    link = fluctuation_entropy_link(Hs, d)
    return {"H": H, "link": link, "difference": abs(H - link), "gibbs_duhem": gibbs_duhem}
