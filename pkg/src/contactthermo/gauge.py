"""Gauge transformations ``eta -> Omega eta`` of the para-contact metric structure
and the energy-to-entropy change of representation."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .chart import CovectorAt, ScalarField, TpsPoint, VectorAt
from .errors import DegenerateMetricError, DomainError, GaugeSingularError
from .legendre import LegendreSpec, embed, embedding_jacobian
from .metric import MetricAt, MixedTensorAt, StructureBundle, check_structure, default_bundle

OMEGA_MIN = 1e-12
T_MIN = 1e-3


def _sym(a, b):
    return 0.5 * (np.outer(a, b) + np.outer(b, a))


def gauge_transform(bundle: StructureBundle, omega: ScalarField) -> StructureBundle:
    """Structure ``(Omega eta, xi~, phi~, G~)`` associated with ``Omega eta``.

    With ``V = G^{-1}(d Omega)``, ``zeta = -phi(V) / (2 Omega)`` and
    ``z = G(zeta, .)``:

        xi~  = (xi + zeta) / Omega
        phi~ = phi + (V - xi(Omega) xi) eta / (2 Omega)      (X -> eta(X) [...])
        G~   = Omega (G - eta z - z eta) + Omega (Omega - 1 + G(zeta, zeta)) eta eta
    """

    @lru_cache(maxsize=256)
    def pieces(pt: TpsPoint):
        Om, dOm, _ = omega.evaluate(pt)
        if not np.isfinite(Om) or abs(Om) < OMEGA_MIN:
            raise GaugeSingularError(f"gauge factor {Om!r} vanishes at {pt}")
        dOm = dOm.components
        eta = bundle.eta(pt).components
        xi = bundle.reeb(pt).components
        Phi = bundle.phi(pt).matrix
        G = bundle.metric(pt).matrix
        A = bundle.deta(pt)
        try:
            V = np.linalg.solve(G, dOm)
        except np.linalg.LinAlgError as exc:
            raise DegenerateMetricError(f"metric is singular at {pt}") from exc
        zeta = -(Phi @ V) / (2 * Om)
        z = G @ zeta
        xi_t = (xi + zeta) / Om
        phi_t = Phi + np.outer(V - float(dOm @ xi) * xi, eta) / (2 * Om)
        G_t = (Om * (G - np.outer(eta, z) - np.outer(z, eta))
               + Om * (Om - 1 + float(zeta @ G @ zeta)) * np.outer(eta, eta))
        A_t = np.outer(dOm, eta) - np.outer(eta, dOm) + Om * A
        return Om * eta, xi_t, phi_t, G_t, A_t

    return StructureBundle(
        eta=lambda pt: CovectorAt(pt, pieces(pt)[0]),
        reeb=lambda pt: VectorAt(pt, pieces(pt)[1]),
        phi=lambda pt: MixedTensorAt(pt, pieces(pt)[2]),
        metric=lambda pt: MetricAt(pt, pieces(pt)[3]),
        deta=lambda pt: pieces(pt)[4],
        name=f"gauge[{omega.name}]({bundle.name})",
    )


def constant_factor(n: int, c: float) -> ScalarField:
    return ScalarField(n, lambda x: c + 0 * x[0], f"{c!r}")


def reciprocal(omega: ScalarField) -> ScalarField:
    return ScalarField(omega.n, lambda x: 1 / omega.func(x), f"1/({omega.name})")


def kernel_residual(bundle: StructureBundle, gauged: StructureBundle, pt: TpsPoint,
                    rng: np.random.Generator, count: int = 10) -> float:
    """Max ``|eta~(X)|`` over random ``X`` in ``ker eta``."""
    eta = bundle.eta(pt).components
    eta_t = gauged.eta(pt).components
    worst = 0.0
    for _ in range(count):
        X = rng.normal(size=pt.dim)
        X -= eta * (eta @ X) / (eta @ eta)
        worst = max(worst, abs(float(eta_t @ X)))
    return worst


# --- energy -> entropy representation -----------------------------------------

def entropy_gauge_factor() -> ScalarField:
    """``Omega = -1/T = 1/p_1`` with ``(w, q^1, q^2, p_1, p_2) = (U, S, V, -T, p)``."""
    return ScalarField(2, lambda x: 1 / x[3], "-1/T")


def entropy_metric_closed_form(pt: TpsPoint) -> np.ndarray:
    """``eta^S eta^S + dU (.) d(1/T) + dV (.) d(p/T)`` in the energy chart."""
    U, S, V, p1, p2 = pt.coords
    eta = np.array([1.0, p1, p2, 0.0, 0.0])
    eta_S = eta / p1
    dU = np.array([1.0, 0, 0, 0, 0])
    dV = np.array([0, 0, 1.0, 0, 0])
    d_invT = np.array([0, 0, 0, 1 / p1 ** 2, 0])
    d_pT = np.array([0, 0, 0, p2 / p1 ** 2, -1 / p1])
    return np.outer(eta_S, eta_S) + _sym(dU, d_invT) + _sym(dV, d_pT)


def entropy_metric_first_form(pt: TpsPoint) -> np.ndarray:
    """``-(1/T)(G^U + (1/T) eta^U (.) dT) + (1/T)(1/T + 1) eta^U eta^U``."""
    U, S, V, p1, p2 = pt.coords
    T = -p1
    eta = np.array([1.0, p1, p2, 0.0, 0.0])
    G = default_bundle().metric(pt).matrix
    dT = np.array([0, 0, 0, -1.0, 0])
    return -(G + _sym(eta, dT) / T) / T + (1 / T) * (1 / T + 1) * np.outer(eta, eta)


def default_grid(model, count: int = 5) -> list[tuple[float, float]]:
    """``(s, v)`` grid in a single-phase region of the model."""
    if model.name == "vdw":
        _, _, Tc = model.critical_closed_form()
        rows = []
        for T in np.linspace(1.2 * Tc, 2.0 * Tc, count):
            for v in np.linspace(2.0 * model.b, 10.0 * model.b, count):
                rows.append((float(model.entropy_vT(v, T)), float(v)))
        return rows
    return [(float(s), float(v)) for s in np.linspace(0.5, 2.0, count)
            for v in np.linspace(0.5, 3.0, count)]


def representation_change_demo(model, grid=None, tol: float = 1e-8) -> dict:
    """Gauge the energy-representation structure by ``Omega = -1/T`` and compare.

    Per grid point ``(s, v)``: the new Reeb field against ``d/dS``; the gauged
    metric against its closed form; the induced metrics ``g^S`` (pullback of the
    gauged metric) and ``g^U`` (pullback of ``G_FR``) against ``g^S = -(1/T) g^U``;
    and ``g^S`` against an independent route through the entropy Hessian.
    """
    grid = default_grid(model) if grid is None else grid
    spec = LegendreSpec.of_q(model.molar_energy)
    base = default_bundle()
    gauged = gauge_transform(base, entropy_gauge_factor())
    s_pot = model.molar_entropy
    rows = []
    pts = []
    for s, v in grid:
        x = np.array([s, v], dtype=float)
        pt = embed(spec, x)
        T = -pt.p[0]
        if not T > T_MIN:
            raise DomainError(f"temperature {T!r} at (s, v) = ({s!r}, {v!r}) is below T_min")
        pts.append(pt)
        D = embedding_jacobian(spec, x)
        gU = D @ base.metric(pt).matrix @ D.T
        gS = D @ gauged.metric(pt).matrix @ D.T
        # entropy Hessian at (u, v), moved to (s, v) by du = T ds - p dv
        J = np.array([[T, -pt.p[1]], [0.0, 1.0]])
        gS_indep = J.T @ s_pot.hessian([pt.w, v]) @ J
        nz = np.abs(gU) > 1e-12
        rows.append({
            "S": float(s),
            "V": float(v),
            "T": float(T),
            "reeb_residual": float(np.max(np.abs(gauged.reeb(pt).components - np.eye(5)[1]))),
            "metric_closed_form_residual": float(np.max(np.abs(
                gauged.metric(pt).matrix - entropy_metric_closed_form(pt)))),
            "metric_first_form_residual": float(np.max(np.abs(
                gauged.metric(pt).matrix - entropy_metric_first_form(pt)))),
            "conformal_residual": float(np.max(np.abs(gS + gU / T))),
            "ratio_deviation": float(np.max(np.abs(gS[nz] / gU[nz] + 1 / T))) if nz.any() else 0.0,
            "entropy_hessian_residual": float(np.max(np.abs(gS - gS_indep))),
        })
    structure = check_structure(gauged, pts, tol)
    keys = ("reeb_residual", "metric_closed_form_residual", "conformal_residual",
            "entropy_hessian_residual")
    worst = {k: max((r[k] for r in rows), default=0.0) for k in keys + ("metric_first_form_residual",)}
    return {
        "model": model.name,
        "rows": rows,
        "max": worst,
        "structure": structure,
        "pass": bool(all(worst[k] < tol for k in keys) and structure["pass"]),
    }
