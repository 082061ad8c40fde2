"""Ideal gas and Van der Waals fluid.

Both models expose the extensive entropy ``S(U, V, N)`` (homogeneous of
degree one), the molar entropy ``s(u, v)`` and the molar energy ``u(s, v)``
as :class:`~contactthermo.legendre.Potential` objects, plus the equations of
state. The Van der Waals model also has the coexistence machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import ad
from .errors import ConvergenceError, DomainError, PhaseRuleError
from .legendre import Potential, is_degenerate, _inertia


# --- ideal gas ---------------------------------------------------------------

@dataclass(frozen=True)
class IdealGasModel:
    c_v: float = 1.5
    R: float = 1.0
    s0: float = 0.0
    u0: float = 1.0
    v0: float = 1.0
    name: str = "ideal-gas"

    def __post_init__(self):
        if min(self.c_v, self.R, self.u0, self.v0) <= 0:
            raise DomainError("ideal gas constants c_v, R, u0, v0 must be positive")

    def s(self, u, v):
        return self.s0 + self.c_v * ad.log(u / self.u0) + self.R * ad.log(v / self.v0)

    @property
    def molar_entropy(self) -> Potential:
        return Potential(2, lambda x: self.s(x[0], x[1]), "s(u,v)")

    @property
    def entropy(self) -> Potential:
        return Potential(3, lambda X: X[2] * self.s(X[0] / X[2], X[1] / X[2]), "S(U,V,N)")

    def u(self, s, v):
        return self.u0 * ad.exp((s - self.s0 - self.R * ad.log(v / self.v0)) / self.c_v)

    @property
    def molar_energy(self) -> Potential:
        return Potential(2, lambda x: self.u(x[0], x[1]), "u(s,v)")

    def temperature_sv(self, s, v) -> float:
        return float(self.u(s, v)) / self.c_v

    def in_domain(self, state) -> bool:
        U, V, N = state
        return U > 0 and V > 0 and N > 0

    def intensive(self, state):
        """``(T, p, mu)`` at the extensive state ``(U, V, N)``."""
        U, V, N = (float(x) for x in state)
        if not self.in_domain(state):
            raise DomainError("ideal gas needs U, V, N > 0")
        T = U / (N * self.c_v)
        p = N * self.R * T / V
        mu = -T * (float(self.s(U / N, V / N)) - self.c_v - self.R)
        return T, p, mu


# --- Van der Waals -----------------------------------------------------------

@dataclass(frozen=True)
class CoexistenceResult:
    T: float
    p_coex: float
    v_liquid: float
    v_gas: float
    equal_area_residual: float
    mu_residual: float
    pressure_residual: float
    method: str

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class VdwModel:
    a: float = 1.0
    b: float = 1.0
    R: float = 1.0
    c: float = 1.5
    v0: float = 1.0
    T0: float = 1.0
    name: str = "vdw"

    def __post_init__(self):
        if min(self.a, self.b, self.R, self.c, self.v0, self.T0) <= 0:
            raise DomainError("Van der Waals constants must be positive")

    # equations of state on (v, T)
    def pressure(self, v, T):
        return self.R * T / (v - self.b) - self.a / v ** 2

    def dpdv(self, v, T):
        return -self.R * T / (v - self.b) ** 2 + 2 * self.a / v ** 3

    def d2pdv2(self, v, T):
        return 2 * self.R * T / (v - self.b) ** 3 - 6 * self.a / v ** 4

    def helmholtz(self, v, T):
        return (-self.R * T * ad.log((v - self.b) / self.v0) - self.a / v
                - self.c * T * ad.log(T / self.T0))

    def entropy_vT(self, v, T):
        return self.R * ad.log((v - self.b) / self.v0) + self.c * ad.log(T / self.T0) + self.c

    def energy_vT(self, v, T):
        return self.c * T - self.a / v

    def chemical_potential(self, v, T):
        return self.helmholtz(v, T) + self.pressure(v, T) * v

    def pressure_integral(self, v1, v2, T) -> float:
        """Closed-form ``int_{v1}^{v2} p dv`` along an isotherm."""
        return (self.R * T * math.log((v2 - self.b) / (v1 - self.b))
                + self.a * (1.0 / v2 - 1.0 / v1))

    def isotherm_potential(self, T: float) -> Potential:
        """``w(v) = f(v, T)``; its equation of state ``-dw/dv`` is the pressure."""
        return Potential(1, lambda x: self.helmholtz(x[0], T), f"f(v; T={T!r})")

    # fundamental relations
    def s(self, u, v):
        T = (u + self.a / v) / self.c
        return self.entropy_vT(v, T)

    @property
    def molar_entropy(self) -> Potential:
        return Potential(2, lambda x: self.s(x[0], x[1]), "s(u,v)")

    @property
    def entropy(self) -> Potential:
        return Potential(3, lambda X: X[2] * self.s(X[0] / X[2], X[1] / X[2]), "S(U,V,N)")

    def temperature_sv(self, s, v):
        return self.T0 * ad.exp((s - self.c - self.R * ad.log((v - self.b) / self.v0)) / self.c)

    def u(self, s, v):
        return self.c * self.temperature_sv(s, v) - self.a / v

    @property
    def molar_energy(self) -> Potential:
        return Potential(2, lambda x: self.u(x[0], x[1]), "u(s,v)")

    def in_domain(self, state) -> bool:
        U, V, N = state
        return N > 0 and V > N * self.b and U + self.a * N * N / V > 0

    def intensive(self, state):
        U, V, N = (float(x) for x in state)
        if not self.in_domain(state):
            raise DomainError("Van der Waals state needs V > N b and T > 0")
        v, u = V / N, U / N
        T = (u + self.a / v) / self.c
        return T, float(self.pressure(v, T)), float(self.chemical_potential(v, T))

    # criticality
    def critical_closed_form(self):
        return 3 * self.b, self.a / (27 * self.b ** 2), 8 * self.a / (27 * self.R * self.b)


def critical_point(model: VdwModel):
    """Solve ``dp/dv = d2p/dv2 = 0``.

    The first condition gives ``T(v)``; the second is then a scalar equation in
    ``v`` with a sign change on ``(b, infinity)``.
    """
    b = model.b

    def T_of(v):
        return 2 * model.a * (v - b) ** 2 / (model.R * v ** 3)

    def g(v):
        return model.d2pdv2(v, T_of(v)) * v ** 4 / model.a

    lo, hi = b * (1 + 1e-6), 10 * b
    while g(hi) > 0:
        hi *= 2
    vc = brentq(g, lo, hi, xtol=1e-15 * b, rtol=1e-15, maxiter=500)
    Tc = T_of(vc)
    return vc, float(model.pressure(vc, Tc)), Tc


def spinodal(model: VdwModel, T: float):
    """The two roots of ``dp/dv = 0`` at temperature ``T`` (``0 < T < T_c``)."""
    _, _, Tc = model.critical_closed_form()
    if not 0 < T < Tc:
        raise DomainError(f"no spinodal at T={T!r}; need 0 < T < T_c={Tc!r}")
    b = model.b
    # R T v^3 = 2 a (v - b)^2; the ratio of both sides is minimal at v = 3b
    h = lambda v: model.R * T * v ** 3 - 2 * model.a * (v - b) ** 2
    vm = 3 * b
    hi = 4 * b
    while h(hi) <= 0:
        hi *= 2
    v_minus = brentq(h, b * (1 + 1e-14), vm, xtol=1e-15 * b, rtol=1e-15)
    v_plus = brentq(h, vm, hi, xtol=1e-15 * b, rtol=1e-15)
    return v_minus, v_plus


def _coexistence_residuals(model: VdwModel, T, vl, vg):
    pl, pg = float(model.pressure(vl, T)), float(model.pressure(vg, T))
    p = 0.5 * (pl + pg)
    area = model.pressure_integral(vl, vg, T) - p * (vg - vl)
    mu = float(model.chemical_potential(vl, T) - model.chemical_potential(vg, T))
    return p, abs(area), abs(mu), abs(pl - pg)


def _isotherm_roots(model: VdwModel, T, p, v_minus, v_plus):
    b = model.b
    F = lambda v: float(model.pressure(v, T)) - p
    vl = brentq(F, b * (1 + 1e-14), v_minus, xtol=1e-16 * b, rtol=1e-15)
    hi = 2 * v_plus
    while F(hi) > 0:
        hi *= 2
    vg = brentq(F, v_plus, hi, xtol=1e-16 * b, rtol=1e-15)
    return vl, vg


def maxwell_oracle(model: VdwModel, T: float) -> CoexistenceResult:
    """Coexistence by bisection on the pressure; each trial pressure gets its
    liquid and gas roots by bracketing and the area difference by quadrature."""
    v_minus, v_plus = spinodal(model, T)
    p_hi = float(model.pressure(v_plus, T))
    p_lo = max(float(model.pressure(v_minus, T)), 1e-300)

    def area_diff(p):
        vl, vg = _isotherm_roots(model, T, p, v_minus, v_plus)
        val, _ = quad(lambda v: float(model.pressure(v, T)) - p, vl, vg,
                      points=[v_minus, v_plus], epsabs=1e-14, epsrel=1e-13, limit=200)
        return val

    lo, hi = p_lo, p_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if area_diff(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * p_hi:
            break
    p = 0.5 * (lo + hi)
    vl, vg = _isotherm_roots(model, T, p, v_minus, v_plus)
    _, area, mu, dp = _coexistence_residuals(model, T, vl, vg)
    return CoexistenceResult(T, p, vl, vg, area, mu, dp, "bisection")


def _maxwell_newton(model: VdwModel, T, vl, vg, v_minus, v_plus, max_iter=200, tol=1e-13):
    """Damped Newton on ``p(v_l) = p(v_g)``, ``mu(v_l) = mu(v_g)``.

    ``dmu/dv = v dp/dv`` gives the Jacobian in closed form.
    """
    b = model.b
    _, p_c, _ = model.critical_closed_form()
    scale = np.array([p_c, p_c * 3 * b])

    def F(x):
        l, g = x
        return np.array([
            float(model.pressure(l, T) - model.pressure(g, T)),
            float(model.chemical_potential(l, T) - model.chemical_potential(g, T)),
        ]) / scale

    x = np.array([vl, vg], dtype=float)
    r = F(x)
    for _ in range(max_iter):
        rn = float(np.linalg.norm(r))
        if rn < tol:
            return x
        dl, dg = float(model.dpdv(x[0], T)), float(model.dpdv(x[1], T))
        Jm = np.array([[dl, -dg], [x[0] * dl, -x[1] * dg]]) / scale[:, None]
        step = np.linalg.solve(Jm, -r)
        lam = 1.0
        while lam > 1e-14:
            xt = x + lam * step
            if b < xt[0] < v_minus and xt[1] > v_plus:
                rt = F(xt)
                if np.linalg.norm(rt) <= (1 - 1e-4 * lam) * rn:
                    break
            lam *= 0.5
        else:
            raise ConvergenceError("Maxwell Newton line search failed", residual=rn, iterate=x)
        x, r = xt, rt
    raise ConvergenceError("Maxwell Newton did not converge",
                           residual=float(np.linalg.norm(r)), iterate=x)


def maxwell_construction(model: VdwModel, T: float) -> CoexistenceResult:
    v_minus, v_plus = spinodal(model, T)
    b = model.b
    method = "newton"
    try:
        x = _maxwell_newton(model, T, b + 0.1 * (v_minus - b), 10 * v_plus, v_minus, v_plus)
    except ConvergenceError:
        seed = maxwell_oracle(model, T)
        method = "newton-from-bisection"
        x = _maxwell_newton(model, T, seed.v_liquid, seed.v_gas, v_minus, v_plus)
    vl, vg = float(x[0]), float(x[1])
    p, area, mu, dp = _coexistence_residuals(model, T, vl, vg)
    return CoexistenceResult(T, p, vl, vg, area, mu, dp, method)


def coexistence_locus(model: VdwModel, T_grid) -> list[dict]:
    """Coexistence data per temperature with reduced units and the
    Clausius-Clapeyron slope ``ds/dv`` across the tie-line."""
    vc, pc, Tc = model.critical_closed_form()
    rows = []
    for T in T_grid:
        res = maxwell_construction(model, float(T))
        ds = float(model.entropy_vT(res.v_gas, T) - model.entropy_vT(res.v_liquid, T))
        row = res.as_dict()
        row.update({
            "T_r": T / Tc,
            "p_r": res.p_coex / pc,
            "v_liquid_r": res.v_liquid / vc,
            "v_gas_r": res.v_gas / vc,
            "clapeyron_slope": ds / (res.v_gas - res.v_liquid),
        })
        rows.append(row)
    return rows


def gibbs_phase_rule(C: int, r: int) -> int:
    """Dimension ``C - r + 2`` of an ``r``-phase coexistence region."""
    if int(C) != C or int(r) != r or C < 1 or r < 1:
        raise PhaseRuleError("need integers C >= 1 and r >= 1")
    N = int(C) - int(r) + 2
    if N < 0:
        raise PhaseRuleError(f"{r} phases of {C} species cannot coexist")
    return N


# --- homogeneity and ensembles -----------------------------------------------

def euler_gibbs_duhem_check(model, state, lambdas=(0.5, 2.0, 7.0)) -> dict:
    S = model.entropy
    X = np.asarray(state, dtype=float)
    S0 = S.value(X)
    homog = max(abs(S.value(lam * X) - lam * S0) for lam in lambdas)
    T, p, mu = model.intensive(X)
    U, V, N = X
    euler = abs(S0 - (U / T + p * V / T - mu * N / T))
    q = S.gradient(X)
    w_mupT = S0 - float(q @ X)
    return {
        "S": S0,
        "homogeneity_residual": homog,
        "euler_residual": euler,
        "w_mupT": w_mupT,
        "intensive": {"T": T, "p": p, "mu": mu},
    }


ENSEMBLES = (
    ("NVU", (), "S"),
    ("NVT", (0,), "-beta F"),
    ("NpT", (0, 1), "-beta G"),
    ("muVT", (0, 2), "-beta Phi"),
    ("mupT", (0, 1, 2), "w_mupT"),
)


def ensemble_potentials(model, state, h: float = 1e-5, rng_seed: int = 0) -> list[dict]:
    """Massieu potentials ``w_I = S - sum_I X_a dS/dX_a`` of the extensive state
    ``X = (U, V, N)`` with conjugates ``q = (beta, beta p, -beta mu)``.

    Each entry carries a First-Law residual: along a random line through the
    state, ``d w_I`` is compared with ``-X_I dq_I + q_J dX_J``. Entries whose
    entropy block over ``I`` is singular or not negative definite are flagged.
    """
    S = model.entropy
    X = np.asarray(state, dtype=float)
    S0, q, H = S.evaluate(X)
    d = np.random.default_rng(rng_seed).normal(size=3)
    d /= np.linalg.norm(d)
    step = h * max(1.0, float(np.linalg.norm(X)))

    def w_I(Y, I):
        val, g, _ = S.evaluate(Y)
        return val - sum(Y[a] * g[a] for a in I)

    dq = H @ d
    rows = []
    for label, I, symbol in ENSEMBLES:
        m = np.zeros(3, dtype=bool)
        m[list(I)] = True
        value = S0 - float(np.sum(X[m] * q[m]))
        slope_fd = (w_I(X + step * d, I) - w_I(X - step * d, I)) / (2 * step)
        slope_law = -float(np.sum(X[m] * dq[m])) + float(np.sum(q[~m] * d[~m]))
        flag = ""
        if I:
            block = H[np.ix_(m, m)]
            if is_degenerate(block):
                flag = "degenerate"
            elif _inertia(block)[0] > 0:
                flag = "non-concave"
        rows.append({
            "ensemble": label,
            "potential": symbol,
            "value": value,
            "first_law_residual": abs(slope_fd - slope_law),
            "flag": flag,
        })
    return rows
