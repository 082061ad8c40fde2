"""Contact Hamiltonian vector fields, Jacobi brackets and a fixed-step RK4 flow."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import ad
from .chart import (ScalarField, TpsPoint, VectorAt, VectorFieldDef, eta_covector,
                    fd_step, heisenberg_basis, jacobian_fd, lie_bracket)
from .errors import DivergenceError, NumericError
from .legendre import Potential
from .metric import gfr_matrix, lie_derivative_metric

OVERFLOW_GUARD = 1e12


@dataclass(frozen=True)
class ContactHamiltonian:
    """Contact Hamiltonian ``h``; ``vf`` optionally supplies ``X_h`` in closed form
    (used by the integrator, checked against :func:`ham_vf` in tests)."""
    h: ScalarField
    vf: Callable[[np.ndarray], np.ndarray] | None = None

    @property
    def n(self) -> int:
        return self.h.n

    @property
    def name(self) -> str:
        return self.h.name

    def __call__(self, pt: TpsPoint) -> float:
        return self.h(pt)


def hamiltonian(n: int, func, name: str = "", vf=None) -> ContactHamiltonian:
    return ContactHamiltonian(ScalarField(n, func, name), vf)


def _as_ham(h) -> ContactHamiltonian:
    return h if isinstance(h, ContactHamiltonian) else ContactHamiltonian(h)


def _ham_components(h: ContactHamiltonian, x: np.ndarray) -> np.ndarray:
    n = (x.size - 1) // 2
    val, g = ad.value_and_gradient(h.h.func, x)
    p = x[1 + n:]
    dw, dq, dp = g[0], g[1:1 + n], g[1 + n:]
    out = np.empty(x.size)
    out[0] = float(val) - float(p @ dp)
    out[1:1 + n] = dp
    out[1 + n:] = p * dw - dq
    return out


def ham_vf(h, pt: TpsPoint) -> VectorAt:
    """``X_h = (h - p dh/dp) d/dw + dh/dp d/dq + (p dh/dw - dh/dq) d/dp``."""
    return VectorAt(pt, _ham_components(_as_ham(h), pt.coords))


def ham_field(h) -> VectorFieldDef:
    h = _as_ham(h)
    return VectorFieldDef(lambda x: _ham_components(h, x), f"X[{h.name}]")


def heisenberg_form_vf(h, pt: TpsPoint) -> VectorAt:
    """``X_h = h xi + Q_i(h) P^i - P^i(h) Q_i`` in the Heisenberg frame."""
    h = _as_ham(h)
    n = pt.n
    frame = heisenberg_basis(pt)
    xi, P, Q = frame[0], frame[1:1 + n], frame[1 + n:]
    val, dh, _ = h.h.evaluate(pt)
    g = dh.components
    out = val * xi.components
    for i in range(n):
        Qh = float(Q[i].components @ g)
        Ph = float(P[i].components @ g)
        out = out + Qh * P[i].components - Ph * Q[i].components
    return VectorAt(pt, out)


def jacobi_bracket(f, g, pt: TpsPoint) -> float:
    """``{f, g} = eta([X_f, X_g])`` with a finite-difference Lie bracket."""
    Xf, Xg = ham_field(f), ham_field(g)
    if f is g:
        return 0.0
    br = lie_bracket(Xf, Xg, pt)
    val = float(eta_covector(pt).components @ br.components)
    if not math.isfinite(val):
        raise NumericError(f"non-finite Jacobi bracket at {pt}")
    return val


def lie_eta(h, pt: TpsPoint) -> np.ndarray:
    """Components of ``L_{X_h} eta`` from ``X^k d_k eta_j + eta_k d_j X^k``."""
    x = pt.coords
    n = pt.n
    F = ham_field(h)
    DX = jacobian_fd(F.components, x, fd_step(x))
    X = F.components(x)
    eta = eta_covector(pt).components
    # d_k eta_j: only d eta_{q^a} / d p_a = 1
    deta = np.zeros((x.size, x.size))
    for a in range(n):
        deta[1 + a, 1 + n + a] = 1.0
    return deta @ X + DX.T @ eta


def lie_eta_residual(h, pt: TpsPoint) -> float:
    """Max-norm of ``L_{X_h} eta - xi(h) eta``."""
    h = _as_ham(h)
    xi_h = float(h.h.gradient(pt).components[0])
    return float(np.max(np.abs(lie_eta(h, pt) - xi_h * eta_covector(pt).components)))


def mrugala_hamiltonians(f: Potential, I: Iterable[int] = ()) -> list[ContactHamiltonian]:
    """``[h^0] + [h^i, i in I] + [h_j, j not in I]`` for the Legendre submanifold of ``f``:

        h^0 = w - f + p_i df/dp_i,   h^i = q^i - df/dp_i,   h_j = p_j + df/dq^j.
    """
    n = f.n
    I = sorted(set(I))

    def base(x):
        return [x[1 + n + a] if a in I else x[1 + a] for a in range(n)]

    def derivs(x):
        return ad.value_and_gradient(f.func, base(x))

    def h0(x):
        val, g = derivs(x)
        out = x[0] - val
        for i in I:
            out = out + x[1 + n + i] * g[i]
        return out

    hams = [hamiltonian(n, h0, "h0")]
    for a in range(n):
        if a in I:
            hams.append(hamiltonian(n, lambda x, a=a: x[1 + a] - derivs(x)[1][a], f"h^{a + 1}"))
        else:
            hams.append(hamiltonian(n, lambda x, a=a: x[1 + n + a] + derivs(x)[1][a], f"h_{a + 1}"))
    return hams


def lt_generator(n: int) -> ContactHamiltonian:
    """``h_LT = (1/2) sum (q^2 + p^2)``, generator of infinitesimal Legendre maps."""
    def h(x):
        out = 0.0
        for k in range(1, 2 * n + 1):
            out = out + 0.5 * x[k] * x[k]
        return out

    def vf(x):
        q, p = x[1:1 + n], x[1 + n:]
        return np.concatenate([[0.5 * float(q @ q - p @ p)], p, -q])

    return hamiltonian(n, h, "h_LT", vf)


def lt_metric_comparison(pt: TpsPoint) -> dict:
    """Numerical ``L_{X_LT} G_FR`` against ``-(dq dq - dp dp)`` and its negative."""
    n = pt.n
    F = ham_field(lt_generator(n))
    L = lie_derivative_metric(gfr_matrix, F.components, pt.coords)
    ref = np.zeros((pt.dim, pt.dim))
    for a in range(n):
        ref[1 + a, 1 + a] = -1.0
        ref[1 + n + a, 1 + n + a] = 1.0
    r_minus = float(np.max(np.abs(L - ref)))
    r_plus = float(np.max(np.abs(L + ref)))
    return {
        "lie_derivative": L,
        "residual_vs_reference": r_minus,
        "residual_vs_negated": r_plus,
        "sign": 1 if r_minus <= r_plus else -1,
    }


# --- integration ---------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        if not len(self.t) == len(self.x) == len(self.h):
            raise ValueError("trajectory arrays differ in length")

    @property
    def points(self) -> list[TpsPoint]:
        return [TpsPoint(row) for row in self.x]

    def __len__(self):
        return len(self.t)


def _field_fn(h: ContactHamiltonian):
    if h.vf is not None:
        return lambda x: np.asarray(h.vf(x), dtype=float)
    return lambda x: _ham_components(h, x)


def rk4_step(F, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = F(x)
    k2 = F(x + 0.5 * dt * k1)
    k3 = F(x + 0.5 * dt * k2)
    k4 = F(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(h, x0: TpsPoint, t_f: float, dt: float) -> Trajectory:
    """Classical RK4 with uniform steps ``t_f / ceil(t_f / dt)``; records ``h``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_f < 0:
        raise ValueError("t_f must be nonnegative")
    h = _as_ham(h)
    F = _field_fn(h)
    steps = max(1, math.ceil(t_f / dt - 1e-9))
    step = t_f / steps
    ts = np.linspace(0.0, t_f, steps + 1)
    xs = np.empty((steps + 1, x0.dim))
    hs = np.empty(steps + 1)
    xs[0] = x0.coords
    hs[0] = h.h.func(list(xs[0]))
    for k in range(steps):
        nxt = rk4_step(F, xs[k], step)
        if not np.all(np.isfinite(nxt)) or np.linalg.norm(nxt) > OVERFLOW_GUARD:
            raise DivergenceError(f"flow left the overflow guard at t={ts[k + 1]!r}",
                                  trajectory=Trajectory(ts[:k + 1], xs[:k + 1], hs[:k + 1]))
        xs[k + 1] = nxt
        hs[k + 1] = float(h.h.func(list(nxt)))
    return Trajectory(ts, xs, hs)


def step_halving_ratio(h, x0: TpsPoint, t_f: float, dt: float) -> float:
    """``|x(dt) - x(dt/2)| / |x(dt/2) - x(dt/4)|`` at ``t_f``; about 16 for RK4."""
    a = integrate(h, x0, t_f, dt).x[-1]
    b = integrate(h, x0, t_f, dt / 2).x[-1]
    c = integrate(h, x0, t_f, dt / 4).x[-1]
    return float(np.linalg.norm(a - b) / np.linalg.norm(b - c))
