import numpy as np
import pytest
from hypothesis import given, strategies as st

from contactthermo.errors import DomainError, PhaseRuleError
from contactthermo.models import (IdealGasModel, VdwModel, coexistence_locus, critical_point,
                                  ensemble_potentials, euler_gibbs_duhem_check, gibbs_phase_rule,
                                  maxwell_construction, maxwell_oracle, spinodal)

# coexistence for a = b = R = 1, solved at 40 significant digits:
# T_r -> (p_r, v_liquid, v_gas)
COEXISTENCE_ORACLE = {
    0.5: (0.027788695043210279355, 1.220260224386632141, 137.95128542794067002),
    0.7: (0.20045846708193551473, 1.4015793145648137148, 23.433417154393595271),
    0.9: (0.64699835187225115404, 1.81020570953400885, 7.0465271286066830632),
}


def test_ideal_gas_hessian_frozen():
    H = IdealGasModel().molar_entropy.hessian([1.0, 1.0])
    assert np.allclose(H, np.diag([-1.5, -1.0]), atol=1e-14)


def test_ideal_gas_energy_inverts_entropy():
    m = IdealGasModel(c_v=2.5, R=1.3, s0=0.2)
    s = float(m.s(1.7, 0.6))
    assert float(m.u(s, 0.6)) == pytest.approx(1.7, rel=1e-14)
    assert m.temperature_sv(s, 0.6) == pytest.approx(1.7 / 2.5, rel=1e-14)


def test_ideal_gas_intensive_and_domain():
    T, p, _ = IdealGasModel().intensive([3.0, 2.0, 1.0])
    assert T == pytest.approx(2.0) and p == pytest.approx(1.0)
    with pytest.raises(DomainError):
        IdealGasModel().intensive([-1.0, 2.0, 1.0])
    with pytest.raises(DomainError):
        IdealGasModel(c_v=0.0)


@given(st.floats(0.2, 5), st.floats(0.2, 5), st.floats(0.2, 5))
def test_ideal_gas_euler_and_gibbs_duhem(U, V, N):
    rep = euler_gibbs_duhem_check(IdealGasModel(), [U, V, N])
    scale = max(1.0, abs(rep["S"]))
    assert rep["homogeneity_residual"] < 1e-12 * 7 * scale
    assert rep["euler_residual"] < 1e-12 * scale
    assert abs(rep["w_mupT"]) < 1e-10


def test_vdw_gibbs_duhem_potential_vanishes():
    rep = euler_gibbs_duhem_check(VdwModel(), [5.0, 20.0, 2.0])
    assert abs(rep["w_mupT"]) < 1e-10 and rep["euler_residual"] < 1e-10


def test_ensembles_ideal_gas():
    rows = {r["ensemble"]: r for r in ensemble_potentials(IdealGasModel(), [3.0, 2.0, 1.5])}
    assert set(rows) == {"NVU", "NVT", "NpT", "muVT", "mupT"}
    for r in rows.values():
        assert r["first_law_residual"] < 1e-6
    assert rows["mupT"]["flag"] == "degenerate"
    assert rows["NVT"]["flag"] == "" and rows["NpT"]["flag"] == ""
    assert abs(rows["mupT"]["value"]) < 1e-10


def test_vdw_thermodynamic_consistency():
    m = VdwModel(a=2.0, b=0.5, R=1.2)
    v, T, h = 3.0, 2.0, 1e-5
    # p = -df/dv, s = -df/dT, u = f + T s, mu = f + p v
    dfdv = (m.helmholtz(v + h, T) - m.helmholtz(v - h, T)) / (2 * h)
    dfdT = (m.helmholtz(v, T + h) - m.helmholtz(v, T - h)) / (2 * h)
    assert -dfdv == pytest.approx(m.pressure(v, T), rel=1e-8)
    assert -dfdT == pytest.approx(m.entropy_vT(v, T), rel=1e-8)
    assert m.energy_vT(v, T) == pytest.approx(m.helmholtz(v, T) + T * m.entropy_vT(v, T), rel=1e-12)
    assert m.chemical_potential(v, T) == pytest.approx(m.helmholtz(v, T) + m.pressure(v, T) * v)
    assert m.temperature_sv(float(m.entropy_vT(v, T)), v) == pytest.approx(T, rel=1e-12)
    assert m.pressure_integral(2.0, 4.0, T) == pytest.approx(
        m.helmholtz(2.0, T) - m.helmholtz(4.0, T), rel=1e-12)


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10))
def test_critical_point_matches_closed_form(a, b, R):
    m = VdwModel(a=a, b=b, R=R)
    got = critical_point(m)
    for x, y in zip(got, m.critical_closed_form()):
        assert abs(x - y) <= 1e-8 * abs(y)


def test_spinodal_brackets_critical_volume():
    m = VdwModel()
    vm, vp = spinodal(m, 0.9 * m.critical_closed_form()[2])
    assert m.b < vm < 3 * m.b < vp
    for v in (vm, vp):
        assert abs(m.dpdv(v, 0.9 * m.critical_closed_form()[2])) < 1e-10
    with pytest.raises(DomainError):
        spinodal(m, 1.1 * m.critical_closed_form()[2])


@pytest.mark.parametrize("Tr", sorted(COEXISTENCE_ORACLE))
def test_maxwell_against_high_precision_values(Tr):
    m = VdwModel()
    vc, pc, Tc = m.critical_closed_form()
    res = maxwell_construction(m, Tr * Tc)
    p_r, vl, vg = COEXISTENCE_ORACLE[Tr]
    assert res.p_coex / pc == pytest.approx(p_r, rel=1e-10)
    assert res.v_liquid == pytest.approx(vl, rel=1e-9)
    assert res.v_gas == pytest.approx(vg, rel=1e-9)
    assert res.equal_area_residual < 1e-8 and res.mu_residual < 1e-8


def test_bisection_oracle_agrees():
    m = VdwModel()
    vc, pc, Tc = m.critical_closed_form()
    o = maxwell_oracle(m, 0.9 * Tc)
    assert o.p_coex / pc == pytest.approx(COEXISTENCE_ORACLE[0.9][0], abs=1e-6)


def test_maxwell_scales_with_constants():
    # reduced coexistence data do not depend on (a, b, R)
    m = VdwModel(a=3.0, b=0.2, R=0.7)
    vc, pc, Tc = m.critical_closed_form()
    res = maxwell_construction(m, 0.7 * Tc)
    assert res.p_coex / pc == pytest.approx(COEXISTENCE_ORACLE[0.7][0], rel=1e-8)


def test_coexistence_pressure_increases():
    m = VdwModel()
    Tc = m.critical_closed_form()[2]
    rows = coexistence_locus(m, np.linspace(0.5, 0.98, 20) * Tc)
    p = [r["p_coex"] for r in rows]
    assert all(b > a for a, b in zip(p, p[1:]))
    for r in rows:
        assert r["v_liquid_r"] < 1 < r["v_gas_r"]
        # Clausius-Clapeyron: dp/dT along the locus equals ds / dv
    T = [r["T"] for r in rows]
    slope_fd = (p[11] - p[9]) / (T[11] - T[9])
    assert slope_fd == pytest.approx(rows[10]["clapeyron_slope"], rel=1e-3)


@pytest.mark.parametrize("C,r,N", [(1, 1, 2), (1, 2, 1), (1, 3, 0), (2, 2, 2)])
def test_phase_rule(C, r, N):
    assert gibbs_phase_rule(C, r) == N


@pytest.mark.parametrize("C,r", [(1, 4), (0, 1), (1, 0)])
def test_phase_rule_rejects(C, r):
    with pytest.raises(PhaseRuleError):
        gibbs_phase_rule(C, r)
