import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from contactthermo.chart import TpsPoint
from contactthermo.models import IdealGasModel
from contactthermo.processes import (T_INFINITY, OrbitKind, analytic_flow, classify,
                                     entropy_production, entropy_production_closed_form,
                                     fluctuation_check, integrability_report,
                                     norm_identity_check, run_process, thermo_contact_hamiltonian)


def test_closed_form_field_matches_generic():
    from contactthermo.dynamics import ham_vf
    h = thermo_contact_hamiltonian(2)
    pt = TpsPoint.make(-0.4, [1.0, 2.0], [0.3, -0.7])
    assert np.allclose(h.vf(pt.coords), ham_vf(h, pt).components)
    assert np.allclose(h.vf(pt.coords), [0.4, 0, 0, -0.3, 0.7])


def test_numeric_flow_matches_analytic():
    x0 = TpsPoint.make(-1.3, [0.5, 2.0], [1.1, -0.4])
    res = run_process(x0, 5.0, dt=1e-3)
    assert res.h_law_residual < 1e-6
    assert res.q_drift_max < 1e-12
    assert np.allclose(res.trajectory.x[-1], analytic_flow(x0, 5.0).coords, atol=1e-10)


@given(st.floats(-5, 5), st.lists(st.floats(-5, 5), min_size=2, max_size=2),
       st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_metric_norm_equals_h_squared(w, q, p):
    assert norm_identity_check(TpsPoint.make(w, q, p)) < 1e-10 * max(1.0, w * w)


@pytest.mark.parametrize("H0", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("tf", [1.0, math.log(2), 5.0, 50.0])
def test_entropy_production_quadrature(H0, tf):
    x0 = TpsPoint.make(-H0, [0.3], [1.0])
    assert abs(entropy_production(x0, tf) - entropy_production_closed_form(H0, tf)) < 1e-8


def test_infinite_time_limit_is_exact():
    for H0 in (0.5, 1.0, 3.25):
        assert entropy_production_closed_form(H0, T_INFINITY) == H0
        assert entropy_production_closed_form(H0, math.inf) == H0


def test_half_life_production():
    assert entropy_production_closed_form(2.0, math.log(2)) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("H0,kind", [(-1.0, OrbitKind.INADMISSIBLE), (0.0, OrbitKind.EQUILIBRIUM),
                                     (1.0, OrbitKind.ADMISSIBLE)])
def test_classification_table(H0, kind):
    assert classify(TpsPoint.make(-H0, [1.0], [1.0])).kind is kind


def test_classification_tolerance():
    assert classify(TpsPoint.make(1e-12, [1.0], [1.0])).kind is OrbitKind.EQUILIBRIUM
    with pytest.raises(ValueError):
        classify(TpsPoint.make(0.0, [1.0], [1.0]), tol=0.0)


def test_equilibrium_orbit_is_stationary_in_h():
    res = run_process(TpsPoint.make(0.0, [1.0, 2.0], [0.5, 0.5]), 3.0)
    assert np.all(res.trajectory.h == 0.0)
    assert res.entropy_production == 0.0


def test_inadmissible_production_reported_as_magnitude():
    x0 = TpsPoint.make(1.0, [0.0], [1.0])
    assert entropy_production(x0, 50.0) == pytest.approx(1.0, abs=1e-8)


def test_integrability():
    rep = integrability_report(TpsPoint.make(-0.5, [1.0, 2.0], [0.3, 0.4]), 2.0, samples=4)
    assert rep["q_drift_max"] == 0.0
    assert rep["bracket_max"] < 1e-8
    assert rep["independent"] and rep["ranks"] == [3, 3, 3, 3]


def test_fluctuation_link_is_second_order():
    m = IdealGasModel()
    state = [2.0, 3.0, 1.5]
    r1 = fluctuation_check(m, state, [1e-2, 0.0])
    r2 = fluctuation_check(m, state, [5e-3, 0.0])
    assert abs(r1["gibbs_duhem"]) < 1e-12
    assert r1["H"] > 0
    # error is cubic in dx
    assert r1["difference"] / r2["difference"] == pytest.approx(8.0, rel=0.1)
