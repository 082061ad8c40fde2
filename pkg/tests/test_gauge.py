import numpy as np
import pytest

from contactthermo.chart import ScalarField, TpsPoint, random_points
from contactthermo.errors import DomainError, GaugeSingularError
from contactthermo.gauge import (constant_factor, default_grid, entropy_gauge_factor,
                                 gauge_transform, kernel_residual, reciprocal,
                                 representation_change_demo)
from contactthermo.metric import check_structure, default_bundle
from contactthermo.models import IdealGasModel, VdwModel


def smooth_factor(n):
    return ScalarField(n, lambda x: 2.0 + 0.3 * x[0] * x[0] + 0.1 * x[1 + n], "omega")


@pytest.mark.parametrize("n", [1, 2])
def test_gauged_structure_is_para_contact(rng, n):
    gauged = gauge_transform(default_bundle(), smooth_factor(n))
    assert check_structure(gauged, random_points(rng, n, 20))["pass"]


def test_constant_factor_is_d_homothetic(rng):
    c = 3.0
    gauged = gauge_transform(default_bundle(), constant_factor(2, c))
    for pt in random_points(rng, 2, 5):
        eta = default_bundle().eta(pt).components
        G = default_bundle().metric(pt).matrix
        assert np.allclose(gauged.reeb(pt).components, np.eye(5)[0] / c)
        assert np.allclose(gauged.metric(pt).matrix,
                           c * G + c * (c - 1) * np.outer(eta, eta), atol=1e-12)


def test_kernel_is_preserved(rng):
    gauged = gauge_transform(default_bundle(), smooth_factor(2))
    for pt in random_points(rng, 2, 5):
        assert kernel_residual(default_bundle(), gauged, pt, rng) < 1e-12


def test_round_trip_recovers_structure(rng):
    om = smooth_factor(2)
    there = gauge_transform(default_bundle(), om)
    back = gauge_transform(there, reciprocal(om))
    base = default_bundle()
    for pt in random_points(rng, 2, 5):
        for part in ("eta", "reeb"):
            assert np.allclose(getattr(back, part)(pt).components,
                               getattr(base, part)(pt).components, atol=1e-12)
        assert np.allclose(back.metric(pt).matrix, base.metric(pt).matrix, atol=1e-12)
        assert np.allclose(back.phi(pt).matrix, base.phi(pt).matrix, atol=1e-12)


def test_vanishing_factor_raises():
    gauged = gauge_transform(default_bundle(), ScalarField(1, lambda x: x[0], "w"))
    with pytest.raises(GaugeSingularError):
        gauged.metric(TpsPoint.make(0.0, [1.0], [1.0]))


def test_entropy_reeb_is_d_dS():
    gauged = gauge_transform(default_bundle(), entropy_gauge_factor())
    pt = TpsPoint.make(1.0, [0.5, 2.0], [-1.5, 0.75])  # T = 1.5, p = 0.75
    assert np.allclose(gauged.reeb(pt).components, [0, 1, 0, 0, 0], atol=1e-14)


@pytest.mark.parametrize("model", [IdealGasModel(), VdwModel()], ids=["ideal-gas", "vdw"])
def test_representation_change(model):
    rep = representation_change_demo(model)
    assert rep["pass"]
    for k, v in rep["max"].items():
        assert v < 1e-8, k
    assert rep["structure"]["pass"]
    assert len(rep["rows"]) == 25


def test_vdw_grid_is_single_phase():
    m = VdwModel()
    Tc = m.critical_closed_form()[2]
    for s, v in default_grid(m):
        assert m.temperature_sv(s, v) > Tc


def test_low_temperature_rejected():
    m = IdealGasModel()
    with pytest.raises(DomainError):
        representation_change_demo(m, grid=[(-20.0, 1.0)])
