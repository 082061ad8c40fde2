import numpy as np
import pytest
from hypothesis import given, strategies as st

from contactthermo.chart import TpsPoint, random_points
from contactthermo.errors import DegenerateMetricError, DomainError, UnsupportedDimensionError
from contactthermo.metric import (canonical_basis, check_structure, default_bundle,
                                  eta_einstein_residual, gfr, gfr_matrix, isometry_generators,
                                  killing_residual, nabla_xi_check, orthonormal_coframe, phi,
                                  phi_matrix, signature, structure_residuals)


def test_gfr_components_n1():
    G = gfr_matrix(np.array([0.3, 1.2, 2.0]))
    eta = np.array([1.0, 2.0, 0.0])
    expected = np.outer(eta, eta)
    expected[1, 2] -= 0.5
    expected[2, 1] -= 0.5
    assert np.allclose(G, expected)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_signature(rng, n):
    for pt in random_points(rng, n, 20):
        assert signature(pt) == (n + 1, n)


def test_signature_holds_for_negative_p():
    pt = TpsPoint.make(1.0, [0.5, 2.0], [-3.0, 0.7])
    assert signature(pt) == (3, 2)


def test_degenerate_metric_raises():
    pt = TpsPoint.make(0.0, [1.0], [1.0])
    with pytest.raises(DegenerateMetricError):
        signature(pt, lambda p: type(gfr(p))(p, np.zeros((3, 3))))


def test_frames_are_dual_and_orthonormal(rng):
    for pt in random_points(rng, 2, 10):
        cof = np.array([c.components for c in orthonormal_coframe(pt)])
        fr = np.array([v.components for v in canonical_basis(pt)])
        assert np.allclose(cof @ fr.T, np.eye(pt.dim), atol=1e-12)
        G = gfr(pt).matrix
        assert np.allclose(fr @ G @ fr.T, np.diag([1, 1, 1, -1, -1]), atol=1e-12)


def test_frame_phi_matches_coordinate_phi(rng):
    for pt in random_points(rng, 3, 10):
        assert np.allclose(phi(pt).matrix, phi_matrix(pt.coords), atol=1e-12)


def test_frames_need_positive_p():
    with pytest.raises(DomainError):
        orthonormal_coframe(TpsPoint.make(0.0, [1.0], [-1.0]))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_para_contact_identities(rng, n):
    report = check_structure(default_bundle(), random_points(rng, n, 50))
    assert report["pass"]
    assert set(report["residuals"]) == {"reeb_normalization", "reeb_deta", "phi_xi",
                                        "phi_squared", "compatibility", "associated"}


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=2),
       st.lists(st.floats(-4, 4), min_size=2, max_size=2), st.floats(-3, 3))
def test_identities_hold_for_any_point(q, p, w):
    res = structure_residuals(default_bundle(), TpsPoint.make(w, q, p))
    assert max(res.values()) < 1e-12


def test_broken_bundle_fails_check(rng):
    broken = default_bundle().replace(phi=lambda pt: type(phi(pt))(pt, 2 * phi_matrix(pt.coords)))
    assert not check_structure(broken, random_points(rng, 1, 3))["pass"]


def test_nabla_xi_equals_minus_phi(rng):
    for pt in random_points(rng, 2, 3):
        assert nabla_xi_check(default_bundle(), pt) < 1e-4


@pytest.mark.parametrize("n", [1, 2])
def test_eta_einstein(rng, n):
    for pt in random_points(rng, n, 2):
        assert eta_einstein_residual(pt) < 1e-3


def test_eta_einstein_n3_unsupported():
    with pytest.raises(UnsupportedDimensionError):
        eta_einstein_residual(TpsPoint(np.ones(7)))


def test_reeb_is_killing(rng):
    for pt in random_points(rng, 2, 3):
        assert killing_residual(default_bundle(), pt) < 1e-8


def test_isometry_generators_are_killing(rng):
    gens = isometry_generators(2)
    assert len(gens) == 4 + 5
    for pt in random_points(rng, 2, 2):
        for g in gens:
            assert killing_residual(default_bundle(), pt, g) < 1e-7, g.name
