from fractions import Fraction

import numpy as np
import pytest

from contactthermo.chart import (ScalarField, TpsPoint, VectorAt, deta_eval, eta_eval,
                                 heisenberg_basis, heisenberg_fields, lie_bracket, p_index,
                                 q_index, random_points, reeb, volume_nondegeneracy)
from contactthermo.errors import DimensionError, NumericError, UnsupportedDimensionError


def test_point_layout():
    pt = TpsPoint.make(1.0, [2.0, 3.0], [4.0, 5.0])
    assert pt.n == 2 and pt.dim == 5
    assert pt.w == 1.0 and list(pt.q) == [2.0, 3.0] and list(pt.p) == [4.0, 5.0]
    assert q_index(2, 1) == 2 and p_index(2, 1) == 4


def test_point_is_immutable_and_hashable():
    pt = TpsPoint.make(0.0, [1.0], [2.0])
    with pytest.raises(ValueError):
        pt.coords[0] = 3.0
    assert pt == TpsPoint.make(0.0, [1.0], [2.0])
    assert len({pt, TpsPoint.make(0.0, [1.0], [2.0])}) == 1


@pytest.mark.parametrize("coords", [[1.0, 2.0], [1.0], np.zeros((3, 1))])
def test_point_rejects_bad_shapes(coords):
    with pytest.raises(DimensionError):
        TpsPoint(coords)


def test_point_rejects_nonfinite():
    with pytest.raises(NumericError):
        TpsPoint([0.0, np.nan, 1.0])


def test_vector_length_checked():
    pt = TpsPoint.make(0.0, [1.0], [1.0])
    with pytest.raises(DimensionError):
        VectorAt(pt, [1.0, 0.0])


def test_reeb_normalisation_and_kernel(rng):
    for n in (1, 2, 3):
        for pt in random_points(rng, n, 10):
            xi = reeb(pt)
            assert eta_eval(pt, xi) == 1.0
            for k in range(pt.dim):
                e = VectorAt(pt, np.eye(pt.dim)[k])
                assert deta_eval(pt, xi, e) == 0.0


def test_deta_on_coordinate_pair():
    pt = TpsPoint.make(0.0, [1.0], [1.0])
    dp = VectorAt(pt, [0, 0, 1.0])
    dq = VectorAt(pt, [0, 1.0, 0])
    assert deta_eval(pt, dp, dq) == 1.0
    assert deta_eval(pt, dq, dp) == -1.0


def test_heisenberg_basis_spans_and_splits(rng):
    for pt in random_points(rng, 2, 5):
        frame = heisenberg_basis(pt)
        M = np.array([v.components for v in frame])
        assert np.linalg.matrix_rank(M) == pt.dim
        # P and Q span the contact distribution
        for v in frame[1:]:
            assert abs(eta_eval(pt, v)) < 1e-14


def test_heisenberg_commutators(rng):
    n = 2
    xi, P, Q = heisenberg_fields(n)
    for pt in random_points(rng, n, 5):
        for i in range(n):
            for j in range(n):
                br = lie_bracket(P[i], Q[j], pt).components
                expected = xi.components(pt.coords) if i == j else np.zeros(pt.dim)
                assert np.allclose(br, expected, atol=1e-8)
                assert np.allclose(lie_bracket(P[i], P[j], pt).components, 0, atol=1e-8)
                assert np.allclose(lie_bracket(Q[i], Q[j], pt).components, 0, atol=1e-8)
            assert np.allclose(lie_bracket(xi, P[i], pt).components, 0, atol=1e-8)
            assert np.allclose(lie_bracket(xi, Q[i], pt).components, 0, atol=1e-8)


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 2), (3, 6)])
def test_volume_form_is_n_factorial(rng, n, expected):
    for pt in random_points(rng, n, 5):
        v = volume_nondegeneracy(pt)
        assert isinstance(v, Fraction) and v == expected


def test_volume_unsupported_dimension():
    with pytest.raises(UnsupportedDimensionError):
        volume_nondegeneracy(TpsPoint(np.zeros(9)))


def test_scalar_field_derivatives():
    f = ScalarField(1, lambda x: x[0] * x[1] ** 2 + x[2], "f")
    pt = TpsPoint.make(2.0, [3.0], [1.0])
    v, g, H = f.evaluate(pt)
    assert v == 19.0
    assert np.allclose(g.components, [9.0, 12.0, 1.0])
    assert np.allclose(H, [[0, 6, 0], [6, 4, 0], [0, 0, 0]])
