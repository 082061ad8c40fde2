import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from contactthermo import ad


def f_poly(x):
    return x[0] ** 3 * x[1] + 2 * x[0] * x[1] ** 2 - 5 * x[1]


def test_gradient_polynomial():
    v, g = ad.value_and_gradient(f_poly, [1.5, -2.0])
    assert v == pytest.approx(f_poly([1.5, -2.0]))
    assert np.allclose(g, [3 * 1.5 ** 2 * -2.0 + 2 * 4.0, 1.5 ** 3 + 4 * 1.5 * -2.0 - 5])


def test_hessian_matches_closed_form():
    _, _, H = ad.derivatives(f_poly, [1.5, -2.0])
    x, y = 1.5, -2.0
    expected = [[6 * x * y, 3 * x ** 2 + 4 * y], [3 * x ** 2 + 4 * y, 4 * x]]
    assert np.allclose(H, expected, atol=1e-13)


def test_elementary_functions():
    f = lambda x: ad.exp(x[0]) * ad.sin(x[1]) + ad.log(x[0]) * ad.sqrt(x[1]) + ad.cos(x[0] * x[1])
    x0 = np.array([0.7, 1.3])
    _, g, H = ad.derivatives(f, x0)
    h = 1e-5
    g_fd = [(f(x0 + h * e) - f(x0 - h * e)) / (2 * h) for e in np.eye(2)]
    assert np.allclose(g, g_fd, atol=1e-8)
    assert np.allclose(H, H.T)


def test_jacobian_rows_are_outputs():
    F = lambda x: [x[0] * x[1], x[0] + 3 * x[1], ad.exp(x[1])]
    J = ad.jacobian(F, [2.0, 0.5])
    assert J.shape == (3, 2)
    assert np.allclose(J, [[0.5, 2.0], [1.0, 3.0], [0.0, math.exp(0.5)]])


def test_constant_function_has_zero_gradient():
    v, g = ad.value_and_gradient(lambda x: 4.0, [1.0, 2.0])
    assert v == 4.0 and np.all(g == 0)


@given(st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_hessian_symmetric_and_matches_fd(a, b):
    f = lambda x: x[0] * ad.log(x[1]) + x[1] ** 2 / x[0]
    x0 = np.array([a, b])
    _, g, H = ad.derivatives(f, x0)
    assert np.max(np.abs(H - H.T)) <= 1e-12 * max(1.0, np.max(np.abs(H)))
    h = 1e-5 * max(a, b)
    for k, e in enumerate(np.eye(2)):
        gp = ad.gradient(f, x0 + h * e)
        gm = ad.gradient(f, x0 - h * e)
        assert np.allclose((gp - gm) / (2 * h), H[:, k], rtol=1e-5, atol=1e-6)
