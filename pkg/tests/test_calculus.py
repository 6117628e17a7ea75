import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkcmap import calculus as calc
from qkcmap import jets as jm
from qkcmap.errors import DomainError, SingularMetric
from qkcmap.fields import ChartMap, Point, linear_vector_field, make_field, register_chart

from conftest import fd_gradient


def sphere():
    return make_field(2, "sym2", lambda x: [[1.0, 0.0], [0.0, jm.sin(x[0]) ** 2]], name="S2")


def half_plane():
    return make_field(2, "sym2", lambda x: [[1.0 / x[1] ** 2, 0.0], [0.0, 1.0 / x[1] ** 2]], domain=lambda x: x[1] > 0)


def warped_metric(params):
    """A generic non-diagonal metric on R^3 built from a positive-definite polynomial."""
    a, b, c = params

    def fn(x):
        u, v, w = x
        return [
            [2.0 + a * u * u, 0.3 * v * w, b * u],
            [0.3 * v * w, 3.0 + jm.sin(u * v), c * w],
            [b * u, c * w, 2.5 + v * v],
        ]

    return make_field(3, "sym2", fn, domain=lambda x: np.max(np.abs(x)) < 0.5)


coeff = st.floats(-0.5, 0.5, allow_nan=False)
small = st.floats(-0.4, 0.4, allow_nan=False)


def test_round_sphere_curvature():
    th = 0.7
    cd = calc.curvature_data(sphere(), [th, 0.3])
    assert cd.riemann[0, 1, 0, 1] == pytest.approx(np.sin(th) ** 2, abs=1e-12)
    assert cd.scal == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(cd.ricci, cd.g, atol=1e-12)
    op = calc.operator_from(cd)
    assert op.eigenvalues == pytest.approx([1.0], abs=1e-12)


def test_hyperbolic_plane_curvature_and_christoffel():
    g = half_plane()
    p = [0.4, 1.7]
    gam = calc.christoffel(g, p)
    y = 1.7
    # Gamma^x_xy = -1/y, Gamma^y_xx = 1/y, Gamma^y_yy = -1/y
    assert gam[0, 0, 1] == pytest.approx(-1 / y)
    assert gam[1, 0, 0] == pytest.approx(1 / y)
    assert gam[1, 1, 1] == pytest.approx(-1 / y)
    assert calc.ricci_scalar(g, p)[1] == pytest.approx(-2.0, abs=1e-12)


def test_flat_metric_in_polar_coordinates_is_flat():
    g = make_field(2, "sym2", lambda x: [[1.0, 0.0], [0.0, x[0] * x[0]]], domain=lambda x: x[0] > 0)
    assert np.max(np.abs(calc.riemann(g, [1.3, 0.2]))) < 1e-12


@given(st.tuples(coeff, coeff, coeff), st.tuples(small, small, small))
def test_riemann_algebraic_symmetries(params, x):
    R = calc.riemann(warped_metric(params), np.array(x))
    res = calc.bianchi_residuals(R)
    assert max(res.values()) < 1e-11


@given(st.tuples(coeff, coeff, coeff), st.tuples(small, small, small))
def test_curvature_operator_trace_is_half_scalar(params, x):
    cd = calc.curvature_data(warped_metric(params), np.array(x))
    op = calc.operator_from(cd)
    assert np.sum(op.eigenvalues) == pytest.approx(cd.scal / 2, abs=1e-9)


def test_singular_and_out_of_domain_metric():
    g = make_field(2, "sym2", lambda x: [[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(SingularMetric):
        calc.christoffel(g, [0.0, 0.0])
    with pytest.raises(DomainError):
        calc.curvature_data(half_plane(), [0.0, -1.0])


def _flow_map(X, t):
    return ChartMap(X.dim, X.dim, lambda x: [xi + t * vi for xi, vi in zip(x, X.eval(x))])


@given(st.tuples(coeff, coeff, coeff), st.tuples(small, small, small))
def test_lie_derivative_of_metric_matches_flow_oracle(params, x):
    g = warped_metric(params)
    X = make_field(3, "vector", lambda y: [y[1] * y[2], 1.0 + y[0] ** 2, jm.sin(y[0])])
    x = np.array(x)
    h = 1e-5
    # d/dt (phi_t^* g)(x) at t = 0 with phi_t = id + t X (first order in t suffices)
    fd = (calc.pullback_check(_flow_map(X, h), g, x) - calc.pullback_check(_flow_map(X, -h), g, x)) / (2 * h)
    assert np.allclose(calc.lie_derivative(g, X, x), fd, atol=1e-6)


def test_lie_bracket_matches_commutator_on_test_function():
    X = make_field(3, "vector", lambda y: [y[1], -y[0] * y[2], 1.0])
    Y = make_field(3, "vector", lambda y: [jm.exp(y[2]), y[0], y[1] * y[1]])
    f = lambda y: np.sin(y[0]) * y[1] + y[2] ** 3
    grad = lambda y: fd_gradient(f, y, 1e-5)
    Xf = lambda y: grad(y) @ X.values(y)
    Yf = lambda y: grad(y) @ Y.values(y)
    p = np.array([0.3, -0.2, 0.5])
    comm = fd_gradient(Yf, p, 1e-4) @ X.values(p) - fd_gradient(Xf, p, 1e-4) @ Y.values(p)
    assert comm == pytest.approx(grad(p) @ calc.lie_bracket(X, Y, p), abs=1e-5)
    assert np.allclose(calc.lie_bracket(X, Y, p), -calc.lie_bracket(Y, X, p))


def _one_form():
    return make_field(3, "covector", lambda y: [y[1] * y[2] ** 2, jm.sin(y[0]) * y[2], y[0] * y[1] + y[2] ** 3])


def _two_form():
    def fn(y):
        a, b, c = y[0] * y[1], jm.cos(y[2]) * y[0], y[1] ** 2 * y[2]
        return [[0.0, a, b], [-a, 0.0, c], [-b, -c, 0.0]]

    return make_field(3, "form", fn, degree=2)


@given(st.tuples(small, small, small))
def test_d_squared_vanishes(x):
    x = np.array(x)
    _, grad = calc.exterior_derivative_jet(_one_form(), x)
    assert np.max(np.abs(calc.d_of_jet(grad, 2))) < 1e-12
    f = make_field(3, "scalar", lambda y: y[0] * jm.exp(y[1]) + y[2] ** 2 * y[1])
    _, grad0 = calc.exterior_derivative_jet(f, x)
    assert np.max(np.abs(calc.d_of_jet(grad0, 1))) < 1e-12


def test_exterior_derivative_convention_by_hand():
    a = make_field(2, "covector", lambda y: [-y[1], y[0]])
    # d(x dy - y dx) = 2 dx ^ dy, i.e. component [0, 1] = 2
    assert np.allclose(calc.exterior_derivative(a, [0.1, 0.2]), [[0.0, 2.0], [-2.0, 0.0]])


@given(st.tuples(small, small, small))
def test_cartan_formula(x):
    x = np.array(x)
    X = make_field(3, "vector", lambda y: [y[1], y[2] * y[0], 1.0 - y[0]])
    for w, deg in ((_one_form(), 1), (_two_form(), 2)):
        lie = calc.lie_derivative(w, X, x)
        i_dw = calc.contract_vector(calc.exterior_derivative(w, x), X.values(x))

        def iXw(y):
            return np.tensordot(np.asarray(X.eval(y), dtype=object), np.asarray(w.eval(y), dtype=object), axes=([0], [0]))

        contracted = make_field(3, "covector" if deg == 2 else "scalar", lambda y: iXw(y).tolist() if deg == 2 else iXw(y))
        d_iw = calc.exterior_derivative(contracted, x)
        assert np.allclose(lie, i_dw + d_iw, atol=1e-12)


def test_lie_derivative_of_endomorphism_under_linear_field():
    A = np.array([[0.0, -1.0], [1.0, 0.0]])
    X = linear_vector_field(A)
    J = make_field(2, "endo", lambda y: [[0.0, -1.0], [1.0, 0.0]])
    # rotations commute with the complex structure
    assert np.allclose(calc.lie_derivative(J, X, [0.3, 0.4]), 0.0)
    assert np.allclose(calc.lie_bracket(X, X, [0.3, 0.4]), 0.0)


def _triangular_map(y):
    x1, x2, x3, x4 = y
    return [x1, x2 + x1 * x1, x3 + x1 * x2, x4 + x3 * x3]


def _unit_lower_inverse(D):
    n = len(D)
    inv = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            acc = 0.0
            for k in range(j, i):
                acc = acc + D[i][k] * inv[k][j]
            inv[i][j] = -acc
    return inv


def _pulled_back_J(y):
    # Jacobian of the triangular map over the ring
    x1, x2, x3, x4 = y
    D = [[1.0, 0.0, 0.0, 0.0], [2 * x1, 1.0, 0.0, 0.0], [x2, x1, 1.0, 0.0], [0.0, 0.0, 2 * x3, 1.0]]
    Di = _unit_lower_inverse(D)
    J0 = [[0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, -1.0], [0.0, 0.0, 1.0, 0.0]]
    mul = lambda A, B: [[sum((A[i][k] * B[k][j] for k in range(4)), 0.0) for j in range(4)] for i in range(4)]
    return mul(Di, mul(J0, D))


def test_nijenhuis_vanishes_for_pulled_back_complex_structure():
    J = make_field(4, "endo", _pulled_back_J)
    p = np.array([0.3, -0.2, 0.5, 0.1])
    Jv = J.values(p)
    assert np.allclose(Jv @ Jv, -np.eye(4))
    assert np.max(np.abs(calc.nijenhuis(J, p))) < 1e-12


def test_nijenhuis_detects_non_integrable_structure():
    def fn(y):
        # P J0 P^-1 with P = 1 + a E_13; P is not a Jacobian because a depends on y[0], y[1]
        a = y[0] * y[1]
        P = [[1.0, 0.0, a, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
        Pi = [[1.0, 0.0, -a, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
        J0 = [[0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, -1.0], [0.0, 0.0, 1.0, 0.0]]
        mul = lambda A, B: [[sum((A[i][k] * B[k][j] for k in range(4)), 0.0) for j in range(4)] for i in range(4)]
        return mul(P, mul(J0, Pi))

    J = make_field(4, "endo", fn)
    p = np.array([0.7, 0.1, 0.4, -0.3])
    Jv = J.values(p)
    assert np.allclose(Jv @ Jv, -np.eye(4))
    N = calc.nijenhuis(J, p)
    assert np.allclose(N, -np.swapaxes(N, 1, 2))
    assert np.max(np.abs(N)) > 1e-3


def test_pullback_of_rotation_preserves_flat_metric():
    g = make_field(2, "sym2", lambda x: [[1.0, 0.0], [0.0, 1.0]])
    c, s = np.cos(0.4), np.sin(0.4)
    phi = ChartMap(2, 2, lambda x: [c * x[0] - s * x[1], s * x[0] + c * x[1]])
    assert np.allclose(calc.pullback_check(phi, g, [0.3, 0.9]), 0.0, atol=1e-15)


def test_points_validate_chart_dimension():
    register_chart("test-chart", 3)
    assert Point("test-chart", [1, 2, 3]).coords.shape == (3,)
    with pytest.raises(ValueError):
        Point("test-chart", [1, 2])
