import pickle

import pytest
import numpy as np

from renyicones.errors import DimensionError, DomainError
from renyicones.hermitian import random_hermitian, random_positive_definite
from renyicones.scalar import Affine, Log, Power
from renyicones.tracefn import (
    DirectionPair,
    TraceFnParams,
    composed_perspective,
    d_alpha_perspective,
    d_alpha_value,
    nc_perspective,
    psi_gradient,
    psi_hessian_apply,
    psi_hessian_bilinear,
    psi_third_directional,
    psi_value,
)

from conftest import PAULI_X


ALPHAS = [0.5, 0.75, 1.25, 1.5, 2.0]


def _line(params, X, Y, d, t):
    return psi_value(params, X + t * d.H, Y + t * d.V)


def test_params_range():
    with pytest.raises(DomainError):
        TraceFnParams(0.4)
    with pytest.raises(DomainError):
        TraceFnParams(2.5)


def test_params_immutable_and_picklable():
    params = TraceFnParams(0.75)
    with pytest.raises(AttributeError):
        params.alpha = 0.5
    assert pickle.loads(pickle.dumps(params)) == params
    assert hash(TraceFnParams(0.75)) == hash(params)
    assert TraceFnParams(0.75) != TraceFnParams(1.25)


def test_psi_value_examples():
    assert psi_value(TraceFnParams(1.5), np.diag([2.0, 1.0]), np.eye(2)) == pytest.approx(2 ** 1.5 + 1)
    assert psi_value(TraceFnParams(0.5), np.eye(4), np.eye(4)) == pytest.approx(4.0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_psi_value_forms_agree(alpha, pd_pair):
    X, Y, _, _ = pd_pair
    params = TraceFnParams(alpha)
    assert psi_value(params, X, Y) == pytest.approx(psi_value(params, X, Y, form="x-sandwich"), rel=1e-10)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_psi_homogeneity(alpha, pd_pair):
    X, Y, _, _ = pd_pair
    params = TraceFnParams(alpha)
    assert psi_value(params, 3 * X, 3 * Y) == pytest.approx(3 * psi_value(params, X, Y), rel=1e-10)


def test_psi_rejects_bad_arguments():
    params = TraceFnParams(0.5)
    with pytest.raises(DomainError):
        psi_value(params, np.diag([1.0, -1.0]), np.eye(2))
    with pytest.raises(DimensionError):
        psi_value(params, np.eye(2), np.eye(3))
    with pytest.raises(ValueError):
        psi_value(params, np.eye(2), np.eye(2), form="unknown")


def test_psi_gradient_examples():
    grad_x, grad_y = psi_gradient(TraceFnParams(1.5), np.eye(3), np.eye(3))
    np.testing.assert_allclose(grad_x, 1.5 * np.eye(3), atol=1e-12)
    np.testing.assert_allclose(grad_y, -0.5 * np.eye(3), atol=1e-12)

    grad_x, grad_y = psi_gradient(TraceFnParams(2.0), np.array([[2.0]]), np.array([[1.0]]))
    assert grad_x[0, 0] == pytest.approx(4.0)
    assert grad_y[0, 0] == pytest.approx(-4.0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_identity_point_derivatives(alpha):
    params = TraceFnParams(alpha)
    H = np.array([[1.0, 0.5], [0.5, -0.3]])
    d = DirectionPair(H, np.zeros((2, 2)))
    I = np.eye(2)
    expected_second = alpha * (alpha - 1) * np.trace(H @ H)
    expected_third = alpha * (alpha - 1) * (alpha - 2) * np.trace(H @ H @ H)
    assert psi_hessian_bilinear(params, I, I, d, d) == pytest.approx(expected_second, abs=1e-12)
    assert psi_third_directional(params, I, I, d) == pytest.approx(expected_third, abs=1e-12)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_gradient_matches_differences(alpha, pd_pair):
    X, Y, H, V = pd_pair
    params = TraceFnParams(alpha)
    d = DirectionPair(H, V)
    step = 1e-5
    estimate = (_line(params, X, Y, d, step) - _line(params, X, Y, d, -step)) / (2 * step)
    grad_x, grad_y = psi_gradient(params, X, Y)
    analytic = np.real(np.vdot(grad_x, H) + np.vdot(grad_y, V))
    assert analytic == pytest.approx(estimate, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_hessian_matches_differences(alpha, pd_pair):
    X, Y, H, V = pd_pair
    params = TraceFnParams(alpha)
    d = DirectionPair(H, V)
    step = 1e-4
    estimate = (
        _line(params, X, Y, d, step) - 2 * _line(params, X, Y, d, 0.0) + _line(params, X, Y, d, -step)
    ) / step ** 2
    assert psi_hessian_bilinear(params, X, Y, d, d) == pytest.approx(estimate, rel=1e-4, abs=1e-6)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_third_derivative_matches_differences(alpha, pd_pair):
    X, Y, H, V = pd_pair
    params = TraceFnParams(alpha)
    d = DirectionPair(H, V)
    step = 2e-4
    values = [_line(params, X, Y, d, k * step) for k in (-2, -1, 1, 2)]
    estimate = (values[3] - 2 * values[2] + 2 * values[1] - values[0]) / (2 * step ** 3)
    assert psi_third_directional(params, X, Y, d) == pytest.approx(estimate, rel=1e-3, abs=1e-3)


@pytest.mark.parametrize("alpha", [0.75, 1.5])
def test_hessian_apply_is_symmetric(alpha, rng):
    X = random_positive_definite(rng, 3, spread=10.0)
    Y = random_positive_definite(rng, 3, spread=10.0)
    params = TraceFnParams(alpha)
    d1 = DirectionPair(random_hermitian(rng, 3), random_hermitian(rng, 3))
    d2 = DirectionPair(random_hermitian(rng, 3), random_hermitian(rng, 3))
    assert psi_hessian_bilinear(params, X, Y, d1, d2) == pytest.approx(
        psi_hessian_bilinear(params, X, Y, d2, d1), rel=1e-9
    )
    out = psi_hessian_apply(params, X, Y, d1)
    assert np.allclose(out.H, out.H.conj().T)


def test_hessian_rejects_mismatched_direction():
    params = TraceFnParams(1.5)
    with pytest.raises(DimensionError):
        psi_hessian_bilinear(params, np.eye(2), np.eye(2), DirectionPair(np.eye(3), np.eye(3)), DirectionPair(np.eye(2), np.eye(2)))


@pytest.mark.parametrize("alpha", [0.5, 0.75])
def test_psi_concave_for_small_alpha(alpha, rng):
    params = TraceFnParams(alpha)
    for _ in range(10):
        X = random_positive_definite(rng, 3, spread=10.0)
        Y = random_positive_definite(rng, 3, spread=10.0)
        d = DirectionPair(random_hermitian(rng, 3), random_hermitian(rng, 3))
        assert psi_hessian_bilinear(params, X, Y, d, d) <= 1e-10


def test_general_params_match_alpha_case(pd_pair):
    X, Y, H, V = pd_pair
    alpha = 1.5
    general = TraceFnParams.general(Power(alpha), Power((1 - alpha) / alpha))
    params = TraceFnParams(alpha)
    d = DirectionPair(H, V)
    assert psi_value(general, X, Y) == pytest.approx(psi_value(params, X, Y), rel=1e-10)
    assert psi_hessian_bilinear(general, X, Y, d, d) == pytest.approx(
        psi_hessian_bilinear(params, X, Y, d, d), rel=1e-8
    )
    assert psi_third_directional(general, X, Y, d) == pytest.approx(
        psi_third_directional(params, X, Y, d), rel=1e-7
    )


def test_d_alpha_value():
    params = TraceFnParams(2.0)
    assert d_alpha_value(params, np.array([[2.0]]), np.array([[1.0]])) == pytest.approx(np.log(4.0))
    with pytest.raises(DomainError):
        d_alpha_value(TraceFnParams(1.0), np.eye(2), np.eye(2))


@pytest.mark.parametrize("alpha", [0.5, 0.75, 1.5])
def test_d_alpha_of_equal_states_is_zero(alpha, rng):
    rho = random_positive_definite(rng, 3)
    rho /= np.trace(rho).real
    assert d_alpha_value(TraceFnParams(alpha), rho, rho) == pytest.approx(0.0, abs=1e-12)


def test_d_alpha_perspective(pd_pair):
    X, Y, _, _ = pd_pair
    params = TraceFnParams(0.75)
    u = 0.7
    assert d_alpha_perspective(params, 2 * u, 2 * X, 2 * Y) == pytest.approx(
        2 * d_alpha_perspective(params, u, X, Y), rel=1e-10
    )
    assert d_alpha_perspective(params, 1.0, X, Y) == pytest.approx(d_alpha_value(params, X, Y), rel=1e-10)
    with pytest.raises(DomainError):
        d_alpha_perspective(params, 0.0, X, Y)
    with pytest.raises(DomainError):
        d_alpha_perspective(TraceFnParams(1.5), 1.0, X, Y)


def test_nc_perspective():
    assert nc_perspective(Power(0.5), np.array([[4.0]]), np.array([[1.0]]))[0, 0] == pytest.approx(2.0)
    X = np.diag([2.0, 3.0]) + 0.5 * PAULI_X
    np.testing.assert_allclose(nc_perspective(Log(), X, X), np.zeros((2, 2)), atol=1e-12)


def test_nc_perspective_transpose(pd_pair):
    X, Y, _, _ = pd_pair
    g = Power(0.3)
    np.testing.assert_allclose(nc_perspective(g, X, Y), nc_perspective(g.transpose(), Y, X), atol=1e-10)


def test_composed_perspective_collapses(pd_pair):
    X, Y, _, _ = pd_pair
    Z = np.eye(3)
    g = Power(0.5)
    np.testing.assert_allclose(
        composed_perspective(g, Affine(1.0, 0.0), X, Y, Z), nc_perspective(g, X, Y), atol=1e-10
    )
