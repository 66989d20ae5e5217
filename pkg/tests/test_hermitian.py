import pytest
import numpy as np

from renyicones.errors import DimensionError, DomainError, HermitianityError
from renyicones.hermitian import (
    as_hermitian,
    direct_sum,
    divided_differences,
    eigh,
    frechet_derivative,
    frechet_third_directional,
    hermitian_basis,
    hermitize,
    inner,
    kron,
    partial_trace,
    random_hermitian,
    random_positive_definite,
    spectral_apply,
    unvectorize,
    vec_dim,
    vectorize,
)
from renyicones.scalar import Log, Power

from conftest import PAULI_X


def test_hermitize():
    M = np.array([[0, 1j], [0, 0]])
    expected = np.array([[0, 0.5j], [-0.5j, 0]])
    np.testing.assert_allclose(hermitize(M), expected)


def test_hermitize_rejects_rectangular():
    with pytest.raises(DimensionError):
        hermitize(np.zeros((2, 3)))


def test_as_hermitian():
    M = np.array([[1.0, 2.0], [2.0 + 1e-12, 3.0]])
    np.testing.assert_allclose(as_hermitian(M), hermitize(M))
    with pytest.raises(HermitianityError):
        as_hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        as_hermitian(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_eigh_ascending():
    decomposition = eigh(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(decomposition.eigenvalues, [1.0, 3.0])
    np.testing.assert_allclose(decomposition.reconstruct(), np.diag([3.0, 1.0]), atol=1e-14)


def test_eigh_reconstructs(rng):
    X = random_hermitian(rng, 5)
    decomposition = eigh(X)
    assert np.all(np.diff(decomposition.eigenvalues) >= 0)
    np.testing.assert_allclose(decomposition.reconstruct(), X, atol=1e-12)
    with pytest.raises(ValueError):
        decomposition.eigenvalues[0] = 0.0


def test_eigh_rejects_non_finite():
    with pytest.raises(DomainError):
        eigh(np.array([[np.inf, 0.0], [0.0, 1.0]]))


def test_spectral_apply():
    np.testing.assert_allclose(spectral_apply(Power(2), PAULI_X), np.eye(2), atol=1e-14)
    np.testing.assert_allclose(spectral_apply(Power(0.5), np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))


def test_spectral_apply_domain():
    with pytest.raises(DomainError):
        spectral_apply(Log(), np.diag([1.0, -1.0]))


def test_divided_differences_first_order():
    first = divided_differences(Power(2), np.array([1.0, 3.0]), 1)
    np.testing.assert_allclose(first, [[2.0, 4.0], [4.0, 6.0]])


def test_frechet_derivative_off_diagonal():
    D = frechet_derivative(Power(0.5), np.diag([1.0, 4.0]), [PAULI_X])
    np.testing.assert_allclose(D, PAULI_X / 3, atol=1e-14)


def test_frechet_derivative_arguments():
    X = np.diag([1.0, 2.0])
    with pytest.raises(ValueError):
        frechet_derivative(Power(2), X, [PAULI_X], order=3)
    with pytest.raises(ValueError):
        frechet_derivative(Power(2), X, [PAULI_X], order=2)
    with pytest.raises(DimensionError):
        frechet_derivative(Power(2), X, [np.eye(3)])


@pytest.mark.parametrize("g", [Power(0.5), Power(1.5), Log()], ids=repr)
def test_frechet_derivatives_match_differences(g, rng):
    X = random_positive_definite(rng, 4, spread=10.0)
    H = random_hermitian(rng, 4)
    H /= np.linalg.norm(H)
    step = 1e-3
    values = [spectral_apply(g, X + k * step * H) for k in (-2, -1, 0, 1, 2)]

    first = (values[3] - values[1]) / (2 * step)
    second = (values[3] - 2 * values[2] + values[1]) / step ** 2
    third = (values[4] - 2 * values[3] + 2 * values[1] - values[0]) / (2 * step ** 3)

    for analytic, estimate, tolerance in (
        (frechet_derivative(g, X, [H]), first, 1e-3),
        (frechet_derivative(g, X, [H, H], order=2), second, 1e-3),
        (frechet_third_directional(g, X, H), third, 1e-2),
    ):
        assert np.linalg.norm(analytic - estimate) <= tolerance * np.linalg.norm(analytic)


def test_frechet_derivative_degenerate_spectrum():
    # Equal eigenvalues use g' instead of a quotient.
    D = frechet_derivative(Power(3), np.eye(2), [PAULI_X])
    np.testing.assert_allclose(D, 3 * PAULI_X, atol=1e-12)


def test_kron_and_direct_sum():
    np.testing.assert_allclose(kron(np.diag([1.0, 2.0]), np.diag([3.0, 4.0])), np.diag([3.0, 4.0, 6.0, 8.0]))
    np.testing.assert_allclose(direct_sum(np.eye(1), 2 * np.eye(2)), np.diag([1.0, 2.0, 2.0]))


def test_partial_trace():
    M = kron(np.diag([1.0, 2.0]), np.eye(2))
    np.testing.assert_allclose(partial_trace(M, 2, (2, 2)), 2 * np.diag([1.0, 2.0]))
    np.testing.assert_allclose(partial_trace(np.eye(4), 1, (2, 2)), 2 * np.eye(2))


def test_partial_trace_of_product(rng):
    A = random_hermitian(rng, 2)
    B = random_hermitian(rng, 3)
    M = kron(A, B)
    np.testing.assert_allclose(partial_trace(M, 1, (2, 3)), np.trace(A) * B, atol=1e-12)
    np.testing.assert_allclose(partial_trace(M, 2, (2, 3)), np.trace(B) * A, atol=1e-12)
    with pytest.raises(DimensionError):
        partial_trace(M, 1, (2, 2))
    with pytest.raises(ValueError):
        partial_trace(M, 3, (2, 3))


@pytest.mark.parametrize("field", ["real", "complex"])
def test_vectorization_is_isometric(field, rng):
    A = random_hermitian(rng, 4, field)
    B = random_hermitian(rng, 4, field)
    a, b = vectorize(A, field), vectorize(B, field)
    assert a.shape == (vec_dim(4, field),)
    assert a @ b == pytest.approx(inner(A, B))
    np.testing.assert_allclose(unvectorize(a, 4, field), A, atol=1e-14)


def test_vectorization_layout():
    X = np.array([[1.0, 2.0 + 3.0j], [2.0 - 3.0j, 4.0]])
    np.testing.assert_allclose(vectorize(X), [1.0, 4.0, 2.0 * np.sqrt(2), 3.0 * np.sqrt(2)])


def test_hermitian_basis_orthonormal():
    basis = hermitian_basis(3)
    gram = np.array([[inner(A, B) for B in basis] for A in basis])
    np.testing.assert_allclose(gram, np.eye(9), atol=1e-14)


def test_unvectorize_wrong_length():
    with pytest.raises(DimensionError):
        unvectorize(np.zeros(5), 2)


def test_random_positive_definite_condition(rng):
    X = random_positive_definite(rng, 6, spread=50.0)
    eigenvalues = np.linalg.eigvalsh(X)
    assert eigenvalues.min() > 0
    assert eigenvalues.max() / eigenvalues.min() <= 50.0 + 1e-9
