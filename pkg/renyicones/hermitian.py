"""
Dense Hermitian linear algebra.

Matrices are plain :class:`numpy.ndarray` objects. Real symmetric matrices stay real,
complex Hermitian matrices are stored with a complex dtype.
Fréchet derivatives of spectral functions are computed with divided differences
in the eigenbasis (the Daleckii-Krein formulas).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Sequence, Tuple

import logging

import numpy as np
import numpy.typing as npt
import scipy.linalg as sla

from .doc import doc_category
from .errors import DecompositionError, DimensionError, DomainError, HermitianityError
from .scalar import ScalarFunction, Power


__all__ = (
    "HermitianMatrix",
    "Field",
    "EigenDecomposition",
    "SpectralDerivatives",
    "DEGENERACY_TOLERANCE",
    "HERMITIAN_TOLERANCE",
    "hermitize",
    "as_hermitian",
    "eigh",
    "spectral_apply",
    "divided_differences",
    "frechet_derivative",
    "frechet_third_directional",
    "kron",
    "direct_sum",
    "partial_trace",
    "inner",
    "vec_dim",
    "vectorize",
    "unvectorize",
    "hermitian_basis",
    "random_unitary",
    "random_hermitian",
    "random_positive_definite",
)


logger = logging.getLogger(__name__)

HermitianMatrix = npt.NDArray[np.inexact]
Field = Literal["real", "complex"]

#: Relative eigenvalue gap below which divided differences of order 1 and 2 use derivatives.
DEGENERACY_TOLERANCE = 1e-8
#: Third order quotients lose three gaps worth of precision, so they coalesce earlier.
THIRD_ORDER_DEGENERACY_TOLERANCE = 1e-5
#: Relative asymmetry accepted (and removed) by :func:`as_hermitian`.
HERMITIAN_TOLERANCE = 1e-8


def _check_square(M: np.ndarray):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {M.shape}.")


@doc_category("Hermitian core")
def hermitize(M: npt.ArrayLike) -> HermitianMatrix:
    """
    Returns the Hermitian part :math:`(M + M^*)/2` of a square matrix.

    Raises
    --------
    DimensionError
        ``M`` is not square.
    """
    M = np.asarray(M)
    _check_square(M)
    if not np.issubdtype(M.dtype, np.inexact):
        M = M.astype(float)

    return (M + M.conj().T) / 2


@doc_category("Hermitian core")
def as_hermitian(M: npt.ArrayLike, name: str = "matrix") -> HermitianMatrix:
    """
    Validates an externally supplied matrix and returns its Hermitian part.

    Asymmetry up to :data:`HERMITIAN_TOLERANCE` (relative, in Frobenius norm)
    is removed silently, anything larger is an error.

    Raises
    --------
    DimensionError
        ``M`` is not square.
    DomainError
        ``M`` contains NaN or infinite entries.
    HermitianityError
        ``M`` is too far from Hermitian.
    """
    M = np.asarray(M)
    _check_square(M)
    if not np.all(np.isfinite(M)):
        raise DomainError(f"The {name} contains non-finite entries.")

    asymmetry = np.linalg.norm(M - M.conj().T)
    if asymmetry > HERMITIAN_TOLERANCE * max(1.0, np.linalg.norm(M)):
        raise HermitianityError(
            f"The {name} is not Hermitian.\n"
            f"Frobenius norm of M - M* is {asymmetry:.3e}, "
            f"which exceeds the relative tolerance {HERMITIAN_TOLERANCE}."
        )

    return hermitize(M)


@doc_category("Hermitian core")
@dataclass(frozen=True)
class EigenDecomposition:
    """
    Spectral decomposition :math:`X = U \\operatorname{diag}(\\lambda) U^*`.

    Both arrays are read-only after construction.

    Parameters
    ------------
    eigenvalues: numpy.ndarray
        Real eigenvalues in ascending order.
    unitary: numpy.ndarray
        Matrix whose columns are the corresponding eigenvectors.
    """
    eigenvalues: np.ndarray
    unitary: np.ndarray

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.unitary.setflags(write=False)

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def to_eigenbasis(self, H: np.ndarray) -> np.ndarray:
        "Returns :math:`U^* H U`."
        return self.unitary.conj().T @ H @ self.unitary

    def from_eigenbasis(self, H: np.ndarray) -> np.ndarray:
        "Returns :math:`U H U^*`, hermitized."
        return hermitize(self.unitary @ H @ self.unitary.conj().T)

    def apply(self, values: np.ndarray) -> HermitianMatrix:
        "Returns :math:`U \\operatorname{diag}(values) U^*`."
        return hermitize((self.unitary * values) @ self.unitary.conj().T)

    def reconstruct(self) -> HermitianMatrix:
        return self.apply(self.eigenvalues)


@doc_category("Hermitian core")
def eigh(X: HermitianMatrix) -> EigenDecomposition:
    """
    Eigendecomposition of a Hermitian matrix.

    LAPACK's ``evr`` driver is tried first and ``evd`` second.
    Results are deterministic for a fixed input on a fixed platform,
    bit-exactness across platforms is not provided.

    Raises
    --------
    DecompositionError
        Neither driver converged.
    """
    X = np.asarray(X)
    _check_square(X)
    if not np.all(np.isfinite(X)):
        raise DomainError("Can't decompose a matrix with non-finite entries.")

    for driver in ("evr", "evd"):
        try:
            values, vectors = sla.eigh(X, driver=driver, check_finite=False)
            return EigenDecomposition(values, vectors)
        except (np.linalg.LinAlgError, ValueError) as exc:
            logger.debug("eigh driver %s failed: %s", driver, exc)

    raise DecompositionError(f"Eigensolver did not converge on a {X.shape[0]}x{X.shape[0]} matrix.")


def _decompose(X) -> EigenDecomposition:
    return X if isinstance(X, EigenDecomposition) else eigh(X)


@doc_category("Hermitian core")
def spectral_apply(g: ScalarFunction, X) -> HermitianMatrix:
    """
    Evaluates :math:`g(X) = \\sum_i g(\\lambda_i) v_i v_i^*`.

    Parameters
    ------------
    g: ScalarFunction
        The function to apply.
    X: HermitianMatrix | EigenDecomposition
        The argument or its (precomputed) decomposition.

    Raises
    --------
    DomainError
        An eigenvalue lies outside the domain of ``g``.
    """
    decomposition = _decompose(X)
    g.check_domain(decomposition.eigenvalues)
    return decomposition.apply(g(decomposition.eigenvalues))


def _close(a: np.ndarray, b: np.ndarray, tolerance: float) -> np.ndarray:
    return np.abs(a - b) <= tolerance * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))


def _first_divided(g: ScalarFunction, lam: np.ndarray) -> np.ndarray:
    a = lam[:, None]
    b = lam[None, :]
    close = _close(a, b, DEGENERACY_TOLERANCE)
    with np.errstate(divide="ignore", invalid="ignore"):
        if isinstance(g, Power) and np.all(lam > 0):
            # b^p * expm1(p log(a/b)) / (a - b) has no cancellation for nearby a, b
            quotient = g.scale * np.power(b, g.p) * np.expm1(g.p * np.log(a / b)) / (a - b)
        else:
            values = g(lam)
            quotient = (values[:, None] - values[None, :]) / (a - b)

    return np.where(close, g.derivative((a + b) / 2, 1), quotient)


def _second_divided(g: ScalarFunction, lam: np.ndarray, first: np.ndarray) -> np.ndarray:
    li = lam[:, None, None]
    lj = lam[None, :, None]
    lk = lam[None, None, :]
    far_ik = ~_close(li, lk, DEGENERACY_TOLERANCE)
    far_ij = ~_close(li, lj, DEGENERACY_TOLERANCE)
    with np.errstate(divide="ignore", invalid="ignore"):
        # g[a,b,c] = (g[a,b] - g[b,c]) / (a - c)
        by_ik = (first[:, :, None] - first[None, :, :]) / (li - lk)
        # g[a,b,c] = (g[a,c] - g[c,b]) / (a - b)
        by_ij = (first[:, None, :] - first.T[None, :, :]) / (li - lj)

    mean = (li + lj + lk) / 3
    return np.where(far_ik, by_ik, np.where(far_ij, by_ij, g.derivative(mean, 2) / 2))


def _third_divided(g: ScalarFunction, lam: np.ndarray, second: np.ndarray) -> np.ndarray:
    n = lam.shape[0]
    li = lam.reshape(n, 1, 1, 1)
    lj = lam.reshape(1, n, 1, 1)
    lk = lam.reshape(1, 1, n, 1)
    ll = lam.reshape(1, 1, 1, n)
    tol = THIRD_ORDER_DEGENERACY_TOLERANCE
    far_il = ~_close(li, ll, tol)
    far_ik = ~_close(li, lk, tol)
    far_ij = ~_close(li, lj, tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        # g[a,b,c,d] = (g[a,b,c] - g[b,c,d]) / (a - d)
        by_il = (second[:, :, :, None] - second[None, :, :, :]) / (li - ll)
        # g[a,b,c,d] = (g[a,b,d] - g[b,d,c]) / (a - c)
        by_ik = (second[:, :, None, :] - np.transpose(second, (0, 2, 1))[None, :, :, :]) / (li - lk)
        # g[a,b,c,d] = (g[a,c,d] - g[c,d,b]) / (a - b)
        by_ij = (second[:, None, :, :] - np.transpose(second, (1, 2, 0))[None, :, :, :]) / (li - lj)

    mean = (li + lj + lk + ll) / 4
    return np.where(
        far_il, by_il,
        np.where(far_ik, by_ik, np.where(far_ij, by_ij, g.derivative(mean, 3) / 6))
    )


@doc_category("Hermitian core")
def divided_differences(g: ScalarFunction, eigenvalues: np.ndarray, order: int) -> np.ndarray:
    """
    Returns the tensor of ``order``-th divided differences of ``g`` over ``eigenvalues``.

    Eigenvalues closer than :data:`DEGENERACY_TOLERANCE` (relative to
    :math:`\\max(1, |\\lambda_i|, |\\lambda_j|)`) are treated as equal and the
    quotient is replaced by the derivative at their mean.

    Parameters
    ------------
    g: ScalarFunction
        The function.
    eigenvalues: numpy.ndarray
        Points of the differences.
    order: int
        Order in ``1..3``.
    """
    if order not in {1, 2, 3}:
        raise ValueError(f"Divided differences are available for orders 1 to 3, got {order}.")

    lam = np.asarray(eigenvalues, dtype=float)
    result = _first_divided(g, lam)
    if order >= 2:
        result = _second_divided(g, lam, result)
    if order == 3:
        result = _third_divided(g, lam, result)

    return result


@doc_category("Hermitian core")
class SpectralDerivatives:
    """
    Fréchet derivatives of the spectral function :math:`X \\mapsto g(X)` at a fixed point.

    The eigendecomposition and divided difference tensors are computed on first use
    and reused by every subsequent call, which makes the object the right tool
    when many directions are applied at the same point.

    Parameters
    ------------
    g: ScalarFunction
        The function.
    X: HermitianMatrix | EigenDecomposition
        The point (or its decomposition).

    Raises
    --------
    DomainError
        The spectrum of ``X`` is not inside the domain of ``g``.
    """
    def __init__(self, g: ScalarFunction, X) -> None:
        self.g = g
        self.decomposition = _decompose(X)
        g.check_domain(self.decomposition.eigenvalues)

    @cached_property
    def value(self) -> HermitianMatrix:
        return self.decomposition.apply(self.g(self.decomposition.eigenvalues))

    @cached_property
    def first_differences(self) -> np.ndarray:
        return divided_differences(self.g, self.decomposition.eigenvalues, 1)

    @cached_property
    def second_differences(self) -> np.ndarray:
        lam = self.decomposition.eigenvalues
        return _second_divided(self.g, lam, self.first_differences)

    @cached_property
    def third_differences(self) -> np.ndarray:
        lam = self.decomposition.eigenvalues
        return _third_divided(self.g, lam, self.second_differences)

    def first(self, H: HermitianMatrix) -> HermitianMatrix:
        ":math:`\\mathsf{D}g(X)[H]`. The map is self-adjoint for the trace inner product."
        d = self.decomposition
        return d.from_eigenbasis(self.first_differences * d.to_eigenbasis(H))

    def second(self, H1: HermitianMatrix, H2: HermitianMatrix) -> HermitianMatrix:
        """
        :math:`\\mathsf{D}^2 g(X)[H_1, H_2]`.

        The form :math:`\\langle W, \\mathsf{D}^2 g(X)[H_1, H_2]\\rangle` is symmetric in
        all three matrices, so ``second(H1, W)`` is also the gradient of that form in ``H2``.
        """
        d = self.decomposition
        a = d.to_eigenbasis(H1)
        b = d.to_eigenbasis(H2)
        gamma = self.second_differences
        result = np.einsum("ikj,ik,kj->ij", gamma, a, b) + np.einsum("ikj,ik,kj->ij", gamma, b, a)
        return d.from_eigenbasis(result)

    def third(self, H: HermitianMatrix) -> HermitianMatrix:
        ":math:`\\mathsf{D}^3 g(X)[H, H, H]`."
        d = self.decomposition
        a = d.to_eigenbasis(H)
        result = 6 * np.einsum("iklj,ik,kl,lj->ij", self.third_differences, a, a, a, optimize=True)
        return d.from_eigenbasis(result)


@doc_category("Hermitian core")
def frechet_derivative(
    g: ScalarFunction,
    X: HermitianMatrix,
    directions: Sequence[HermitianMatrix],
    order: int = 1,
) -> HermitianMatrix:
    """
    Fréchet derivative of the spectral function :math:`g` at ``X``.

    Parameters
    ------------
    g: ScalarFunction
        The function.
    X: HermitianMatrix
        The point.
    directions: Sequence[HermitianMatrix]
        One direction for ``order=1``, two for ``order=2``.
    order: int
        1 or 2.

    Returns
    ----------
    HermitianMatrix
        :math:`\\mathsf{D}g(X)[H]` or :math:`\\mathsf{D}^2 g(X)[H_1, H_2]`.

    Raises
    --------
    ValueError
        ``order`` is not 1 or 2, or doesn't match the number of directions.
    DomainError
        The spectrum of ``X`` is outside the domain of ``g``.
    """
    if order not in {1, 2}:
        raise ValueError(f"Fréchet derivatives are available for orders 1 and 2, got {order}.")

    if len(directions) != order:
        raise ValueError(f"Order {order} needs {order} direction(s), got {len(directions)}.")

    derivatives = SpectralDerivatives(g, X)
    for H in directions:
        if np.shape(H) != np.shape(X):
            raise DimensionError(f"Direction of shape {np.shape(H)} doesn't match the point {np.shape(X)}.")

    if order == 1:
        return derivatives.first(directions[0])

    return derivatives.second(*directions)


@doc_category("Hermitian core")
def frechet_third_directional(g: ScalarFunction, X: HermitianMatrix, H: HermitianMatrix) -> HermitianMatrix:
    ":math:`\\mathsf{D}^3 g(X)[H, H, H]` via third divided differences."
    return SpectralDerivatives(g, X).third(H)


@doc_category("Hermitian core")
def kron(X: HermitianMatrix, Y: HermitianMatrix) -> HermitianMatrix:
    "Kronecker product :math:`X \\otimes Y`."
    return np.kron(X, Y)


@doc_category("Hermitian core")
def direct_sum(X: HermitianMatrix, Y: HermitianMatrix) -> HermitianMatrix:
    "Block diagonal matrix :math:`X \\oplus Y`."
    return sla.block_diag(np.atleast_2d(X), np.atleast_2d(Y))


@doc_category("Hermitian core")
def partial_trace(M: HermitianMatrix, subsystem: int, dims: Tuple[int, int]) -> HermitianMatrix:
    """
    Partial trace over one factor of :math:`\\mathbb{C}^n \\otimes \\mathbb{C}^m`.

    ``subsystem=1`` traces out the first factor (:math:`\\operatorname{tr}_1(X \\otimes Y) = \\operatorname{tr}[X] Y`),
    ``subsystem=2`` the second one (:math:`\\operatorname{tr}_2(X \\otimes Y) = \\operatorname{tr}[Y] X`).

    Raises
    --------
    DimensionError
        ``M`` is not of size :math:`nm \\times nm`.
    """
    n, m = dims
    M = np.asarray(M)
    if M.shape != (n * m, n * m):
        raise DimensionError(f"Matrix of shape {M.shape} doesn't factor as dims {dims}.")

    blocks = M.reshape(n, m, n, m)
    if subsystem == 1:
        return np.einsum("ijik->jk", blocks)
    if subsystem == 2:
        return np.einsum("ijkj->ik", blocks)

    raise ValueError(f"Subsystem must be 1 or 2, got {subsystem}.")


@doc_category("Hermitian core")
def inner(A: HermitianMatrix, B: HermitianMatrix) -> float:
    "Trace inner product :math:`\\operatorname{Re} \\operatorname{tr}[A^* B]`."
    return float(np.real(np.vdot(A, B)))


@doc_category("Hermitian core")
def vec_dim(n: int, field: Field = "complex") -> int:
    "Number of real parameters of an :math:`n \\times n` Hermitian (``complex``) or symmetric (``real``) matrix."
    if field == "real":
        return n * (n + 1) // 2
    if field == "complex":
        return n * n

    raise ValueError(f"Field must be 'real' or 'complex', got {field!r}.")


@doc_category("Hermitian core")
def vectorize(X: HermitianMatrix, field: Field = "complex") -> np.ndarray:
    """
    Real parameterization of a Hermitian matrix.

    The layout is the diagonal, followed by :math:`\\sqrt{2}\\operatorname{Re} X_{ij}` for
    :math:`i < j` in :func:`numpy.triu_indices` order and, for the complex field,
    by :math:`\\sqrt{2}\\operatorname{Im} X_{ij}` in the same order.
    The Euclidean inner product of two vectors equals the trace inner product of the matrices.
    """
    X = np.asarray(X)
    n = X.shape[0]
    rows, cols = np.triu_indices(n, 1)
    upper = X[rows, cols] * np.sqrt(2)
    parts = [np.real(np.diag(X)), np.real(upper)]
    if field == "complex":
        parts.append(np.imag(upper))
    elif field != "real":
        raise ValueError(f"Field must be 'real' or 'complex', got {field!r}.")

    return np.concatenate(parts).astype(float)


@doc_category("Hermitian core")
def unvectorize(v: np.ndarray, n: int, field: Field = "complex") -> HermitianMatrix:
    "Inverse of :func:`vectorize`."
    v = np.asarray(v, dtype=float)
    if v.shape != (vec_dim(n, field),):
        raise DimensionError(f"Vector of length {v.shape} doesn't parameterize a {n}x{n} {field} matrix.")

    rows, cols = np.triu_indices(n, 1)
    k = len(rows)
    upper = v[n:n + k] / np.sqrt(2)
    if field == "complex":
        upper = upper + 1j * v[n + k:] / np.sqrt(2)
        X = np.zeros((n, n), dtype=complex)
    else:
        X = np.zeros((n, n))

    X[rows, cols] = upper
    X = X + X.conj().T
    X[np.diag_indices(n)] = v[:n]
    return X


@doc_category("Hermitian core")
def hermitian_basis(n: int, field: Field = "complex") -> np.ndarray:
    """
    Orthonormal basis (trace inner product) matching :func:`vectorize`.

    Returns an array of shape ``(vec_dim(n, field), n, n)``.
    """
    dim = vec_dim(n, field)
    return np.stack([unvectorize(np.eye(dim)[k], n, field) for k in range(dim)])


@doc_category("Hermitian core")
def random_unitary(rng: np.random.Generator, n: int, field: Field = "complex") -> np.ndarray:
    "Haar distributed unitary (``complex``) or orthogonal (``real``) matrix."
    G = rng.standard_normal((n, n))
    if field == "complex":
        G = (G + 1j * rng.standard_normal((n, n))) / np.sqrt(2)

    Q, R = np.linalg.qr(G)
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases


@doc_category("Hermitian core")
def random_hermitian(rng: np.random.Generator, n: int, field: Field = "complex") -> HermitianMatrix:
    "Gaussian Hermitian matrix with unit-variance entries."
    G = rng.standard_normal((n, n))
    if field == "complex":
        G = G + 1j * rng.standard_normal((n, n))

    return hermitize(G)


@doc_category("Hermitian core")
def random_positive_definite(
    rng: np.random.Generator,
    n: int,
    field: Field = "complex",
    spread: float = 1e2,
) -> HermitianMatrix:
    """
    Random positive definite matrix with Haar eigenvectors.

    Eigenvalues are log-uniform on ``[1/spread, 1]``, which bounds the condition number by ``spread``.
    """
    eigenvalues = np.exp(rng.uniform(-np.log(spread), 0.0, n))
    U = random_unitary(rng, n, field)
    return hermitize((U * eigenvalues) @ U.conj().T)
