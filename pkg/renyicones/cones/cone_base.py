from __future__ import annotations

from abc import ABC, abstractmethod
from functools import cached_property
from typing import Any

import logging
import warnings

import numpy as np
import numpy.typing as npt
import scipy.linalg as sla

from ..aliasing import get_aliased_name
from ..cache import cache_result
from ..doc import doc_category
from ..errors import DimensionError, DomainError, FactorizationError


__all__ = (
    "Cone",
    "BarrierOracle",
    "solve_symmetric",
    "RESIDUAL_TOLERANCE",
)


logger = logging.getLogger(__name__)

#: Relative residual accepted from :func:`solve_symmetric`.
RESIDUAL_TOLERANCE = 1e-8
REFINEMENT_STEPS = 3


@doc_category("Cones")
def solve_symmetric(matrix: np.ndarray, rhs: np.ndarray, tolerance: float = RESIDUAL_TOLERANCE) -> np.ndarray:
    """
    Solves ``matrix @ x = rhs`` for a symmetric (usually positive definite) ``matrix``.

    A Cholesky factorization is tried first. If it fails, the system is solved by a symmetric
    indefinite (:math:`LDL^T`) factorization, followed by iterative refinement.

    Parameters
    ------------
    matrix: numpy.ndarray
        Symmetric matrix.
    rhs: numpy.ndarray
        Right-hand side, a vector or a matrix of columns.
    tolerance: float
        Largest relative residual accepted after refinement.

    Raises
    --------
    FactorizationError
        The system could not be solved to ``tolerance``.
    """
    try:
        factor = sla.cho_factor(matrix)
        return sla.cho_solve(factor, rhs)
    except (np.linalg.LinAlgError, ValueError):
        warnings.warn(
            "Cholesky factorization failed, falling back to a symmetric indefinite factorization.",
            RuntimeWarning,
            stacklevel=2,
        )

    try:
        x = sla.solve(matrix, rhs, assume_a="sym")
        for _ in range(REFINEMENT_STEPS):
            x = x + sla.solve(matrix, rhs - matrix @ x, assume_a="sym")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise FactorizationError(f"Symmetric factorization failed: {exc}") from exc

    residual = np.linalg.norm(matrix @ x - rhs)
    scale = max(np.linalg.norm(rhs), np.finfo(float).tiny)
    if not np.isfinite(residual) or residual > tolerance * scale:
        raise FactorizationError(
            f"Relative residual {residual / scale:.3e} exceeds {tolerance} after refinement.\n"
            "The point is probably too close to the boundary of the cone."
        )

    return x


@doc_category("Cones")
class BarrierOracle(ABC):
    """
    Barrier derivatives at one interior point of a cone.

    Everything is expressed in the real vector parameterization of the cone,
    where the Euclidean inner product is the trace inner product.
    Quantities are computed on first use and kept for the lifetime of the oracle.

    Parameters
    ------------
    cone: Cone
        The cone.
    x: numpy.ndarray
        Interior point, as a vector.
    """
    def __init__(self, cone: Cone, x: np.ndarray) -> None:
        self.cone = cone
        self.x = x

    @property
    @abstractmethod
    def value(self) -> float:
        "Barrier value."

    @property
    @abstractmethod
    def gradient(self) -> np.ndarray:
        "Barrier gradient."

    @abstractmethod
    def hessian_apply(self, d: np.ndarray) -> np.ndarray:
        "Hessian-vector product."

    @abstractmethod
    def third_directional(self, d: np.ndarray) -> float:
        "Third directional derivative :math:`\\mathsf{D}^3F[d, d, d]`."

    @cached_property
    def hessian_matrix(self) -> np.ndarray:
        "Dense Hessian, assembled column by column from :meth:`hessian_apply`."
        columns = [self.hessian_apply(column) for column in np.eye(self.cone.dim)]
        matrix = np.stack(columns, axis=1)
        return (matrix + matrix.T) / 2

    def hessian_solve(self, rhs: np.ndarray) -> np.ndarray:
        "Solves :math:`\\nabla^2F\\, d = \\mathrm{rhs}`."
        return solve_symmetric(self.hessian_matrix, rhs)

    def local_norm(self, d: np.ndarray) -> float:
        "The local norm :math:`\\sqrt{\\langle \\nabla^2F\\, d, d \\rangle}`."
        return float(np.sqrt(max(d @ self.hessian_apply(d), 0.0)))


@cache_result(max=32)
def _cached_oracle(cone: Cone, x: np.ndarray) -> BarrierOracle:
    return cone._make_oracle(x)


@doc_category("Cones")
class Cone(ABC):
    """
    Base class of the cone catalogue.

    A cone knows the real vector layout of its points, how to test interior
    membership and how to build a :class:`BarrierOracle` at an interior point.
    Subclasses are frozen dataclasses, so cones are hashable and can be shared freely.
    """
    @property
    @abstractmethod
    def dim(self) -> int:
        "Length of the real vector representing a point."

    @property
    @abstractmethod
    def nu(self) -> float:
        "Barrier parameter :math:`\\nu`."

    @abstractmethod
    def unpack(self, x: np.ndarray) -> Any:
        "Converts the vector ``x`` into the structured point."

    @abstractmethod
    def pack(self, point: Any) -> np.ndarray:
        "Converts a structured point into its vector."

    @abstractmethod
    def _interior(self, x: np.ndarray, margin: float) -> bool:
        ...

    @abstractmethod
    def interior_direction(self) -> np.ndarray:
        "Returns a fixed interior point ``e``. Adding a large multiple of ``e`` to any vector enters the interior."

    @abstractmethod
    def _make_oracle(self, x: np.ndarray) -> BarrierOracle:
        ...

    @property
    def kind(self) -> str:
        "Name of the cone kind, as written in problem files."
        return get_aliased_name(type(self)) or type(self).__name__

    def as_vector(self, x: npt.ArrayLike) -> np.ndarray:
        """
        Returns ``x`` as a vector of length :attr:`dim`.
        Structured points are packed first.

        Raises
        --------
        DimensionError
            The length doesn't match.
        """
        if not isinstance(x, np.ndarray) or x.ndim != 1:
            x = self.pack(x)

        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionError(f"{self!r} expects vectors of length {self.dim}, got shape {x.shape}.")

        return x

    def interior(self, x: npt.ArrayLike, margin: float = 0.0) -> bool:
        """
        Returns True if ``x`` is strictly inside the cone, with every defining
        quantity (eigenvalues and slacks) exceeding ``margin``.
        """
        if margin < 0:
            raise ValueError(f"Margin must be non-negative, got {margin}.")

        x = self.as_vector(x)
        if not np.all(np.isfinite(x)):
            return False

        return self._interior(x, margin)

    def oracle(self, x: npt.ArrayLike) -> BarrierOracle:
        """
        Returns the (cached) barrier oracle at ``x``.

        Raises
        --------
        DimensionError
            ``x`` has the wrong length.
        DomainError
            ``x`` is not an interior point.
        """
        x = np.array(self.as_vector(x))
        if not self.interior(x):
            raise DomainError(f"Point is not in the interior of {self!r}, the barrier is undefined.")

        x.setflags(write=False)
        return _cached_oracle(self, x)

    @abstractmethod
    def random_interior(self, rng: np.random.Generator, boundary_bias: float = 0.0) -> np.ndarray:
        """
        Random interior point.

        ``boundary_bias`` in :math:`[0, 1)` moves samples towards the boundary:
        larger values spread eigenvalues over more orders of magnitude and shrink slacks.
        """
