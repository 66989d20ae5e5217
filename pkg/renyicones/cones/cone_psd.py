from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..aliasing import register_alias
from ..doc import doc_category
from ..errors import DimensionError
from ..hermitian import (
    Field,
    HermitianMatrix,
    eigh,
    hermitize,
    random_positive_definite,
    unvectorize,
    vec_dim,
    vectorize,
)
from .cone_base import Cone, BarrierOracle


__all__ = (
    "PSDCone",
    "logdet_third",
)


def logdet_third(X_inverse: HermitianMatrix, H: HermitianMatrix) -> float:
    "Third directional derivative of :math:`-\\log\\det X`, given :math:`X^{-1}`."
    K = X_inverse @ H
    return float(-2 * np.real(np.trace(K @ K @ K)))


class PSDOracle(BarrierOracle):
    def __init__(self, cone: PSDCone, x: np.ndarray) -> None:
        super().__init__(cone, x)
        self.decomposition = eigh(cone.unpack(x))

    @cached_property
    def inverse(self) -> HermitianMatrix:
        return self.decomposition.apply(1 / self.decomposition.eigenvalues)

    @cached_property
    def value(self) -> float:
        return float(-np.sum(np.log(self.decomposition.eigenvalues)))

    @cached_property
    def gradient(self) -> np.ndarray:
        return -vectorize(self.inverse, self.cone.field)

    def hessian_apply(self, d: np.ndarray) -> np.ndarray:
        H = self.cone.unpack(d)
        return vectorize(hermitize(self.inverse @ H @ self.inverse), self.cone.field)

    def hessian_solve(self, rhs: np.ndarray) -> np.ndarray:
        if np.ndim(rhs) == 2:
            return np.stack([self.hessian_solve(column) for column in rhs.T], axis=1)

        X = self.decomposition.reconstruct()
        R = self.cone.unpack(rhs)
        return vectorize(hermitize(X @ R @ X), self.cone.field)

    def third_directional(self, d: np.ndarray) -> float:
        return logdet_third(self.inverse, self.cone.unpack(d))


@doc_category("Cones")
@dataclass(frozen=True)
class PSDCone(Cone):
    """
    Cone of positive semidefinite matrices with the barrier :math:`-\\log\\det X`.

    Points are Hermitian (``field="complex"``) or real symmetric (``field="real"``) matrices,
    stored as vectors through :func:`~renyicones.hermitian.vectorize`.

    Parameters
    ------------
    n: int
        Matrix size.
    field: Literal["real", "complex"]
        Scalar field of the matrices.
    """
    n: int
    field: Field = "complex"

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"PSD cone needs n >= 1, got {self.n}.")

        vec_dim(self.n, self.field)  # Validates the field

    @property
    def dim(self) -> int:
        return vec_dim(self.n, self.field)

    @property
    def nu(self) -> float:
        return float(self.n)

    def unpack(self, x: np.ndarray) -> HermitianMatrix:
        return unvectorize(x, self.n, self.field)

    def pack(self, point: HermitianMatrix) -> np.ndarray:
        point = np.asarray(point)
        if point.shape != (self.n, self.n):
            raise DimensionError(f"Expected a {self.n}x{self.n} matrix, got shape {point.shape}.")

        return vectorize(point, self.field)

    def _interior(self, x: np.ndarray, margin: float) -> bool:
        return bool(np.linalg.eigvalsh(self.unpack(x))[0] > margin)

    def interior_direction(self) -> np.ndarray:
        return vectorize(np.eye(self.n), self.field)

    def random_interior(self, rng: np.random.Generator, boundary_bias: float = 0.0) -> np.ndarray:
        spread = 10 ** (2 + 6 * boundary_bias)
        return vectorize(random_positive_definite(rng, self.n, self.field, spread), self.field)

    def _make_oracle(self, x: np.ndarray) -> BarrierOracle:
        return PSDOracle(self, x)


register_alias(PSDCone, "psd")
