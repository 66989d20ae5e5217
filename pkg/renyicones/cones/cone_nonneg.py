from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..aliasing import register_alias
from ..doc import doc_category
from ..errors import DimensionError
from .cone_base import Cone, BarrierOracle


__all__ = (
    "NonNeg",
)


class NonNegOracle(BarrierOracle):
    @cached_property
    def value(self) -> float:
        return float(-np.sum(np.log(self.x)))

    @cached_property
    def gradient(self) -> np.ndarray:
        return -1 / self.x

    def hessian_apply(self, d: np.ndarray) -> np.ndarray:
        return d / self.x ** 2

    @cached_property
    def hessian_matrix(self) -> np.ndarray:
        return np.diag(1 / self.x ** 2)

    def hessian_solve(self, rhs: np.ndarray) -> np.ndarray:
        x = self.x if np.ndim(rhs) == 1 else self.x[:, None]
        return rhs * x ** 2

    def third_directional(self, d: np.ndarray) -> float:
        return float(-2 * np.sum((d / self.x) ** 3))


@doc_category("Cones")
@dataclass(frozen=True)
class NonNeg(Cone):
    """
    Nonnegative orthant :math:`\\mathbb{R}^k_+` with the barrier :math:`-\\sum_i \\log x_i`.

    Points are plain vectors of length ``k``.

    Parameters
    ------------
    k: int
        Dimension.
    """
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DimensionError(f"NonNeg cone needs k >= 1, got {self.k}.")

    @property
    def dim(self) -> int:
        return self.k

    @property
    def nu(self) -> float:
        return float(self.k)

    def unpack(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)

    def pack(self, point) -> np.ndarray:
        return np.ravel(np.asarray(point, dtype=float))

    def _interior(self, x: np.ndarray, margin: float) -> bool:
        return bool(np.all(x > margin))

    def interior_direction(self) -> np.ndarray:
        return np.ones(self.k)

    def random_interior(self, rng: np.random.Generator, boundary_bias: float = 0.0) -> np.ndarray:
        decades = 2 + 6 * boundary_bias
        return 10 ** rng.uniform(-decades, 0, self.k)

    def _make_oracle(self, x: np.ndarray) -> BarrierOracle:
        return NonNegOracle(self, x)


register_alias(NonNeg, "nonneg")
