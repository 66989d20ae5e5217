from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Tuple

import numpy as np

from ..aliasing import register_alias
from ..doc import doc_category
from ..errors import DimensionError, DomainError
from ..hermitian import Field, HermitianMatrix, random_positive_definite, vec_dim
from ..tracefn import DirectionPair, TraceFnParams, d_alpha_perspective, psi_point
from .cone_base import Cone, BarrierOracle
from .cone_renyi import (
    LogdetPair,
    check_matrix_shapes,
    join_matrices,
    matrices_interior,
    split_matrices,
)


__all__ = (
    "PerspectivePoint",
    "RenyiPerspEpi",
)


@doc_category("Cones")
class PerspectivePoint(NamedTuple):
    "Point :math:`(t, u, X, Y)` of the perspective cone."
    t: float
    u: float
    X: HermitianMatrix
    Y: HermitianMatrix


class PerspectiveOracle(BarrierOracle):
    """
    Barrier :math:`-\\log(t - \\mathbf{D}_\\alpha(u, X, Y)) - \\log u - \\log\\det X - \\log\\det Y`
    with :math:`\\mathbf{D}_\\alpha(u, X, Y) = c\\, u \\log(\\Psi_\\alpha(X, Y) / u)`, :math:`c = 1/(\\alpha - 1)`.
    """
    def __init__(self, cone: RenyiPerspEpi, x: np.ndarray) -> None:
        super().__init__(cone, x)
        self.t, self.u, X, Y = cone.unpack(x)
        self.c = 1 / (cone.alpha - 1)
        self.psi = psi_point(cone.params, X, Y)
        self.logdet = LogdetPair(self.psi, cone.field)

    @cached_property
    def psi_gradient(self) -> np.ndarray:
        return join_matrices(*self.psi.gradient, self.cone.field)

    @cached_property
    def divergence(self) -> float:
        return self.c * self.u * np.log(self.psi.value / self.u)

    @cached_property
    def slack(self) -> float:
        return self.t - self.divergence

    @cached_property
    def divergence_gradient(self) -> np.ndarray:
        "Gradient of :math:`\\mathbf{D}_\\alpha` with respect to ``(t, u, X, Y)``."
        u, psi = self.u, self.psi.value
        return np.concatenate((
            [0.0, self.c * (np.log(psi / u) - 1)],
            self.c * u / psi * self.psi_gradient,
        ))

    @cached_property
    def slack_gradient(self) -> np.ndarray:
        gradient = -self.divergence_gradient
        gradient[0] = 1.0
        return gradient

    @cached_property
    def value(self) -> float:
        return float(-np.log(self.slack) - np.log(self.u) + self.logdet.value)

    @cached_property
    def gradient(self) -> np.ndarray:
        return (
            -self.slack_gradient / self.slack
            + np.concatenate(([0.0, -1 / self.u], self.logdet.gradient))
        )

    def _split(self, d: np.ndarray):
        _, du, H, V = self.cone.unpack(d)
        return du, DirectionPair(H, V)

    def divergence_hessian_apply(self, d: np.ndarray) -> np.ndarray:
        "Hessian-vector product of :math:`\\mathbf{D}_\\alpha`."
        du, direction = self._split(d)
        u, psi, c = self.u, self.psi.value, self.c
        dpsi = self.psi_gradient @ d[2:]
        hpsi = join_matrices(*self.psi.hessian_apply(direction), self.cone.field)
        matrix_part = du * self.psi_gradient / psi + u * hpsi / psi - u * dpsi * self.psi_gradient / psi ** 2
        return np.concatenate(([0.0, c * (dpsi / psi - du / u)], c * matrix_part))

    def hessian_apply(self, d: np.ndarray) -> np.ndarray:
        s = self.slack
        du, direction = self._split(d)
        ds = self.slack_gradient @ d
        return (
            self.slack_gradient * ds / s ** 2
            + self.divergence_hessian_apply(d) / s
            + np.concatenate(([0.0, du / self.u ** 2], self.logdet.hessian_apply(*direction)))
        )

    def divergence_derivatives(self, d: np.ndarray) -> Tuple[float, float, float]:
        """
        First, second and third directional derivatives of :math:`\\mathbf{D}_\\alpha` along ``d``.
        """
        u, psi, c = self.u, self.psi.value, self.c
        du, direction = self._split(d)
        d1 = self.psi_gradient @ d[2:]
        d2 = self.psi.hessian_bilinear(direction, direction)
        d3 = self.psi.third_directional(direction)

        first = c * (du * (np.log(psi / u) - 1) + u * d1 / psi)
        second = c * (2 * du * d1 / psi - du ** 2 / u + u * d2 / psi - u * d1 ** 2 / psi ** 2)
        third = c * (
            3 * du * d2 / psi - 3 * du * d1 ** 2 / psi ** 2 + du ** 3 / u ** 2
            + u * d3 / psi - 3 * u * d1 * d2 / psi ** 2 + 2 * u * d1 ** 3 / psi ** 3
        )
        return float(first), float(second), float(third)

    def third_directional(self, d: np.ndarray) -> float:
        s, u = self.slack, self.u
        du, direction = self._split(d)
        _, divergence_2, divergence_3 = self.divergence_derivatives(d)
        ds = self.slack_gradient @ d
        dds = -divergence_2
        ddds = -divergence_3
        return float(
            -ddds / s + 3 * ds * dds / s ** 2 - 2 * ds ** 3 / s ** 3
            - 2 * (du / u) ** 3
            + self.logdet.third_directional(*direction)
        )


@doc_category("Cones")
@dataclass(frozen=True)
class RenyiPerspEpi(Cone):
    """
    Closed epigraph of the Rényi perspective
    :math:`\\{(t, u, X, Y): \\mathbf{D}_\\alpha(u, X, Y) \\le t\\}` for :math:`\\alpha \\in [1/2, 1)`.

    Points are :class:`PerspectivePoint` tuples, stored as vectors ``[t, u, vec X, vec Y]``.
    The barrier :math:`-\\log(t - \\mathbf{D}_\\alpha) - \\log u - \\log\\det X - \\log\\det Y`
    has parameter :math:`2 + 2n`.

    Parameters
    ------------
    n: int
        Matrix size.
    alpha: float
        Order in :math:`[1/2, 1)`.
    field: Literal["real", "complex"]
        Scalar field of the matrices.
    """
    n: int
    alpha: float
    field: Field = "complex"

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"RenyiPerspEpi needs n >= 1, got {self.n}.")

        if not 0.5 <= self.alpha < 1:
            raise DomainError(f"RenyiPerspEpi is defined for alpha in [0.5, 1), got {self.alpha}.")

        vec_dim(self.n, self.field)

    @property
    def params(self) -> TraceFnParams:
        return TraceFnParams(self.alpha)

    @property
    def dim(self) -> int:
        return 2 + 2 * vec_dim(self.n, self.field)

    @property
    def nu(self) -> float:
        return float(2 + 2 * self.n)

    def unpack(self, x: np.ndarray) -> PerspectivePoint:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionError(f"{self!r} expects vectors of length {self.dim}, got shape {x.shape}.")

        return PerspectivePoint(float(x[0]), float(x[1]), *split_matrices(x[2:], self.n, self.field))

    def pack(self, point: PerspectivePoint) -> np.ndarray:
        t, u, X, Y = point
        check_matrix_shapes(self.n, X, Y)
        return np.concatenate(([float(t), float(u)], join_matrices(X, Y, self.field)))

    def slack(self, point: PerspectivePoint) -> float:
        "Returns :math:`t - \\mathbf{D}_\\alpha(u, X, Y)`."
        t, u, X, Y = point
        return t - d_alpha_perspective(self.params, u, X, Y)

    def _interior(self, x: np.ndarray, margin: float) -> bool:
        point = self.unpack(x)
        if not point.u > margin or not matrices_interior(point.X, point.Y, margin):
            return False

        try:
            return self.slack(point) > margin
        except DomainError:
            return False

    def interior_direction(self) -> np.ndarray:
        I = np.eye(self.n)
        return self.pack(PerspectivePoint(1.0, 1.0, I, I))

    def random_interior(self, rng: np.random.Generator, boundary_bias: float = 0.0) -> np.ndarray:
        spread = 10 ** (2 + 4 * boundary_bias)
        X = random_positive_definite(rng, self.n, self.field, spread)
        Y = random_positive_definite(rng, self.n, self.field, spread)
        u = 10 ** rng.uniform(-1, 1)
        divergence = d_alpha_perspective(self.params, u, X, Y)
        slack = 10 ** rng.uniform(-1 - 6 * boundary_bias, 0) * max(abs(divergence), 1.0)
        return self.pack(PerspectivePoint(divergence + slack, u, X, Y))

    def _make_oracle(self, x: np.ndarray) -> BarrierOracle:
        return PerspectiveOracle(self, x)


register_alias(RenyiPerspEpi, "renyi-persp-epi")
