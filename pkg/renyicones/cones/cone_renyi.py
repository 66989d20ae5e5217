from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Tuple

import numpy as np

from ..aliasing import register_alias
from ..doc import doc_category
from ..errors import DimensionError, DomainError
from ..hermitian import (
    Field,
    HermitianMatrix,
    hermitize,
    random_positive_definite,
    unvectorize,
    vec_dim,
    vectorize,
)
from ..tracefn import DirectionPair, TraceFnParams, psi_point, psi_value
from .cone_base import Cone, BarrierOracle
from .cone_psd import logdet_third


__all__ = (
    "RenyiPoint",
    "RenyiCone",
    "RenyiHypo",
    "RenyiEpi",
)


@doc_category("Cones")
class RenyiPoint(NamedTuple):
    "Point :math:`(t, X, Y)` of a Rényi hypograph or epigraph cone."
    t: float
    X: HermitianMatrix
    Y: HermitianMatrix


def split_matrices(v: np.ndarray, n: int, field: Field) -> Tuple[HermitianMatrix, HermitianMatrix]:
    "Splits ``[vec X, vec Y]`` into ``(X, Y)``."
    m = vec_dim(n, field)
    return unvectorize(v[:m], n, field), unvectorize(v[m:], n, field)


def join_matrices(X: HermitianMatrix, Y: HermitianMatrix, field: Field) -> np.ndarray:
    return np.concatenate((vectorize(X, field), vectorize(Y, field)))


def matrices_interior(X: HermitianMatrix, Y: HermitianMatrix, margin: float) -> bool:
    return bool(np.linalg.eigvalsh(X)[0] > margin and np.linalg.eigvalsh(Y)[0] > margin)


def check_matrix_shapes(n: int, *matrices):
    for M in matrices:
        if np.shape(M) != (n, n):
            raise DimensionError(f"Expected a {n}x{n} matrix, got shape {np.shape(M)}.")


class LogdetPair:
    """
    The :math:`-\\log\\det X - \\log\\det Y` part of the Rényi barriers, at a fixed point.
    Decompositions are borrowed from the trace function evaluation.
    """
    def __init__(self, psi, field: Field) -> None:
        self.psi = psi
        self.field = field

    @cached_property
    def x_inverse(self) -> HermitianMatrix:
        decomposition = self.psi.x_decomposition
        return decomposition.apply(1 / decomposition.eigenvalues)

    @cached_property
    def y_inverse(self) -> HermitianMatrix:
        decomposition = self.psi.y_decomposition
        return decomposition.apply(1 / decomposition.eigenvalues)

    @cached_property
    def value(self) -> float:
        return float(
            -np.sum(np.log(self.psi.x_decomposition.eigenvalues))
            - np.sum(np.log(self.psi.y_decomposition.eigenvalues))
        )

    @cached_property
    def gradient(self) -> np.ndarray:
        return -join_matrices(self.x_inverse, self.y_inverse, self.field)

    def hessian_apply(self, H: HermitianMatrix, V: HermitianMatrix) -> np.ndarray:
        Xi, Yi = self.x_inverse, self.y_inverse
        return join_matrices(hermitize(Xi @ H @ Xi), hermitize(Yi @ V @ Yi), self.field)

    def third_directional(self, H: HermitianMatrix, V: HermitianMatrix) -> float:
        return logdet_third(self.x_inverse, H) + logdet_third(self.y_inverse, V)


class RenyiOracle(BarrierOracle):
    """
    Barrier :math:`-\\log s - \\log\\det X - \\log\\det Y` with the slack
    :math:`s = \\sigma(\\Psi_\\alpha(X, Y) - t)`, :math:`\\sigma = 1` for the hypograph
    and :math:`\\sigma = -1` for the epigraph.
    """
    def __init__(self, cone: RenyiCone, x: np.ndarray) -> None:
        super().__init__(cone, x)
        self.t, X, Y = cone.unpack(x)
        self.psi = psi_point(cone.params, X, Y)
        self.logdet = LogdetPair(self.psi, cone.field)

    @cached_property
    def slack(self) -> float:
        return self.cone.sign * (self.psi.value - self.t)

    @cached_property
    def slack_gradient(self) -> np.ndarray:
        grad_x, grad_y = self.psi.gradient
        return self.cone.sign * np.concatenate(([-1.0], join_matrices(grad_x, grad_y, self.cone.field)))

    @cached_property
    def value(self) -> float:
        return float(-np.log(self.slack) + self.logdet.value)

    @cached_property
    def gradient(self) -> np.ndarray:
        return -self.slack_gradient / self.slack + np.concatenate(([0.0], self.logdet.gradient))

    def _direction(self, d: np.ndarray) -> DirectionPair:
        _, H, V = self.cone.unpack(d)
        return DirectionPair(H, V)

    def hessian_apply(self, d: np.ndarray) -> np.ndarray:
        s = self.slack
        direction = self._direction(d)
        ds = self.slack_gradient @ d
        second = self.psi.hessian_apply(direction)
        second = self.cone.sign * np.concatenate(([0.0], join_matrices(*second, self.cone.field)))
        return (
            self.slack_gradient * ds / s ** 2
            - second / s
            + np.concatenate(([0.0], self.logdet.hessian_apply(*direction)))
        )

    def third_directional(self, d: np.ndarray) -> float:
        s = self.slack
        direction = self._direction(d)
        ds = self.slack_gradient @ d
        dds = self.cone.sign * self.psi.hessian_bilinear(direction, direction)
        ddds = self.cone.sign * self.psi.third_directional(direction)
        return float(
            -ddds / s + 3 * ds * dds / s ** 2 - 2 * ds ** 3 / s ** 3
            + self.logdet.third_directional(*direction)
        )


class RenyiCone(Cone):
    """
    Common implementation of the closed hypograph and epigraph cones of :math:`\\Psi_\\alpha`.

    Points are :class:`RenyiPoint` tuples, stored as vectors ``[t, vec X, vec Y]``.
    The barrier parameter is :math:`1 + 2n`.
    """
    n: int
    alpha: float
    field: Field
    sign: int = 0
    alpha_range: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"{type(self).__name__} needs n >= 1, got {self.n}.")

        low, high = self.alpha_range
        if not low <= self.alpha <= high:
            raise DomainError(
                f"{type(self).__name__} is defined for alpha in [{low}, {high}], got {self.alpha}."
            )

        vec_dim(self.n, self.field)

    @property
    def params(self) -> TraceFnParams:
        return TraceFnParams(self.alpha)

    @property
    def dim(self) -> int:
        return 1 + 2 * vec_dim(self.n, self.field)

    @property
    def nu(self) -> float:
        return float(1 + 2 * self.n)

    def unpack(self, x: np.ndarray) -> RenyiPoint:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionError(f"{self!r} expects vectors of length {self.dim}, got shape {x.shape}.")

        return RenyiPoint(float(x[0]), *split_matrices(x[1:], self.n, self.field))

    def pack(self, point: RenyiPoint) -> np.ndarray:
        t, X, Y = point
        check_matrix_shapes(self.n, X, Y)
        return np.concatenate(([float(t)], join_matrices(X, Y, self.field)))

    def slack(self, point: RenyiPoint) -> float:
        "Returns :math:`\\Psi_\\alpha(X, Y) - t` for the hypograph and :math:`t - \\Psi_\\alpha(X, Y)` for the epigraph."
        t, X, Y = point
        return self.sign * (psi_value(self.params, X, Y) - t)

    def _interior(self, x: np.ndarray, margin: float) -> bool:
        point = self.unpack(x)
        if not matrices_interior(point.X, point.Y, margin):
            return False

        try:
            return self.slack(point) > margin
        except DomainError:
            return False

    def random_interior(self, rng: np.random.Generator, boundary_bias: float = 0.0) -> np.ndarray:
        spread = 10 ** (2 + 4 * boundary_bias)
        X = random_positive_definite(rng, self.n, self.field, spread)
        Y = random_positive_definite(rng, self.n, self.field, spread)
        psi = psi_value(self.params, X, Y)
        slack = 10 ** rng.uniform(-1 - 6 * boundary_bias, 0) * max(psi, 1.0)
        return self.pack(RenyiPoint(psi - self.sign * slack, X, Y))

    def _make_oracle(self, x: np.ndarray) -> BarrierOracle:
        return RenyiOracle(self, x)


@doc_category("Cones")
@dataclass(frozen=True)
class RenyiHypo(RenyiCone):
    """
    Closed hypograph :math:`\\{(t, X, Y): \\Psi_\\alpha(X, Y) \\ge t\\}` for :math:`\\alpha \\in [1/2, 1]`,
    with the barrier :math:`-\\log(\\Psi_\\alpha(X, Y) - t) - \\log\\det X - \\log\\det Y`.

    Parameters
    ------------
    n: int
        Matrix size.
    alpha: float
        Order in :math:`[1/2, 1]`.
    field: Literal["real", "complex"]
        Scalar field of the matrices.
    """
    n: int
    alpha: float
    field: Field = "complex"
    sign = 1
    alpha_range = (0.5, 1.0)

    def interior_direction(self) -> np.ndarray:
        I = np.eye(self.n)
        return self.pack(RenyiPoint(-1.0, I, I))


@doc_category("Cones")
@dataclass(frozen=True)
class RenyiEpi(RenyiCone):
    """
    Closed epigraph :math:`\\{(t, X, Y): \\Psi_\\alpha(X, Y) \\le t\\}` for :math:`\\alpha \\in [1, 2]`,
    with the barrier :math:`-\\log(t - \\Psi_\\alpha(X, Y)) - \\log\\det X - \\log\\det Y`.

    Parameters
    ------------
    n: int
        Matrix size.
    alpha: float
        Order in :math:`[1, 2]`.
    field: Literal["real", "complex"]
        Scalar field of the matrices.
    """
    n: int
    alpha: float
    field: Field = "complex"
    sign = -1
    alpha_range = (1.0, 2.0)

    def interior_direction(self) -> np.ndarray:
        I = np.eye(self.n)
        return self.pack(RenyiPoint(self.n + 1.0, I, I))


register_alias(RenyiHypo, "renyi-hypo")
register_alias(RenyiEpi, "renyi-epi")
