"""
Functional barrier interface over the cone catalogue.

Every function accepts a point either as the cone's structured point
(e.g., :class:`~renyicones.cones.RenyiPoint`) or as its real vector,
and returns vectors in the same form it received.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .cones import Cone
from .doc import doc_category


__all__ = (
    "BarrierParameter",
    "interior_membership",
    "barrier_value",
    "barrier_gradient",
    "barrier_hessian_apply",
    "barrier_hessian_solve",
    "barrier_third_directional",
    "barrier_parameter",
)


ConePoint = Union[np.ndarray, Any]


@doc_category("Barrier")
@dataclass(frozen=True)
class BarrierParameter:
    """
    Barrier parameter :math:`\\nu` of a logarithmically homogeneous self-concordant barrier.
    """
    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"Barrier parameter must be positive, got {self.nu}.")


def _is_vector(p) -> bool:
    return isinstance(p, np.ndarray) and p.ndim == 1


def _like(cone: Cone, p: ConePoint, v: np.ndarray) -> ConePoint:
    return v if _is_vector(p) else cone.unpack(v)


@doc_category("Barrier")
def interior_membership(cone: Cone, p: ConePoint, margin: float = 0.0) -> bool:
    """
    Tests strict interior membership.

    Matrices must have all eigenvalues above ``margin`` and the slack
    (:math:`\\Psi_\\alpha - t` for hypographs, :math:`t - \\Psi_\\alpha` for epigraphs,
    :math:`t - \\mathbf{D}_\\alpha` and ``u`` for the perspective cone) must exceed ``margin``.

    Raises
    --------
    DimensionError
        ``p`` doesn't match the cone's dimension.
    """
    return cone.interior(p, margin)


@doc_category("Barrier")
def barrier_value(cone: Cone, p: ConePoint) -> float:
    """
    Evaluates the barrier at an interior point.

    Raises
    --------
    DomainError
        ``p`` is on the boundary or outside the cone.
    """
    return cone.oracle(p).value


@doc_category("Barrier")
def barrier_gradient(cone: Cone, p: ConePoint) -> ConePoint:
    "Gradient of the barrier, in the form of ``p``."
    return _like(cone, p, cone.oracle(p).gradient)


@doc_category("Barrier")
def barrier_hessian_apply(cone: Cone, p: ConePoint, d: ConePoint) -> ConePoint:
    """
    Hessian of the barrier at ``p`` applied to the direction ``d``.

    Raises
    --------
    DomainError
        ``p`` is not interior.
    DimensionError
        ``p`` or ``d`` doesn't match the cone.
    """
    oracle = cone.oracle(p)
    return _like(cone, d, oracle.hessian_apply(cone.as_vector(d)))


@doc_category("Barrier")
def barrier_hessian_solve(cone: Cone, p: ConePoint, rhs: ConePoint) -> ConePoint:
    """
    Solves :math:`\\nabla^2F(p)\\, d = \\mathrm{rhs}` for the direction ``d``.

    Raises
    --------
    FactorizationError
        The Hessian couldn't be factorized to a relative residual of 1e-8,
        which happens very close to the boundary.
    """
    oracle = cone.oracle(p)
    return _like(cone, rhs, oracle.hessian_solve(cone.as_vector(rhs)))


@doc_category("Barrier")
def barrier_third_directional(cone: Cone, p: ConePoint, d: ConePoint) -> float:
    "Third directional derivative :math:`\\mathsf{D}^3F(p)[d, d, d]`."
    return cone.oracle(p).third_directional(cone.as_vector(d))


@doc_category("Barrier")
def barrier_parameter(cone: Cone) -> BarrierParameter:
    """
    Returns the barrier parameter of ``cone``: :math:`1 + 2n` for Rényi hypographs and epigraphs,
    :math:`2 + 2n` for the perspective cone, ``k`` for ``NonNeg(k)`` and ``n`` for ``PSDCone(n)``.
    """
    return BarrierParameter(cone.nu)
