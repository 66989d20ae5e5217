"""
Trace functions of two matrix arguments.

The central object is

.. math::

    \\Psi_{g,h}(X, Y) = \\operatorname{tr}\\big[g\\big(h(Y)^{1/2} X h(Y)^{1/2}\\big)\\big],

which for :math:`g(x) = x^\\alpha` and :math:`h(y) = y^{(1-\\alpha)/\\alpha}` is the
sandwiched quasi-relative entropy :math:`\\Psi_\\alpha`.
The module also provides the sandwiched Rényi divergence, its perspective and
noncommutative perspectives.
"""
from __future__ import annotations

from functools import cached_property
from typing import Literal, NamedTuple, Optional

import numpy as np

from .cache import cache_result
from .doc import doc_category
from .errors import DimensionError, DomainError
from .hermitian import (
    HermitianMatrix,
    SpectralDerivatives,
    eigh,
    hermitize,
    inner,
    spectral_apply,
)
from .scalar import ScalarFunction, Power, Composite


__all__ = (
    "TraceFnParams",
    "DirectionPair",
    "PsiPoint",
    "psi_point",
    "psi_value",
    "psi_gradient",
    "psi_hessian_apply",
    "psi_hessian_bilinear",
    "psi_third_directional",
    "d_alpha_value",
    "d_alpha_perspective",
    "nc_perspective",
    "composed_perspective",
    "ALPHA_RANGE",
)


ALPHA_RANGE = (0.5, 2.0)
#: Smallest eigenvalue, relative to the norm, accepted by trace functions.
DEFINITENESS_FLOOR = 1e-12


@doc_category("Trace functions")
class TraceFnParams:
    """
    Functions defining :math:`\\Psi_{g,h}`.

    ``TraceFnParams(alpha)`` builds the sandwiched Rényi case
    :math:`g(x) = x^\\alpha`, :math:`h(y) = y^{(1-\\alpha)/\\alpha}`, together with
    :math:`g'` and :math:`\\tilde g(x) = x g'(x)`.
    Other pairs are built with :meth:`general`.

    Parameters
    ------------
    alpha: float
        Order in :math:`[1/2, 2]`.

    Raises
    --------
    DomainError
        ``alpha`` is outside :math:`[1/2, 2]`.
    """
    __slots__ = ("alpha", "g", "h", "gprime", "gtilde", "hsqrt")

    def __init__(self, alpha: float) -> None:
        alpha = float(alpha)
        if not ALPHA_RANGE[0] <= alpha <= ALPHA_RANGE[1]:
            raise DomainError(
                f"alpha={alpha} is not supported.\n"
                f"Trace function parameters are restricted to [{ALPHA_RANGE[0]}, {ALPHA_RANGE[1]}]."
            )

        exponent = (1 - alpha) / alpha
        self._set(
            alpha,
            g=Power(alpha),
            h=Power(exponent),
            gprime=Power(alpha - 1, alpha),
            gtilde=Power(alpha, alpha),
            hsqrt=Power(exponent / 2),
        )

    def _set(self, alpha, **functions):
        object.__setattr__(self, "alpha", alpha)
        for name, function in functions.items():
            object.__setattr__(self, name, function)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable.")

    def __getstate__(self):
        return {name: getattr(self, name) for name in self.__slots__}

    def __setstate__(self, state):
        alpha = state.pop("alpha")
        self._set(alpha, **state)

    def __eq__(self, other) -> bool:
        return isinstance(other, TraceFnParams) and self.__getstate__() == other.__getstate__()

    def __hash__(self) -> int:
        return hash((self.alpha, self.g, self.h))

    def __repr__(self) -> str:
        if self.alpha is not None:
            return f"TraceFnParams(alpha={self.alpha})"

        return f"TraceFnParams.general(g={self.g!r}, h={self.h!r})"

    @classmethod
    def general(
        cls,
        g: ScalarFunction,
        h: ScalarFunction,
        gprime: Optional[ScalarFunction] = None,
        gtilde: Optional[ScalarFunction] = None,
    ) -> TraceFnParams:
        """
        Parameters of a general :math:`\\Psi_{g,h}`.

        ``gprime`` defaults to ``g.prime()``. ``gtilde`` defaults to :math:`x g'(x)`,
        built from ``gprime`` by the product rule.
        """
        gprime = gprime or g.prime()
        if gtilde is None:
            gtilde = _times_identity(gprime)

        params = cls.__new__(cls)
        params._set(None, g=g, h=h, gprime=gprime, gtilde=gtilde, hsqrt=h.sqrt())
        return params

    def require_divergence(self):
        if self.alpha is None or self.alpha == 1:
            raise DomainError("The divergence needs a sandwiched Rényi order alpha != 1.")


def _times_identity(f: ScalarFunction) -> ScalarFunction:
    return Composite(
        (
            lambda x: x * f(x),
            lambda x: f(x) + x * f.derivative(x, 1),
            lambda x: 2 * f.derivative(x, 1) + x * f.derivative(x, 2),
            lambda x: 3 * f.derivative(x, 2) + x * f.derivative(x, 3),
        ),
        domain=f.domain,
    )


@doc_category("Trace functions")
class DirectionPair(NamedTuple):
    "A direction :math:`(H, V)` at a point :math:`(X, Y)`."
    H: HermitianMatrix
    V: HermitianMatrix


def _require_positive_definite(M: np.ndarray, name: str):
    decomposition = eigh(M)
    scale = max(np.abs(decomposition.eigenvalues).max(), np.finfo(float).tiny)
    if decomposition.eigenvalues[0] <= DEFINITENESS_FLOOR * scale:
        raise DomainError(
            f"{name} is not positive definite.\n"
            f"Smallest eigenvalue {decomposition.eigenvalues[0]:.3e} is below "
            f"{DEFINITENESS_FLOOR} times the largest one."
        )

    return decomposition


def _is_zero(M) -> bool:
    return M is None or not np.any(M)


@doc_category("Trace functions")
class PsiPoint:
    """
    Evaluation of :math:`\\Psi_{g,h}` and its derivatives at a fixed point :math:`(X, Y)`.

    Spectral decompositions of :math:`Y`, the sandwich
    :math:`M = h(Y)^{1/2} X h(Y)^{1/2}` and of :math:`N = X^{1/2} h(Y) X^{1/2}`
    are computed on first use and reused afterwards.
    Use :func:`psi_point` to obtain a cached instance.

    Parameters
    ------------
    params: TraceFnParams
        The functions :math:`g, h`.
    X: HermitianMatrix
        Positive definite first argument.
    Y: HermitianMatrix
        Positive definite second argument.

    Raises
    --------
    DimensionError
        ``X`` and ``Y`` differ in shape.
    DomainError
        ``X`` or ``Y`` is not (numerically) positive definite.
    """
    def __init__(self, params: TraceFnParams, X: HermitianMatrix, Y: HermitianMatrix) -> None:
        X = np.array(X)
        Y = np.array(Y)
        X.setflags(write=False)
        Y.setflags(write=False)
        if X.shape != Y.shape or X.ndim != 2:
            raise DimensionError(f"Arguments of shapes {X.shape} and {Y.shape} don't match.")

        self.params = params
        self.X = X
        self.Y = Y
        self.x_decomposition = _require_positive_definite(X, "X")
        self.y_decomposition = _require_positive_definite(Y, "Y")

    # Spectral building blocks
    @cached_property
    def h_y(self) -> SpectralDerivatives:
        return SpectralDerivatives(self.params.h, self.y_decomposition)

    @cached_property
    def hsqrt_y(self) -> SpectralDerivatives:
        return SpectralDerivatives(self.params.hsqrt, self.y_decomposition)

    @cached_property
    def hsqrt_inverse(self) -> HermitianMatrix:
        lam = self.y_decomposition.eigenvalues
        return self.y_decomposition.apply(1 / self.params.hsqrt(lam))

    @cached_property
    def x_sqrt(self) -> HermitianMatrix:
        return spectral_apply(Power(0.5), self.x_decomposition)

    @cached_property
    def sandwich(self) -> HermitianMatrix:
        P = self.hsqrt_y.value
        return hermitize(P @ self.X @ P)

    @cached_property
    def gprime_m(self) -> SpectralDerivatives:
        return SpectralDerivatives(self.params.gprime, self.sandwich)

    @cached_property
    def gtilde_m(self) -> SpectralDerivatives:
        return SpectralDerivatives(self.params.gtilde, self.gprime_m.decomposition)

    @cached_property
    def gprime_n(self) -> SpectralDerivatives:
        S = self.x_sqrt
        return SpectralDerivatives(self.params.gprime, hermitize(S @ self.h_y.value @ S))

    # Values and derivatives
    @cached_property
    def value(self) -> float:
        lam = self.gprime_m.decomposition.eigenvalues
        self.params.g.check_domain(lam)
        return float(np.sum(self.params.g(lam)))

    @cached_property
    def gradient(self) -> DirectionPair:
        P = self.hsqrt_y.value
        S = self.x_sqrt
        grad_x = hermitize(P @ self.gprime_m.value @ P)
        grad_y = self.h_y.first(hermitize(S @ self.gprime_n.value @ S))
        return DirectionPair(grad_x, grad_y)

    def directional(self, d: DirectionPair) -> float:
        "First directional derivative :math:`\\mathsf{D}\\Psi[d]`."
        grad_x, grad_y = self.gradient
        return inner(grad_x, d.H) + inner(grad_y, d.V)

    def hessian_apply(self, d: DirectionPair) -> DirectionPair:
        """
        Returns the pair :math:`\\nabla^2 \\Psi[d]` with
        :math:`\\langle \\nabla^2 \\Psi[d_1], d_2 \\rangle = \\mathsf{D}^2\\Psi[d_1, d_2]`.

        The mixed block uses :math:`\\tilde g(x) = x g'(x)` and needs no
        second derivative of :math:`h`.
        """
        H, V = d
        P = self.hsqrt_y.value
        P_inv = self.hsqrt_inverse
        S = self.x_sqrt
        out_x = np.zeros_like(self.sandwich)
        out_y = np.zeros_like(self.sandwich)

        if not _is_zero(H):
            PHP = hermitize(P @ H @ P)
            out_x = out_x + P @ self.gprime_m.first(PHP) @ P
            out_y = out_y + self.h_y.first(hermitize(P_inv @ self.gtilde_m.first(PHP) @ P_inv))

        if not _is_zero(V):
            dh = self.h_y.first(V)
            out_x = out_x + P @ self.gtilde_m.first(hermitize(P_inv @ dh @ P_inv)) @ P
            inner_n = self.gprime_n.first(hermitize(S @ dh @ S))
            out_y = out_y + self.h_y.first(hermitize(S @ inner_n @ S))
            out_y = out_y + self.h_y.second(V, hermitize(S @ self.gprime_n.value @ S))

        return DirectionPair(hermitize(out_x), hermitize(out_y))

    def hessian_bilinear(self, d1: DirectionPair, d2: DirectionPair) -> float:
        out = self.hessian_apply(d1)
        return inner(out.H, d2.H) + inner(out.V, d2.V)

    def third_directional(self, d: DirectionPair) -> float:
        """
        :math:`\\mathsf{D}^3\\Psi[d, d, d]`, obtained by differentiating
        :math:`\\tau \\mapsto \\operatorname{tr} g(M(\\tau))` three times along
        :math:`M(\\tau) = P(\\tau) X(\\tau) P(\\tau)`, :math:`P(\\tau) = h(Y + \\tau V)^{1/2}`.
        """
        H, V = d
        X = self.X
        P = self.hsqrt_y.value
        if _is_zero(V):
            P1 = P2 = P3 = np.zeros_like(P)
        else:
            P1 = self.hsqrt_y.first(V)
            P2 = self.hsqrt_y.second(V, V)
            P3 = self.hsqrt_y.third(V)

        H = np.zeros_like(X) if H is None else H
        M1 = P1 @ X @ P + P @ H @ P + P @ X @ P1
        M2 = P2 @ X @ P + 2 * P1 @ X @ P1 + P @ X @ P2 + 2 * (P1 @ H @ P + P @ H @ P1)
        M3 = (
            P3 @ X @ P + 3 * P2 @ X @ P1 + 3 * P1 @ X @ P2 + P @ X @ P3
            + 3 * (P2 @ H @ P + 2 * P1 @ H @ P1 + P @ H @ P2)
        )
        M1, M2, M3 = hermitize(M1), hermitize(M2), hermitize(M3)

        g1 = self.gprime_m
        return (
            inner(g1.second(M1, M1), M1)
            + 3 * inner(g1.first(M1), M2)
            + inner(g1.value, M3)
        )


@doc_category("Trace functions")
@cache_result(max=64)
def psi_point(params: TraceFnParams, X: HermitianMatrix, Y: HermitianMatrix) -> PsiPoint:
    """
    Returns the (cached) :class:`PsiPoint` of ``(X, Y)``.

    Repeated calls with equal arguments share one instance, so value, gradient
    and Hessian evaluations at the same point decompose the matrices only once.
    """
    return PsiPoint(params, X, Y)


@doc_category("Trace functions")
def psi_value(
    params: TraceFnParams,
    X: HermitianMatrix,
    Y: HermitianMatrix,
    form: Literal["sandwich", "x-sandwich"] = "sandwich",
) -> float:
    """
    Evaluates :math:`\\Psi_{g,h}(X, Y)`.

    Parameters
    ------------
    params: TraceFnParams
        The functions :math:`g, h`.
    X: HermitianMatrix
        Positive definite matrix.
    Y: HermitianMatrix
        Positive definite matrix of the same size.
    form: Literal["sandwich", "x-sandwich"]
        ``"sandwich"`` evaluates :math:`\\operatorname{tr}[g(h(Y)^{1/2} X h(Y)^{1/2})]`,
        ``"x-sandwich"`` the equal quantity :math:`\\operatorname{tr}[g(X^{1/2} h(Y) X^{1/2})]`.

    Raises
    --------
    DomainError
        ``X`` or ``Y`` is not positive definite.
    """
    point = psi_point(params, X, Y)
    if form == "sandwich":
        return point.value
    if form == "x-sandwich":
        lam = point.gprime_n.decomposition.eigenvalues
        params.g.check_domain(lam)
        return float(np.sum(params.g(lam)))

    raise ValueError(f"Unknown form {form!r}.")


@doc_category("Trace functions")
def psi_gradient(params: TraceFnParams, X: HermitianMatrix, Y: HermitianMatrix) -> DirectionPair:
    """
    Returns :math:`(\\nabla_X \\Psi, \\nabla_Y \\Psi)` with respect to the trace inner product.

    :math:`\\nabla_X \\Psi = h(Y)^{1/2} g'(M) h(Y)^{1/2}` and
    :math:`\\nabla_Y \\Psi = \\mathsf{D}h(Y)[X^{1/2} g'(N) X^{1/2}]`.
    """
    return psi_point(params, X, Y).gradient


@doc_category("Trace functions")
def psi_hessian_apply(
    params: TraceFnParams, X: HermitianMatrix, Y: HermitianMatrix, d: DirectionPair
) -> DirectionPair:
    "Hessian-vector product :math:`\\nabla^2\\Psi(X, Y)[d]` as a matrix pair."
    _check_direction(X, d)
    return psi_point(params, X, Y).hessian_apply(d)


@doc_category("Trace functions")
def psi_hessian_bilinear(
    params: TraceFnParams, X: HermitianMatrix, Y: HermitianMatrix, d1: DirectionPair, d2: DirectionPair
) -> float:
    """
    The symmetric bilinear form :math:`\\mathsf{D}^2\\Psi(X, Y)[d_1, d_2]`.

    Raises
    --------
    DimensionError
        A direction doesn't match the point.
    """
    _check_direction(X, d1)
    _check_direction(X, d2)
    return psi_point(params, X, Y).hessian_bilinear(d1, d2)


@doc_category("Trace functions")
def psi_third_directional(
    params: TraceFnParams, X: HermitianMatrix, Y: HermitianMatrix, d: DirectionPair
) -> float:
    ":math:`\\mathsf{D}^3\\Psi(X, Y)[d, d, d]`."
    _check_direction(X, d)
    return psi_point(params, X, Y).third_directional(d)


def _check_direction(X, d: DirectionPair):
    for M in d:
        if M is not None and np.shape(M) != np.shape(X):
            raise DimensionError(f"Direction of shape {np.shape(M)} doesn't match the point {np.shape(X)}.")


@doc_category("Trace functions")
def d_alpha_value(params: TraceFnParams, X: HermitianMatrix, Y: HermitianMatrix) -> float:
    """
    Sandwiched Rényi divergence :math:`D_\\alpha(X \\| Y) = \\log \\Psi_\\alpha(X, Y) / (\\alpha - 1)`.

    Raises
    --------
    DomainError
        ``alpha`` is 1 (or the parameters are not of the sandwiched Rényi kind),
        or an argument is not positive definite.
    """
    params.require_divergence()
    return float(np.log(psi_value(params, X, Y)) / (params.alpha - 1))


@doc_category("Trace functions")
def d_alpha_perspective(params: TraceFnParams, u: float, X: HermitianMatrix, Y: HermitianMatrix) -> float:
    """
    Perspective :math:`\\mathbf{D}_\\alpha(u, X, Y) = u D_\\alpha(X/u \\| Y/u)`.

    Evaluated as :math:`u \\log(\\Psi_\\alpha(X, Y)/u) / (\\alpha - 1)`, which never divides matrices by ``u``.

    Raises
    --------
    DomainError
        ``u <= 0``, ``alpha`` outside :math:`[1/2, 1)` or a non positive definite argument.
    """
    params.require_divergence()
    if not 0.5 <= params.alpha < 1:
        raise DomainError(f"The perspective is defined for alpha in [1/2, 1), got {params.alpha}.")

    if not u > 0:
        raise DomainError(f"The perspective variable must be positive, got u={u}.")

    return float(u * np.log(psi_value(params, X, Y) / u) / (params.alpha - 1))


@doc_category("Trace functions")
def nc_perspective(g: ScalarFunction, X: HermitianMatrix, Y: HermitianMatrix) -> HermitianMatrix:
    """
    Noncommutative perspective :math:`P_g(X, Y) = X^{1/2} g(X^{-1/2} Y X^{-1/2}) X^{1/2}`.

    Satisfies :math:`P_g(X, Y) = P_{\\hat g}(Y, X)` with :math:`\\hat g(x) = x g(1/x)`.

    Raises
    --------
    DomainError
        ``X`` or ``Y`` is not positive definite, or the inner spectrum leaves the domain of ``g``.
    """
    decomposition = _require_positive_definite(np.asarray(X), "X")
    _require_positive_definite(np.asarray(Y), "Y")
    lam = decomposition.eigenvalues
    root = decomposition.apply(np.sqrt(lam))
    inverse_root = decomposition.apply(1 / np.sqrt(lam))
    inner_matrix = hermitize(inverse_root @ Y @ inverse_root)
    return hermitize(root @ spectral_apply(g, inner_matrix) @ root)


@doc_category("Trace functions")
def composed_perspective(
    g: ScalarFunction, h: ScalarFunction, X: HermitianMatrix, Y: HermitianMatrix, Z: HermitianMatrix
) -> HermitianMatrix:
    """
    Composed perspective :math:`P_{g,h}(X, Y, Z) = P_g(X, P_h(Y, Z))`.

    Raises
    --------
    DomainError
        An argument is not positive definite or a nested spectrum leaves a domain.
    """
    return nc_perspective(g, X, nc_perspective(h, Y, Z))
