"""
Univariate function descriptors used by the spectral calculus.

A :class:`ScalarFunction` evaluates itself and its first three derivatives,
elementwise on floats or :class:`numpy.ndarray` objects.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Tuple, Union
from math import isinf

import numpy as np

from .doc import doc_category
from .errors import DomainError


__all__ = (
    "ScalarFunction",
    "Power",
    "NegPower",
    "Log",
    "Affine",
    "Composite",
)


ArrayLike = Union[float, np.ndarray]
MAX_ORDER = 3


@doc_category("Scalar functions")
class ScalarFunction(ABC):
    """
    Base class of univariate function descriptors.

    Subclasses describe a function on an open interval ``domain``,
    together with its derivatives up to order 3.
    """
    domain: Tuple[float, float] = (-np.inf, np.inf)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return self.derivative(x, 0)

    @abstractmethod
    def derivative(self, x: ArrayLike, order: int = 1) -> ArrayLike:
        """
        Evaluates the ``order``-th derivative at ``x``.

        Parameters
        ------------
        x: float | numpy.ndarray
            The evaluation point(s).
        order: int
            Derivative order in ``0..3``. Order 0 is the value itself.
        """

    @abstractmethod
    def prime(self) -> ScalarFunction:
        "Returns the descriptor of the first derivative."

    @abstractmethod
    def transpose(self) -> ScalarFunction:
        r"Returns the descriptor of :math:`\hat g(x) = x g(1/x)`."

    def contains(self, x: ArrayLike) -> bool:
        "Returns True if every element of ``x`` lies inside the open domain."
        low, high = self.domain
        x = np.asarray(x)
        return bool(np.all((x > low) & (x < high)))

    def check_domain(self, x: ArrayLike):
        "Raises :class:`~renyicones.errors.DomainError` if ``x`` leaves the domain."
        if not self.contains(x):
            raise DomainError(
                f"Argument outside the domain {self.domain} of {self!r}.\n"
                f"Offending values range over [{np.min(x)}, {np.max(x)}]."
            )

    def sqrt(self) -> ScalarFunction:
        "Returns the descriptor of the square root of this (positive) function."
        f = self

        def d0(x):
            return np.sqrt(f(x))

        def d1(x):
            return f.derivative(x, 1) / (2 * d0(x))

        def d2(x):
            k = d0(x)
            return f.derivative(x, 2) / (2 * k) - f.derivative(x, 1) ** 2 / (4 * k ** 3)

        def d3(x):
            k = d0(x)
            f1, f2, f3 = f.derivative(x, 1), f.derivative(x, 2), f.derivative(x, 3)
            return f3 / (2 * k) - 3 * f1 * f2 / (4 * k ** 3) + 3 * f1 ** 3 / (8 * k ** 5)

        return Composite((d0, d1, d2, d3), domain=self.domain)

    @staticmethod
    def _check_order(order: int, max_order: int = MAX_ORDER):
        if not 0 <= order <= max_order:
            raise ValueError(f"Derivative order must be in 0..{max_order}, got {order}.")


@doc_category("Scalar functions")
@dataclass(frozen=True)
class Power(ScalarFunction):
    """
    :math:`x \\mapsto s\\, x^p`.

    Non-negative integer powers are defined on the whole real line,
    every other power on :math:`(0, \\infty)`.

    Parameters
    ------------
    p: float
        The exponent.
    scale: float
        The multiplier :math:`s`. Defaults to 1.
    """
    p: float
    scale: float = 1.0

    @property
    def domain(self) -> Tuple[float, float]:
        if float(self.p).is_integer() and self.p >= 0:
            return (-np.inf, np.inf)

        return (0.0, np.inf)

    def derivative(self, x: ArrayLike, order: int = 1) -> ArrayLike:
        self._check_order(order)
        coefficient = self.scale
        for k in range(order):
            coefficient *= self.p - k

        x = np.asarray(x, dtype=float)
        if coefficient == 0:
            return np.zeros_like(x)[()]

        exponent = self.p - order
        if float(exponent).is_integer() and exponent >= 0:
            return (coefficient * x ** int(exponent))[()]

        return (coefficient * np.power(x, exponent))[()]

    def prime(self) -> ScalarFunction:
        if self.p == 0:
            return Affine(0.0, 0.0)

        return Power(self.p - 1, self.scale * self.p)

    def transpose(self) -> ScalarFunction:
        return Power(1 - self.p, self.scale)


@doc_category("Scalar functions")
@dataclass(frozen=True)
class NegPower(Power):
    """
    :math:`x \\mapsto -x^p`.

    Parameters
    ------------
    p: float
        The exponent.
    """
    scale: float = field(default=-1.0, init=False)


@doc_category("Scalar functions")
@dataclass(frozen=True)
class Log(ScalarFunction):
    """
    :math:`x \\mapsto s \\log x` on :math:`(0, \\infty)`.
    """
    scale: float = 1.0
    domain = (0.0, np.inf)

    def derivative(self, x: ArrayLike, order: int = 1) -> ArrayLike:
        self._check_order(order)
        x = np.asarray(x, dtype=float)
        if order == 0:
            return (self.scale * np.log(x))[()]

        sign = (-1) ** (order - 1)
        factorial = (1, 1, 2)[order - 1]
        return (self.scale * sign * factorial / x ** order)[()]

    def prime(self) -> ScalarFunction:
        return Power(-1, self.scale)

    def transpose(self) -> ScalarFunction:
        s = self.scale
        return Composite(
            (
                lambda x: -s * x * np.log(x),
                lambda x: -s * (np.log(x) + 1),
                lambda x: -s / x,
                lambda x: s / x ** 2,
            ),
            domain=(0.0, np.inf),
        )


@doc_category("Scalar functions")
@dataclass(frozen=True)
class Affine(ScalarFunction):
    """
    :math:`x \\mapsto a + b x` on the whole real line.

    The intercept comes first, so the perspective of ``Affine(a, b)`` is
    :math:`P(Y, Z) = aY + bZ`.
    """
    a: float
    b: float = 0.0

    def derivative(self, x: ArrayLike, order: int = 1) -> ArrayLike:
        self._check_order(order)
        x = np.asarray(x, dtype=float)
        if order == 0:
            return (self.a + self.b * x)[()]
        if order == 1:
            return np.full_like(x, self.b)[()]

        return np.zeros_like(x)[()]

    def prime(self) -> ScalarFunction:
        return Affine(self.b, 0.0)

    def transpose(self) -> ScalarFunction:
        return Affine(self.b, self.a)


@doc_category("Scalar functions")
@dataclass(frozen=True)
class Composite(ScalarFunction):
    """
    A function given by explicit callables for its value and derivatives.

    Parameters
    ------------
    evaluators: Tuple[Callable, ...]
        Callables for the value, first, second, ... derivative.
        At least the value and three derivatives are needed for use
        in trace function derivatives.
    domain: Tuple[float, float]
        Open interval on which the function is defined.

    Example
    ----------
    .. code-block:: python

        exp = Composite((np.exp, np.exp, np.exp, np.exp))
    """
    evaluators: Tuple[Callable[[ArrayLike], ArrayLike], ...]
    domain: Tuple[float, float] = (-np.inf, np.inf)

    def __post_init__(self):
        if not self.evaluators:
            raise ValueError("Composite requires at least the value evaluator.")

    def derivative(self, x: ArrayLike, order: int = 1) -> ArrayLike:
        self._check_order(order, len(self.evaluators) - 1)
        return self.evaluators[order](np.asarray(x, dtype=float))

    def prime(self) -> ScalarFunction:
        if len(self.evaluators) < 2:
            raise ValueError("No derivative evaluator to build the derivative from.")

        return Composite(self.evaluators[1:], self.domain)

    def transpose(self) -> ScalarFunction:
        if len(self.evaluators) < 4:
            raise ValueError("Transposition requires evaluators up to the third derivative.")

        g0, g1, g2, g3 = self.evaluators[:4]
        low, high = self.domain
        domain = (
            0.0 if isinf(high) else 1 / high,
            np.inf if low <= 0 else 1 / low,
        )
        return Composite(
            (
                lambda x: x * g0(1 / x),
                lambda x: g0(1 / x) - g1(1 / x) / x,
                lambda x: g2(1 / x) / x ** 3,
                lambda x: -3 * g2(1 / x) / x ** 4 - g3(1 / x) / x ** 5,
            ),
            domain=domain,
        )
