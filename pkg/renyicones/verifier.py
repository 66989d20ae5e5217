"""
Numerical certification of barrier and trace function inequalities.

Every check draws its samples from generators derived from
``(seed, stream, sample index)`` (see :func:`~renyicones.utilities.make_generator`),
so reports are reproducible and independent of evaluation order.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, ClassVar, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import logging

import numpy as np
from scipy.special import factorial

from .cones import Cone, NonNeg, PSDCone, PerspectivePoint, RenyiEpi, RenyiHypo, RenyiPerspEpi
from .doc import doc_category
from .errors import DimensionError, DomainError
from .hermitian import (
    HermitianMatrix,
    hermitize,
    kron,
    random_hermitian,
    random_positive_definite,
    random_unitary,
    spectral_apply,
)
from .scalar import NegPower, Power
from .tracefn import DirectionPair, TraceFnParams, composed_perspective, d_alpha_perspective, psi_point, psi_value
from .utilities import make_generator


__all__ = (
    "SampleSpec",
    "VerificationReport",
    "PsiConcave",
    "NegPsi",
    "CompatibilityFunction",
    "NegPerspective",
    "scalar_neg_psi_derivatives",
    "check_self_concordance",
    "check_barrier_parameter",
    "check_log_homogeneity",
    "check_compatibility",
    "check_scalar_ratio",
    "check_operator_concavity_line",
    "check_kron_identity",
    "check_derivative_consistency",
    "explore_matrix_alpha_gt2",
    "central_difference_weights",
    "richardson_derivatives",
    "hansen_tomiyama_matrix",
    "merge_reports",
    "run_suite",
    "suite_passed",
    "SUITES",
)


logger = logging.getLogger(__name__)


SELF_CONCORDANCE_TOLERANCE = 1e-7
BARRIER_PARAMETER_TOLERANCE = 1e-9
LOG_HOMOGENEITY_TOLERANCE = 1e-10
COMPATIBILITY_TOLERANCE = 1e-7
SCALAR_RATIO_TOLERANCE = 1e-9
MIDPOINT_TOLERANCE = 1e-7
HANSEN_TOMIYAMA_TOLERANCE = 1e-6
KRON_TOLERANCE = 1e-10
DERIVATIVE_TOLERANCES = (1e-6, 1e-5, 1e-4)
EXPLORATION_TOLERANCE = 1e-6

#: Curvature below which a sampled direction is redrawn.
DEGENERATE_CURVATURE = 1e-14
MAX_RESAMPLES = 20
HOMOGENEITY_SCALES = (0.5, 3.0)
#: Fractions of the largest admissible direction probed by compatibility checks.
DIRECTION_SCALES = (0.1, 0.5, 0.9, 0.999)
MAX_LIFT_DIM = 3
LIFT_SPECTRUM = 0.9
HANSEN_TOMIYAMA_STEP = 0.03
HANSEN_TOMIYAMA_RANGE = 0.3
MAX_KRON_DIM = 3
DIFFERENCE_STEP = 1e-3
EXPLORATION_STEP = 1e-2
#: Condition number of matrices sampled for trace function checks.
MATRIX_SPREAD = 10.0

SELF_CONCORDANCE_STREAM = 10
BARRIER_PARAMETER_STREAM = 11
LOG_HOMOGENEITY_STREAM = 12
COMPATIBILITY_STREAM = 13
OPERATOR_LINE_STREAM = 14
KRON_STREAM = 15
DERIVATIVE_STREAM = 16
EXPLORATION_STREAM = 17

BARRIER_SUITE_DIMS = (1, 2, 3, 4)
BARRIER_SUITE_HYPO_ALPHAS = (0.5, 0.6, 0.75, 0.9, 1.0)
BARRIER_SUITE_EPI_ALPHAS = (1.0, 1.25, 1.5, 1.75, 2.0)
BARRIER_SUITE_PERSPECTIVE_ALPHAS = (0.5, 0.75, 0.9)
BARRIER_SUITE_SAMPLES = 1000


@doc_category("Verification")
@dataclass(frozen=True)
class SampleSpec:
    """
    Sampling plan of a check.

    Parameters
    ------------
    seed: int
        64-bit unsigned seed.
    count: int
        Number of sampled instances.
    dims: Sequence[int]
        Matrix sizes, cycled through by instance index.
    alpha_grid: Sequence[float]
        Orders, cycled through by instance index (checks that receive
        their order explicitly ignore it).
    boundary_bias: float
        In ``[0, 1)``. Larger values sample points closer to the cone boundary.
    """
    seed: int = 0
    count: int = 1000
    dims: Sequence[int] = (1, 2, 3)
    alpha_grid: Sequence[float] = (0.5, 0.75, 1.25, 1.5, 2.0)
    boundary_bias: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        object.__setattr__(self, "alpha_grid", tuple(float(a) for a in self.alpha_grid))
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"Seed must be a 64-bit unsigned integer, got {self.seed}.")

        if self.count < 1:
            raise ValueError(f"Sample count must be at least 1, got {self.count}.")

        if not self.dims or min(self.dims) < 1:
            raise ValueError(f"Sample dimensions must be a non-empty list of positive sizes, got {self.dims}.")

        if not 0 <= self.boundary_bias < 1:
            raise ValueError(f"Boundary bias must be in [0, 1), got {self.boundary_bias}.")

    def dim(self, index: int) -> int:
        return self.dims[index % len(self.dims)]

    def alpha(self, index: int) -> float:
        return self.alpha_grid[index % len(self.alpha_grid)]


@doc_category("Verification")
@dataclass
class VerificationReport:
    """
    Outcome of a check.

    ``passed`` holds exactly when ``worst_violation <= tolerance``.
    Checks combining sub-checks of different tolerances report violations
    in units of their own tolerance, with ``tolerance`` set to 1.
    """
    property_name: str
    samples: int
    worst_violation: float
    worst_case_inputs: Dict[str, Any]
    passed: bool
    seed: int
    tolerance: float
    exploratory: bool = False
    details: Dict[str, Any] = field(default_factory=dict)


def _serialize(value: Any) -> Any:
    if isinstance(value, Cone):
        return repr(value)

    if isinstance(value, (tuple, list)):
        return [_serialize(v) for v in value]

    if isinstance(value, np.ndarray) or np.isscalar(value):
        array = np.asarray(value)
        if np.iscomplexobj(array):
            return {"real": array.real.tolist(), "imag": array.imag.tolist()}

        return array.tolist()

    return value


class _WorstCase:
    "Running maximum of a violation together with the inputs attaining it."
    def __init__(self) -> None:
        self.violation = -np.inf
        self.inputs: Dict[str, Any] = {}
        self.samples = 0

    def update(self, violation: float, **inputs) -> None:
        self.samples += 1
        violation = float(violation)
        if np.isnan(violation):
            violation = np.inf

        if violation > self.violation:
            self.violation = violation
            self.inputs = inputs

    def report(self, name: str, seed: int, tolerance: float, exploratory: bool = False, **details) -> VerificationReport:
        violation = self.violation if self.samples else 0.0
        report = VerificationReport(
            property_name=name,
            samples=self.samples,
            worst_violation=violation,
            worst_case_inputs={key: _serialize(value) for key, value in self.inputs.items()},
            passed=bool(violation <= tolerance),
            seed=seed,
            tolerance=tolerance,
            exploratory=exploratory,
            details=details,
        )
        logger.info(
            "%s: %d samples, worst violation %.3e (tolerance %.1e), %s",
            name, report.samples, report.worst_violation, tolerance, "pass" if report.passed else "FAIL"
        )
        return report


@doc_category("Verification")
def merge_reports(property_name: str, reports: Sequence[VerificationReport]) -> VerificationReport:
    """
    Combines reports of the same property into one.

    Samples are summed, the worst violation (and its inputs) is kept.
    All reports must share the same tolerance.
    """
    if not reports:
        raise ValueError("Nothing to merge.")

    tolerances = {r.tolerance for r in reports}
    if len(tolerances) > 1:
        raise ValueError(f"Can't merge reports with different tolerances {sorted(tolerances)}.")

    worst = max(reports, key=lambda r: r.worst_violation)
    return VerificationReport(
        property_name=property_name,
        samples=sum(r.samples for r in reports),
        worst_violation=worst.worst_violation,
        worst_case_inputs=worst.worst_case_inputs,
        passed=all(r.passed for r in reports),
        seed=reports[0].seed,
        tolerance=reports[0].tolerance,
        exploratory=any(r.exploratory for r in reports),
        details={"parts": len(reports), "worst_part": worst.property_name},
    )


def _cone_samples(cone: Cone, spec: SampleSpec, stream: int) -> Iterator[Tuple[np.random.Generator, np.ndarray]]:
    for index in range(spec.count):
        rng = make_generator(spec.seed, stream, index)
        yield rng, cone.random_interior(rng, spec.boundary_bias)


def _curved_direction(oracle, rng: np.random.Generator, dim: int) -> Optional[Tuple[np.ndarray, float]]:
    for _ in range(MAX_RESAMPLES):
        d = rng.standard_normal(dim)
        d /= np.linalg.norm(d)
        curvature = float(d @ oracle.hessian_apply(d))
        if curvature >= DEGENERATE_CURVATURE:
            return d, curvature

    return None


# Barrier checks
# ---------------
@doc_category("Verification")
def check_self_concordance(cone: Cone, spec: SampleSpec) -> VerificationReport:
    """
    Checks :math:`|\\mathsf{D}^3F[h,h,h]| \\le 2 (\\mathsf{D}^2F[h,h])^{3/2}`.

    The violation of a sample is :math:`(|\\mathsf{D}^3F| - 2(\\mathsf{D}^2F)^{3/2}) / (\\mathsf{D}^2F)^{3/2}`.
    Directions with curvature below ``1e-14`` are redrawn and not counted.
    ``details["worst_ratio"]`` holds the largest :math:`|\\mathsf{D}^3F| / (2(\\mathsf{D}^2F)^{3/2})`.
    """
    worst = _WorstCase()
    worst_ratio = 0.0
    for rng, x in _cone_samples(cone, spec, SELF_CONCORDANCE_STREAM):
        oracle = cone.oracle(x)
        sampled = _curved_direction(oracle, rng, cone.dim)
        if sampled is None:
            continue

        d, curvature = sampled
        third = oracle.third_directional(d)
        scale = curvature ** 1.5
        worst_ratio = max(worst_ratio, abs(third) / (2 * scale))
        worst.update((abs(third) - 2 * scale) / scale, point=x, direction=d)

    return worst.report(
        f"self-concordance {cone!r}", spec.seed, SELF_CONCORDANCE_TOLERANCE, worst_ratio=worst_ratio
    )


@doc_category("Verification")
def check_barrier_parameter(cone: Cone, spec: SampleSpec) -> VerificationReport:
    """
    Checks :math:`2\\mathsf{D}F[h] - \\mathsf{D}^2F[h,h] \\le \\nu`.

    Each sample probes ``h = -x``, where the bound is attained for logarithmically homogeneous
    barriers, and the best multiple of a random direction.
    The violation is :math:`(\\max_h (2\\mathsf{D}F[h] - \\mathsf{D}^2F[h,h]) - \\nu) / \\nu`.
    """
    worst = _WorstCase()
    supremum = -np.inf
    nu = cone.nu
    for rng, x in _cone_samples(cone, spec, BARRIER_PARAMETER_STREAM):
        oracle = cone.oracle(x)
        gradient = oracle.gradient
        d = rng.standard_normal(cone.dim)
        curvature = d @ oracle.hessian_apply(d)
        directions = [-x]
        if curvature > DEGENERATE_CURVATURE:
            directions.append(-(gradient @ d) / curvature * d)

        for h in directions:
            decrement = 2 * (gradient @ h) - h @ oracle.hessian_apply(h)
            supremum = max(supremum, decrement)
            worst.update((decrement - nu) / nu, point=x, direction=h)

    return worst.report(
        f"barrier-parameter {cone!r}", spec.seed, BARRIER_PARAMETER_TOLERANCE, nu=nu, supremum=float(supremum)
    )


@doc_category("Verification")
def check_log_homogeneity(
    cone: Cone, spec: SampleSpec, scales: Sequence[float] = HOMOGENEITY_SCALES
) -> VerificationReport:
    """
    Checks :math:`F(\\lambda x) = F(x) - \\nu \\log \\lambda` for each ``λ`` in ``scales``.

    The violation is the absolute error of the identity.
    """
    if min(scales) <= 0:
        raise ValueError(f"Scales must be positive, got {scales}.")

    worst = _WorstCase()
    for _, x in _cone_samples(cone, spec, LOG_HOMOGENEITY_STREAM):
        value = cone.oracle(x).value
        for scale in scales:
            error = cone.oracle(scale * x).value - value + cone.nu * np.log(scale)
            worst.update(abs(error), point=x, scale=scale)

    return worst.report(f"log-homogeneity {cone!r}", spec.seed, LOG_HOMOGENEITY_TOLERANCE)


# Compatibility
# ---------------
def _matrix_sqrt(X: HermitianMatrix) -> HermitianMatrix:
    return spectral_apply(Power(0.5), X)


def _scaled_direction(rng: np.random.Generator, X: HermitianMatrix, theta: float) -> HermitianMatrix:
    "Random ``H`` with ``X ± H / theta`` positive semidefinite."
    G = random_hermitian(rng, X.shape[0], "complex")
    root = _matrix_sqrt(X)
    return hermitize(theta * root @ G @ root / np.linalg.norm(G, 2))


def _pair_point(rng: np.random.Generator, n: int, spread: float) -> Tuple[HermitianMatrix, HermitianMatrix]:
    return (
        random_positive_definite(rng, n, "complex", spread),
        random_positive_definite(rng, n, "complex", spread),
    )


class CompatibilityFunction(ABC):
    """
    Scalar-valued function checked by :func:`check_compatibility`.

    Implementations sample points of the domain, admissible directions
    (``x ± h`` in the closed domain) and return
    :math:`(\\mathsf{D}^2f[h,h], \\mathsf{D}^3f[h,h,h])`.
    """
    alpha: float
    label: ClassVar[str]

    @abstractmethod
    def sample_point(self, rng: np.random.Generator, n: int, spread: float) -> tuple:
        pass

    @abstractmethod
    def directions(self, rng: np.random.Generator, point: tuple) -> Iterator[tuple]:
        pass

    @abstractmethod
    def line_derivatives(self, point: tuple, direction: tuple) -> Tuple[float, float]:
        pass


class _TraceFunction(CompatibilityFunction):
    sign: ClassVar[float]

    def sample_point(self, rng, n, spread):
        return _pair_point(rng, n, spread)

    def directions(self, rng, point):
        X, Y = point
        for theta in DIRECTION_SCALES:
            yield _scaled_direction(rng, X, theta), _scaled_direction(rng, Y, theta)

        yield X, -Y

    def line_derivatives(self, point, direction):
        psi = psi_point(TraceFnParams(self.alpha), *point)
        d = DirectionPair(*direction)
        return self.sign * psi.hessian_bilinear(d, d), self.sign * psi.third_directional(d)


@doc_category("Verification")
@dataclass(frozen=True)
class PsiConcave(_TraceFunction):
    ":math:`f = \\Psi_\\alpha` for :math:`\\alpha \\in [1/2, 1]`."
    alpha: float
    label: ClassVar[str] = "psi"
    sign: ClassVar[float] = 1.0

    def __post_init__(self):
        if not 0.5 <= self.alpha <= 1:
            raise DomainError(f"Psi is concave for alpha in [0.5, 1], got {self.alpha}.")


@doc_category("Verification")
@dataclass(frozen=True)
class NegPsi(_TraceFunction):
    """
    :math:`f = -\\Psi_\\alpha` for :math:`\\alpha \\in [1, 2]`.

    Orders above 2 are accepted for scalar arguments only, where
    :math:`f(x, y) = -x^\\alpha y^{1-\\alpha}` has closed form derivatives
    and is compatible with constant :math:`(2\\alpha - 1)/3`.
    """
    alpha: float
    label: ClassVar[str] = "neg-psi"
    sign: ClassVar[float] = -1.0

    def __post_init__(self):
        if self.alpha < 1:
            raise DomainError(f"-Psi is concave for alpha >= 1, got {self.alpha}.")

    def line_derivatives(self, point, direction):
        if self.alpha <= 2:
            return super().line_derivatives(point, direction)

        X, Y = point
        if X.shape != (1, 1):
            raise DomainError(
                f"alpha={self.alpha} > 2 is only supported for scalar arguments.\n"
                "Use explore_matrix_alpha_gt2 for matrices."
            )

        H, V = direction
        return scalar_neg_psi_derivatives(
            self.alpha, X[0, 0].real, Y[0, 0].real, H[0, 0].real, V[0, 0].real
        )


def scalar_neg_psi_derivatives(alpha: float, x: float, y: float, hx: float, hy: float) -> Tuple[float, float]:
    """
    Second and third derivatives of :math:`-x^\\alpha y^{1-\\alpha}` along ``(hx, hy)``.

    With :math:`a = h_x/x`, :math:`b = h_y/y` and
    :math:`c = \\alpha(\\alpha-1) x^\\alpha y^{1-\\alpha} (a-b)^2`, they are
    :math:`-c` and :math:`-c((\\alpha-2)a - (\\alpha+1)b)`.
    """
    a, b = hx / x, hy / y
    c = alpha * (alpha - 1) * x ** alpha * y ** (1 - alpha) * (a - b) ** 2
    return -c, -c * ((alpha - 2) * a - (alpha + 1) * b)


@doc_category("Verification")
@dataclass(frozen=True)
class NegPerspective(CompatibilityFunction):
    ":math:`f = -\\mathbf{D}_\\alpha(u, X, Y)` for :math:`\\alpha \\in [1/2, 1)`."
    alpha: float
    label: ClassVar[str] = "neg-perspective"

    def __post_init__(self):
        if not 0.5 <= self.alpha < 1:
            raise DomainError(f"The perspective is defined for alpha in [0.5, 1), got {self.alpha}.")

    def sample_point(self, rng, n, spread):
        return (10 ** rng.uniform(-1, 1), *_pair_point(rng, n, spread))

    def directions(self, rng, point):
        u, X, Y = point
        for theta in DIRECTION_SCALES:
            yield theta * u * rng.uniform(-1, 1), _scaled_direction(rng, X, theta), _scaled_direction(rng, Y, theta)

        yield u, X, -Y
        yield u, -X, Y

    def line_derivatives(self, point, direction):
        u, X, Y = point
        du, H, V = direction
        cone = RenyiPerspEpi(X.shape[0], self.alpha)
        t = d_alpha_perspective(cone.params, u, X, Y) + 1
        oracle = cone.oracle(cone.pack(PerspectivePoint(t, u, X, Y)))
        _, second, third = oracle.divergence_derivatives(cone.pack(PerspectivePoint(0.0, du, H, V)))
        return -second, -third


@doc_category("Verification")
def check_compatibility(fn: CompatibilityFunction, beta: float, spec: SampleSpec) -> VerificationReport:
    """
    Checks :math:`\\mathsf{D}^3f[h,h,h] \\le -3\\beta\\, \\mathsf{D}^2f[h,h]` for admissible directions.

    Directions are scaled so that ``x ± h`` stays in the closed domain
    (fractions 0.1, 0.5, 0.9 and 0.999 of the largest admissible multiple),
    and include the extremal direction ``(X, -Y)``. Both ``h`` and ``-h`` are tested.
    The violation of a sample is :math:`(|\\mathsf{D}^3f| + 3\\beta\\mathsf{D}^2f) / \\max(1, 3\\beta|\\mathsf{D}^2f|)`.

    ``details["supremum_ratio"]`` holds the largest observed :math:`|\\mathsf{D}^3f| / (-\\mathsf{D}^2f)`,
    the smallest admissible :math:`3\\beta`.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}.")

    worst = _WorstCase()
    supremum = 0.0
    spread = 10 ** (2 + 4 * spec.boundary_bias)
    for index in range(spec.count):
        rng = make_generator(spec.seed, COMPATIBILITY_STREAM, index)
        point = fn.sample_point(rng, spec.dim(index), spread)
        for direction in fn.directions(rng, point):
            second, third = fn.line_derivatives(point, direction)
            if -second > DEGENERATE_CURVATURE:
                supremum = max(supremum, abs(third) / -second)

            violation = (abs(third) + 3 * beta * second) / max(1.0, 3 * beta * abs(second))
            worst.update(violation, point=point, direction=direction)

    return worst.report(
        f"compatibility {fn.label} alpha={fn.alpha} beta={beta:g}",
        spec.seed,
        COMPATIBILITY_TOLERANCE,
        beta=beta,
        supremum_ratio=supremum,
    )


@doc_category("Verification")
def check_scalar_ratio(alpha: float, spec: SampleSpec) -> List[VerificationReport]:
    """
    Checks the scalar constant :math:`(2\\alpha - 1)/3` of :math:`-x^\\alpha y^{1-\\alpha}`, :math:`\\alpha \\ge 2`.

    Returns the compatibility report at that constant and a report comparing
    the observed supremum ratio against :math:`2\\alpha - 1` (relative error).
    """
    fn = NegPsi(alpha)
    expected = 2 * alpha - 1
    compatibility = check_compatibility(fn, expected / 3, SampleSpec(
        seed=spec.seed, count=spec.count, dims=(1,), boundary_bias=spec.boundary_bias
    ))
    observed = compatibility.details["supremum_ratio"]
    error = abs(observed - expected) / expected
    ratio = VerificationReport(
        property_name=f"scalar-ratio alpha={alpha}",
        samples=compatibility.samples,
        worst_violation=error,
        worst_case_inputs=compatibility.worst_case_inputs,
        passed=error <= SCALAR_RATIO_TOLERANCE,
        seed=spec.seed,
        tolerance=SCALAR_RATIO_TOLERANCE,
        details={"supremum_ratio": observed, "expected_ratio": expected},
    )
    logger.info("scalar-ratio alpha=%g: observed %.12g, expected %g", alpha, observed, expected)
    return [compatibility, ratio]


# Finite differences
# -------------------
@doc_category("Verification")
def central_difference_weights(order: int, half_width: int) -> np.ndarray:
    """
    Weights ``w`` of the central stencil ``j = -half_width..half_width`` with
    :math:`f^{(k)}(t) \\approx s^{-k} \\sum_j w_j f(t + js)`.
    """
    if not 0 <= order <= 2 * half_width:
        raise ValueError(f"A stencil of half width {half_width} can't estimate derivatives of order {order}.")

    offsets = np.arange(-half_width, half_width + 1, dtype=float)
    powers = np.arange(2 * half_width + 1)
    taylor = offsets[None, :] ** powers[:, None] / factorial(powers)[:, None]
    rhs = np.zeros(2 * half_width + 1)
    rhs[order] = 1
    return np.linalg.solve(taylor, rhs)


@doc_category("Verification")
def richardson_derivatives(
    f: Callable[[float], float], t: float, half_width: int, step: float
) -> np.ndarray:
    """
    Derivatives :math:`f^{(k)}(t)`, ``k = 0..2*half_width``, from central differences
    at steps ``step`` and ``step/2`` combined by one Richardson extrapolation.

    The Hansen-Tomiyama check calls this with ``step = 0.03`` and a single level, not
    a 1e-2 base step refined twice. Its highest derivative is of order 6 and at steps
    near 1e-3 the quotient is dominated by rounding of ``f``. It samples ``t`` in
    [-0.3, 0.3], so the stencil ``t +- 3*step`` stays inside the admissible segment
    ``|t| < 1``.
    """
    values: Dict[float, float] = {}

    def evaluate(x: float) -> float:
        if x not in values:
            values[x] = f(x)
        return values[x]

    offsets = np.arange(-half_width, half_width + 1)
    max_order = 2 * half_width
    weights = [central_difference_weights(k, half_width) for k in range(max_order + 1)]

    def estimate(s: float) -> np.ndarray:
        samples = np.array([evaluate(t + j * s) for j in offsets])
        return np.array([weights[k] @ samples / s ** k for k in range(max_order + 1)])

    coarse, fine = estimate(step), estimate(step / 2)
    result = np.empty(max_order + 1)
    result[0] = evaluate(t)
    for k in range(1, max_order + 1):
        error_order = max_order + 1 - k
        if error_order % 2:
            error_order += 1

        factor = 2.0 ** error_order
        result[k] = (factor * fine[k] - coarse[k]) / (factor - 1)

    return result


@doc_category("Verification")
def hansen_tomiyama_matrix(derivatives: Sequence[float], m: int) -> np.ndarray:
    """
    The matrix :math:`[f^{(i+j)}(t) / (i+j)!]_{i,j=1}^m`.

    A function is matrix convex of order ``m`` on an interval exactly when this
    matrix is positive semidefinite at every point of it.

    Parameters
    ------------
    derivatives: Sequence[float]
        :math:`f^{(k)}(t)` for ``k = 0..2m`` (at least).
    m: int
        Order.
    """
    if len(derivatives) < 2 * m + 1:
        raise ValueError(f"Order {m} needs derivatives up to {2 * m}, got {len(derivatives) - 1}.")

    index = np.arange(1, m + 1)
    orders = index[:, None] + index[None, :]
    return np.asarray(derivatives, dtype=float)[orders] / factorial(orders)


# Operator concavity along lines
# -------------------------------
def _check_admissible(X, H, name: str):
    scale = max(1.0, np.linalg.norm(X, 2))
    for sign in (1, -1):
        if np.linalg.eigvalsh(hermitize(X + sign * H))[0] < -1e-12 * scale:
            raise DomainError(f"{name} ± direction must be positive semidefinite.")


def _lift(f: Callable[[float], float], T: np.ndarray) -> np.ndarray:
    eigenvalues, U = np.linalg.eigh(T)
    return (U * np.array([f(lam) for lam in eigenvalues])) @ U.conj().T


def _random_contraction(rng: np.random.Generator, m: int) -> np.ndarray:
    U = random_unitary(rng, m, "complex")
    return hermitize((U * rng.uniform(-LIFT_SPECTRUM, LIFT_SPECTRUM, m)) @ U.conj().T)


@doc_category("Verification")
def check_operator_concavity_line(
    params: TraceFnParams,
    basepoint: Tuple[HermitianMatrix, HermitianMatrix],
    direction: DirectionPair,
    lift_dims: Sequence[int],
    spec: SampleSpec,
) -> VerificationReport:
    """
    Checks that :math:`F(t) = \\Psi(X + tH, Y + tV)` is operator concave on :math:`(-1, 1)`
    (operator convex when :math:`\\alpha > 1`).

    Two sub-checks run for every lift size ``m``:

    * midpoint: :math:`F((T_1+T_2)/2) \\succeq (F(T_1) + F(T_2))/2` for random Hermitian
      ``T`` of size ``m`` with spectra in :math:`(-0.9, 0.9)`, tolerance ``1e-7``;
    * Hansen-Tomiyama: the matrix of :func:`hansen_tomiyama_matrix` of :math:`-F`
      at a random :math:`t \\in [-0.3, 0.3]` is positive semidefinite, tolerance ``1e-6``.

    Violations are reported in units of each sub-check's tolerance.

    Raises
    --------
    DimensionError
        A lift size exceeds 3.
    DomainError
        ``X ± H`` or ``Y ± V`` is not positive semidefinite.
    """
    if not lift_dims or max(lift_dims) > MAX_LIFT_DIM or min(lift_dims) < 1:
        raise DimensionError(
            f"Lift sizes must be in 1..{MAX_LIFT_DIM}, got {tuple(lift_dims)}.\n"
            "Higher orders need finite differences of order 8 or more."
        )

    X, Y = basepoint
    H, V = direction
    _check_admissible(X, H, "X")
    _check_admissible(Y, V, "Y")
    sign = 1.0 if params.alpha is None or params.alpha <= 1 else -1.0

    def line(t: float) -> float:
        return sign * psi_value(params, hermitize(X + t * H), hermitize(Y + t * V))

    scale = max(1.0, abs(line(0.0)))
    worst = _WorstCase()
    midpoint_worst = ht_worst = -np.inf
    for index in range(spec.count):
        rng = make_generator(spec.seed, OPERATOR_LINE_STREAM, index)
        t = rng.uniform(-HANSEN_TOMIYAMA_RANGE, HANSEN_TOMIYAMA_RANGE)
        derivatives = -richardson_derivatives(line, t, max(lift_dims), HANSEN_TOMIYAMA_STEP)
        for m in lift_dims:
            T1, T2 = _random_contraction(rng, m), _random_contraction(rng, m)
            gap = _lift(line, (T1 + T2) / 2) - (_lift(line, T1) + _lift(line, T2)) / 2
            midpoint = -np.linalg.eigvalsh(hermitize(gap))[0] / scale
            midpoint_worst = max(midpoint_worst, midpoint)
            worst.update(midpoint / MIDPOINT_TOLERANCE, check="midpoint", m=m, T1=T1, T2=T2)

            matrix = hansen_tomiyama_matrix(derivatives, m)
            ht = -np.linalg.eigvalsh(matrix)[0] / max(1.0, np.linalg.norm(matrix, 2))
            ht_worst = max(ht_worst, ht)
            worst.update(ht / HANSEN_TOMIYAMA_TOLERANCE, check="hansen-tomiyama", m=m, t=t)

    midpoint_passed = midpoint_worst <= MIDPOINT_TOLERANCE
    ht_passed = ht_worst <= HANSEN_TOMIYAMA_TOLERANCE
    return worst.report(
        f"operator-line alpha={params.alpha}",
        spec.seed,
        1.0,
        midpoint_violation=float(midpoint_worst),
        hansen_tomiyama_violation=float(ht_worst),
        agree=bool(midpoint_passed == ht_passed),
    )


# Kronecker identity
# -------------------
@doc_category("Verification")
def check_kron_identity(alpha: float, X: HermitianMatrix, Y: HermitianMatrix, seed: int = 0) -> VerificationReport:
    """
    Checks :math:`\\Phi(P_{g,h}(X \\otimes I, Y \\otimes I, I \\otimes \\bar Y)) = -\\Psi_\\alpha(X, Y)`
    with :math:`g(x) = -x^{1-\\alpha}`, :math:`h(x) = x^{1/\\alpha}` and
    :math:`\\Phi(M) = \\langle \\Omega, M \\Omega \\rangle`, :math:`\\Omega = \\sum_i e_i \\otimes e_i`.

    The violation is :math:`|\\Phi(\\cdot) + \\Psi_\\alpha(X, Y)| / \\max(1, \\Psi_\\alpha(X, Y))`.

    Raises
    --------
    DomainError
        ``alpha`` is outside :math:`[1, 2]` or a matrix is not positive definite.
    DimensionError
        The matrices differ in size or are larger than 3.
    """
    if not 1 <= alpha <= 2:
        raise DomainError(f"The identity is checked for alpha in [1, 2], got {alpha}.")

    X, Y = np.asarray(X), np.asarray(Y)
    if X.shape != Y.shape or X.ndim != 2:
        raise DimensionError(f"X {X.shape} and Y {Y.shape} must be square matrices of equal size.")

    n = X.shape[0]
    if n > MAX_KRON_DIM:
        raise DimensionError(f"The identity is checked for n <= {MAX_KRON_DIM}, got {n}.")

    I = np.eye(n)
    lifted = composed_perspective(
        NegPower(1 - alpha), Power(1 / alpha), kron(X, I), kron(Y, I), kron(I, Y.conj())
    )
    omega = I.reshape(-1)
    contracted = float(np.real(omega @ lifted @ omega))
    psi = psi_value(TraceFnParams(alpha), X, Y)

    worst = _WorstCase()
    worst.update(abs(contracted + psi) / max(1.0, abs(psi)), X=X, Y=Y)
    return worst.report(
        f"kron-identity alpha={alpha} n={n}", seed, KRON_TOLERANCE, contracted=contracted, psi=psi
    )


# Derivative consistency
# -----------------------
def _difference_errors(line: Callable[[float], float], analytic: Sequence[float]) -> np.ndarray:
    estimates = richardson_derivatives(line, 0.0, 2, DIFFERENCE_STEP)
    scale = max(1.0, abs(estimates[0]))
    return np.array([
        abs(a - e) / max(scale, abs(a)) for a, e in zip(analytic, estimates[1:4])
    ])


def _trace_fn_sample(rng: np.random.Generator, n: int, alpha: float):
    params = TraceFnParams(alpha)
    X, Y = _pair_point(rng, n, MATRIX_SPREAD)
    d = DirectionPair(_scaled_direction(rng, X, 0.5), _scaled_direction(rng, Y, 0.5))
    point = psi_point(params, X, Y)
    analytic = (point.directional(d), point.hessian_bilinear(d, d), point.third_directional(d))

    def line(t: float) -> float:
        return psi_value(params, hermitize(X + t * d.H), hermitize(Y + t * d.V))

    return line, analytic, {"alpha": alpha, "X": X, "Y": Y, "direction": tuple(d)}


def _barrier_sample(rng: np.random.Generator, cone: Cone, bias: float):
    x = cone.random_interior(rng, bias)
    oracle = cone.oracle(x)
    d = rng.standard_normal(cone.dim)
    d /= oracle.local_norm(d)
    analytic = (oracle.gradient @ d, d @ oracle.hessian_apply(d), oracle.third_directional(d))

    def line(t: float) -> float:
        return cone.oracle(x + t * d).value

    return line, analytic, {"point": x, "direction": d}


@doc_category("Verification")
def check_derivative_consistency(target: Union[str, Cone], spec: SampleSpec) -> VerificationReport:
    """
    Compares analytic derivatives against Richardson-extrapolated central differences.

    Parameters
    ------------
    target: str | Cone
        ``"trace-fn"`` checks :math:`\\Psi_\\alpha` for orders in ``spec.alpha_grid``
        and sizes in ``spec.dims``, along directions of half the admissible size.
        A cone checks its barrier along directions of unit local norm.
    spec: SampleSpec
        Sampling plan.

    Errors of the first, second and third derivatives are relative to the larger of
    the derivative and the function value, with tolerances ``1e-6``, ``1e-5`` and ``1e-4``.
    The violation is reported in units of these tolerances.
    """
    if not isinstance(target, Cone) and target != "trace-fn":
        raise ValueError(f"Target must be 'trace-fn' or a cone, got {target!r}.")

    worst = _WorstCase()
    largest = np.zeros(3)
    for index in range(spec.count):
        rng = make_generator(spec.seed, DERIVATIVE_STREAM, index)
        if isinstance(target, Cone):
            line, analytic, inputs = _barrier_sample(rng, target, spec.boundary_bias)
        else:
            line, analytic, inputs = _trace_fn_sample(rng, spec.dim(index), spec.alpha(index))

        errors = _difference_errors(line, analytic)
        largest = np.maximum(largest, errors)
        worst.update(np.max(errors / DERIVATIVE_TOLERANCES), **inputs)

    return worst.report(
        f"derivatives {target!r}" if isinstance(target, Cone) else "derivatives trace-fn",
        spec.seed,
        1.0,
        gradient_error=float(largest[0]),
        hessian_error=float(largest[1]),
        third_error=float(largest[2]),
    )


# Exploration
# ------------
@doc_category("Verification")
def explore_matrix_alpha_gt2(alpha: float, spec: SampleSpec) -> VerificationReport:
    """
    Explores the compatibility constant of :math:`-\\Psi_\\alpha` on matrices for :math:`\\alpha > 2`.

    :math:`\\Psi_\\alpha` is evaluated through the spectral calculus without the order restriction,
    and its second and third derivatives along sampled admissible lines are estimated by finite differences.
    The violation is the largest observed :math:`\\mathsf{D}^3f / (-3\\mathsf{D}^2f)` minus :math:`(2\\alpha - 1)/3`.
    The report is exploratory: it doesn't take part in aggregate pass/fail decisions.
    """
    if not alpha > 2:
        raise DomainError(f"Exploration is meant for alpha > 2, got {alpha}.")

    params = TraceFnParams.general(Power(alpha), Power((1 - alpha) / alpha))
    beta = (2 * alpha - 1) / 3
    worst = _WorstCase()
    for index in range(spec.count):
        rng = make_generator(spec.seed, EXPLORATION_STREAM, index)
        X, Y = _pair_point(rng, spec.dim(index), MATRIX_SPREAD)
        directions = [
            (_scaled_direction(rng, X, theta), _scaled_direction(rng, Y, theta)) for theta in DIRECTION_SCALES
        ]
        directions.append((X, -Y))
        for H, V in directions:
            def line(t: float) -> float:
                return -psi_value(params, hermitize(X + t * H), hermitize(Y + t * V))

            _, _, second, third = richardson_derivatives(line, 0.0, 2, EXPLORATION_STEP)[:4]
            if -second <= DEGENERATE_CURVATURE * max(1.0, abs(line(0.0))):
                continue

            ratio = abs(third) / (-3 * second)
            worst.update(ratio - beta, X=X, Y=Y, direction=(H, V))

    return worst.report(
        f"matrix-alpha-gt2 alpha={alpha}",
        spec.seed,
        EXPLORATION_TOLERANCE,
        exploratory=True,
        conjectured_beta=beta,
        largest_ratio=beta + worst.violation if worst.samples else None,
    )


# Suites
# -------
SUITES = (
    "all",
    "self-concordance",
    "barrier-parameter",
    "log-homogeneity",
    "compatibility",
    "operator-lines",
    "kron-identity",
    "scalar-alpha-gt2",
    "derivatives",
    "matrix-alpha-gt2",
)


def _default_cones() -> List[Cone]:
    cones: List[Cone] = [NonNeg(1), NonNeg(3), PSDCone(3)]
    for n in BARRIER_SUITE_DIMS:
        cones += [RenyiHypo(n, alpha) for alpha in BARRIER_SUITE_HYPO_ALPHAS]
        cones += [RenyiEpi(n, alpha) for alpha in BARRIER_SUITE_EPI_ALPHAS]
        cones += [RenyiPerspEpi(n, alpha) for alpha in BARRIER_SUITE_PERSPECTIVE_ALPHAS]

    return cones


def _operator_line_suite(seed: int) -> List[VerificationReport]:
    reports = []
    for alpha in (0.6, 0.75, 0.9, 1.25, 1.5, 1.9):
        params = TraceFnParams(alpha)
        for index in range(100):
            rng = make_generator(seed, OPERATOR_LINE_STREAM, 1000 + index)
            X, Y = _pair_point(rng, 2, MATRIX_SPREAD)
            direction = DirectionPair(_scaled_direction(rng, X, 0.999), _scaled_direction(rng, Y, 0.999))
            reports.append(check_operator_concavity_line(
                params, (X, Y), direction, (2, 3), SampleSpec(seed=seed, count=2, dims=(2,))
            ))

    return reports


def _kron_suite(seed: int) -> List[VerificationReport]:
    reports = []
    for alpha in (1.25, 1.5, 2.0):
        for n in (1, 2, 3):
            parts = []
            for index in range(20):
                rng = make_generator(seed, KRON_STREAM, 100 * n + index)
                parts.append(check_kron_identity(alpha, *_pair_point(rng, n, MATRIX_SPREAD), seed=seed))

            reports.append(merge_reports(f"kron-identity alpha={alpha} n={n}", parts))

    return reports


def _suite(name: str, seed: int) -> List[VerificationReport]:
    if name == "self-concordance":
        spec = SampleSpec(seed=seed, count=BARRIER_SUITE_SAMPLES)
        return [check_self_concordance(cone, spec) for cone in _default_cones()]

    if name == "barrier-parameter":
        spec = SampleSpec(seed=seed, count=BARRIER_SUITE_SAMPLES)
        return [check_barrier_parameter(cone, spec) for cone in _default_cones()]

    if name == "log-homogeneity":
        spec = SampleSpec(seed=seed, count=BARRIER_SUITE_SAMPLES)
        return [check_log_homogeneity(cone, spec) for cone in _default_cones()]

    if name == "compatibility":
        spec = SampleSpec(seed=seed, count=100, dims=(1, 2, 3))
        functions = (
            [PsiConcave(alpha) for alpha in (0.5, 0.75, 1.0)]
            + [NegPsi(alpha) for alpha in (1.0, 1.5, 2.0)]
            + [NegPerspective(alpha) for alpha in (0.5, 0.75, 0.9)]
        )
        return [check_compatibility(fn, 1.0, spec) for fn in functions]

    if name == "operator-lines":
        return _operator_line_suite(seed)

    if name == "kron-identity":
        return _kron_suite(seed)

    if name == "scalar-alpha-gt2":
        spec = SampleSpec(seed=seed, count=200, dims=(1,))
        return [report for alpha in (2.0, 2.5, 3.0, 5.0) for report in check_scalar_ratio(alpha, spec)]

    if name == "derivatives":
        spec = SampleSpec(seed=seed, count=50, dims=(1, 2, 3), alpha_grid=(0.5, 0.6, 0.75, 1.25, 1.5, 2.0))
        return [check_derivative_consistency("trace-fn", spec)] + [
            check_derivative_consistency(cone, spec) for cone in _default_cones()
        ]

    if name == "matrix-alpha-gt2":
        spec = SampleSpec(seed=seed, count=50, dims=(2, 3))
        return [explore_matrix_alpha_gt2(alpha, spec) for alpha in (2.5, 3.0)]

    raise ValueError(f"Unknown suite {name!r}. Available suites: {', '.join(SUITES)}.")


@doc_category("Verification")
def run_suite(name: str, seed: int = 0) -> List[VerificationReport]:
    """
    Runs a named suite with its default sampling plans.

    ``"all"`` runs every suite except the exploratory ``"matrix-alpha-gt2"``.

    Raises
    --------
    ValueError
        Unknown suite name.
    """
    if name == "all":
        return [
            report
            for suite in SUITES if suite not in ("all", "matrix-alpha-gt2")
            for report in _suite(suite, seed)
        ]

    return _suite(name, seed)


@doc_category("Verification")
def suite_passed(reports: Sequence[VerificationReport]) -> bool:
    "Aggregate outcome: every non-exploratory report passed."
    return all(report.passed for report in reports if not report.exploratory)
