"""
Modeling layer of the packaged experiments.

Divergence minimization problems are rewritten over Rényi cones:
for :math:`\\alpha < 1` minimizing :math:`D_\\alpha` means maximizing :math:`\\Psi_\\alpha`
(hypograph cone), for :math:`\\alpha > 1` it means minimizing :math:`\\Psi_\\alpha` (epigraph cone).
The solver only minimizes, so maximizations are negated here.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Literal, Optional, Tuple

import logging

import numpy as np
from scipy.special import xlogy

from .cones import NonNeg, PSDCone, RenyiEpi, RenyiHypo
from .doc import doc_category
from .errors import DomainError, InfeasibleStartError
from .hermitian import (
    HermitianMatrix,
    hermitian_basis,
    hermitize,
    kron,
    partial_trace,
    random_positive_definite,
    spectral_apply,
    vec_dim,
    vectorize,
    unvectorize,
)
from .scalar import Power
from .solver import ConicProblem, SolveResult, SolveStatus, SolverConfig, solve
from .tracefn import TraceFnParams, d_alpha_value, psi_value
from .utilities import make_generator


__all__ = (
    "MUTUAL_INFO_STREAM",
    "FIDELITY_STREAM",
    "random_state",
    "experiment_config",
    "MutualInfoResult",
    "mutual_info_problem",
    "mutual_info",
    "fixed_point_residual",
    "RateDistortionResult",
    "distortion_operator",
    "rate_distortion_problem",
    "rate_distortion",
    "rate_distortion_closed_form",
    "FidelityTrial",
    "FidelityResult",
    "fidelity_problem",
    "fidelity_sdp",
    "fidelity_check",
)


logger = logging.getLogger(__name__)

MUTUAL_INFO_STREAM = 1
FIDELITY_STREAM = 2
MUTUAL_INFO_DIMS = (2, 8)
RATE_DISTORTION_DIMS = (2, 4)
MAX_FIDELITY_DIM = 8
#: Relative slack of the starting points.
START_SLACK = 0.5


def _check_alpha(alpha: float):
    if not (0.5 <= alpha < 1 or 1 < alpha <= 2):
        raise DomainError(f"alpha must be in [0.5, 1) or (1, 2], got {alpha}.")


def _renyi_cone(n: int, alpha: float, field: str):
    return RenyiHypo(n, alpha, field) if alpha < 1 else RenyiEpi(n, alpha, field)


@doc_category("Experiments")
def random_state(rng: np.random.Generator, n: int) -> HermitianMatrix:
    """
    Random unit trace positive definite matrix :math:`BB^*/\\operatorname{tr}[BB^*]`,
    where the real and imaginary parts of the :math:`n \\times n` matrix :math:`B`
    are uniform on :math:`[0, 1)`.
    """
    B = rng.random((n, 2 * n)).view(complex)
    A = B @ B.conj().T
    return hermitize(A / np.trace(A).real)


@doc_category("Experiments")
def experiment_config(config: SolverConfig, alpha: float, scale: float) -> SolverConfig:
    """
    Tightens the gap tolerance to :math:`\\min(\\mathrm{tol}, 10^{-6}|\\alpha - 1|\\,\\mathrm{scale})`.

    Divergences divide :math:`\\log\\Psi_\\alpha` by :math:`\\alpha - 1`, so the
    trace function has to be solved more accurately as :math:`\\alpha \\to 1`.
    """
    tolerance = min(config.gap_tolerance, 1e-6 * abs(alpha - 1) * max(scale, np.finfo(float).tiny))
    return replace(config, gap_tolerance=tolerance)


def _start_epigraph_variable(cone, psi: float) -> float:
    return psi * (1 - START_SLACK * cone.sign)


# Mutual information
@doc_category("Experiments")
@dataclass
class MutualInfoResult:
    """
    Result of :func:`mutual_info`.

    ``value`` is :math:`D_\\alpha(A \\| \\operatorname{tr}_2(A) \\otimes X)` recomputed from the
    returned ``X``, ``objective_value`` the same quantity derived from the solver's objective.
    """
    A: HermitianMatrix
    X: HermitianMatrix
    value: float
    objective_value: float
    residual: float
    result: SolveResult
    config: SolverConfig


@doc_category("Experiments")
def mutual_info_problem(A: HermitianMatrix, alpha: float) -> Tuple[ConicProblem, np.ndarray]:
    """
    Builds :math:`\\min_X D_\\alpha(A \\| \\operatorname{tr}_2(A) \\otimes X)` s.t. :math:`\\operatorname{tr} X = 1`.

    The decision vector is ``[t, vec X]`` and the cone point
    ``(t, A, tr_2(A) ⊗ X)`` is an affine function of it.

    Returns
    ---------
    Tuple[ConicProblem, numpy.ndarray]
        The problem and a strictly feasible start at :math:`X = I/n`.
    """
    _check_alpha(alpha)
    N = A.shape[0]
    n = int(round(np.sqrt(N)))
    if n * n != N:
        raise DomainError(f"A must be of size n^2 x n^2, got {A.shape}.")

    cone = _renyi_cone(N, alpha, "complex")
    marginal = partial_trace(A, 2, (n, n))
    m_big, m_small = vec_dim(N), vec_dim(n)

    G = np.zeros((cone.dim, 1 + m_small))
    G[0, 0] = 1.0
    for k, E in enumerate(hermitian_basis(n)):
        G[1 + m_big:, 1 + k] = vectorize(kron(marginal, E))

    h = np.zeros(cone.dim)
    h[1:1 + m_big] = vectorize(A)

    A_eq = np.zeros((1, 1 + m_small))
    A_eq[0, 1:1 + n] = 1.0

    c = np.zeros(1 + m_small)
    c[0] = -1.0 if alpha < 1 else 1.0

    X0 = np.eye(n) / n
    psi = psi_value(cone.params, A, kron(marginal, X0))
    start = np.concatenate(([_start_epigraph_variable(cone, psi)], vectorize(X0)))
    return ConicProblem(c, [cone], A_eq, [1.0], G, h), start


@doc_category("Experiments")
def fixed_point_residual(A: HermitianMatrix, alpha: float, X: HermitianMatrix) -> float:
    """
    Frobenius norm of :math:`X - \\operatorname{tr}_1 Z / \\operatorname{tr} Z`, where
    :math:`Z = (S A S)^\\alpha` and :math:`S = (\\operatorname{tr}_2(A) \\otimes X)^{(1-\\alpha)/2\\alpha}`.

    The optimizer of the mutual information problem is the unique fixed point of this map.

    Raises
    --------
    DomainError
        :math:`\\operatorname{tr}_2(A) \\otimes X` is singular.
    """
    n = X.shape[0]
    Y = kron(partial_trace(A, 2, (n, n)), X)
    if np.linalg.eigvalsh(Y)[0] <= 0:
        raise DomainError("tr_2(A) ⊗ X is singular.")

    S = spectral_apply(Power((1 - alpha) / (2 * alpha)), Y)
    Z = _psd_power(hermitize(S @ A @ S), alpha)

    update = partial_trace(Z, 1, (n, n)) / np.trace(Z).real
    return float(np.linalg.norm(X - update))


def _psd_power(M: HermitianMatrix, p: float) -> HermitianMatrix:
    eigenvalues, vectors = np.linalg.eigh(M)
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    return hermitize((vectors * eigenvalues ** p) @ vectors.conj().T)


@doc_category("Experiments")
def mutual_info(
    n: int,
    alpha: float,
    seed: int = 0,
    state: Literal["random", "maximally-mixed", "product"] = "random",
    config: Optional[SolverConfig] = None,
) -> MutualInfoResult:
    """
    Sandwiched Rényi mutual information :math:`\\min_X D_\\alpha(A \\| \\operatorname{tr}_2(A) \\otimes X)`.

    Parameters
    ------------
    n: int
        Size of each subsystem, in ``[2, 8]``.
    alpha: float
        Order in :math:`[1/2, 1) \\cup (1, 2]`.
    seed: int
        Seed of the random state.
    state: Literal["random", "maximally-mixed", "product"]
        ``"random"`` draws :math:`A` with :func:`random_state`,
        ``"maximally-mixed"`` uses :math:`A = I/n^2` and
        ``"product"`` uses :math:`A = \\rho \\otimes \\sigma` for random states :math:`\\rho, \\sigma`.
        Both overrides have optimal value 0.
    config: Optional[SolverConfig]
        Solver settings.
    """
    low, high = MUTUAL_INFO_DIMS
    if not low <= n <= high:
        raise ValueError(f"n must be in [{low}, {high}], got {n}.")

    rng = make_generator(seed, MUTUAL_INFO_STREAM)
    if state == "random":
        A = random_state(rng, n * n)
    elif state == "maximally-mixed":
        A = np.eye(n * n, dtype=complex) / n ** 2
    elif state == "product":
        A = kron(random_state(rng, n), random_state(rng, n))
    else:
        raise ValueError(f"Unknown state {state!r}.")

    problem, start = mutual_info_problem(A, alpha)
    config = experiment_config(config or SolverConfig(), alpha, abs(start[0]))
    logger.info("Mutual information: n = %d, alpha = %g, state = %s.", n, alpha, state)
    result = solve(problem, config, start)

    m_small = vec_dim(n)
    X = unvectorize(result.x[1:1 + m_small], n)
    params = TraceFnParams(alpha)
    marginal = partial_trace(A, 2, (n, n))
    value = d_alpha_value(params, A, kron(marginal, X))
    objective_value = float(np.log(abs(result.objective_value)) / (alpha - 1))
    return MutualInfoResult(A, X, value, objective_value, fixed_point_residual(A, alpha, X), result, config)


# Rate distortion
@doc_category("Experiments")
@dataclass
class RateDistortionResult:
    "Result of :func:`rate_distortion`."
    n: int
    delta: float
    alpha: float
    X: Optional[HermitianMatrix]
    value: float
    closed_form: float
    result: SolveResult
    problem: ConicProblem = field(repr=False)
    start: np.ndarray = field(repr=False)
    config: SolverConfig = field(repr=False)


@doc_category("Experiments")
def distortion_operator(n: int) -> np.ndarray:
    """
    :math:`\\Delta = I - \\frac{1}{n}\\sum_{ij} e_i e_j^T \\otimes e_i e_j^T`,
    the identity minus the projector onto the maximally entangled state.
    """
    omega = np.eye(n).ravel() / np.sqrt(n)
    return np.eye(n * n) - np.outer(omega, omega)


@doc_category("Experiments")
def rate_distortion_closed_form(n: int, delta: float) -> float:
    """
    Limit :math:`\\alpha \\to 1` of the rate-distortion value,
    :math:`\\log n + (1-\\delta)\\log(1-\\delta) + \\delta\\log(\\delta/(n^2-1))` for
    :math:`\\delta \\le 1 - 1/n^2`.

    For larger :math:`\\delta` the value stays at :math:`-\\log n`, the expression's value at
    :math:`\\delta = 1 - 1/n^2`, rather than dropping to zero. The maximally mixed state
    :math:`X = I/n^2` has distortion :math:`1 - 1/n^2` and is feasible there, and
    :math:`D(I/n^2 \\| I \\otimes I/n^2) = -\\log n` is the smallest value
    :math:`D(X \\| I \\otimes \\operatorname{tr}_1 X)` takes over states.
    """
    if not 0 <= delta <= 1:
        raise ValueError(f"delta must be in [0, 1], got {delta}.")

    delta = min(delta, 1 - 1 / n ** 2)
    return float(np.log(n) + xlogy(1 - delta, 1 - delta) + xlogy(delta, delta / (n ** 2 - 1)))


@doc_category("Experiments")
def rate_distortion_problem(n: int, delta: float, alpha: float) -> Tuple[ConicProblem, np.ndarray]:
    """
    Builds :math:`\\min_X D_\\alpha(X \\| I \\otimes \\operatorname{tr}_1 X)` s.t.
    :math:`\\operatorname{tr}_2 X = I/n`, :math:`\\langle X, \\Delta \\rangle \\le \\delta`,
    over real symmetric :math:`X`.

    The decision vector is ``[t, vec X, s]`` where ``s`` is the slack of the distortion constraint.

    Raises
    --------
    InfeasibleStartError
        ``delta`` is 0, where no strictly feasible point exists.
    """
    _check_alpha(alpha)
    if not 0 <= delta <= 1:
        raise ValueError(f"delta must be in [0, 1], got {delta}.")

    if delta == 0:
        raise InfeasibleStartError("With delta = 0 the distortion constraint has no strictly feasible point.")

    N = n * n
    m = vec_dim(N, "real")
    cone = _renyi_cone(N, alpha, "real")
    basis = hermitian_basis(N, "real")
    I = np.eye(n)

    G = np.zeros((cone.dim + 1, m + 2))
    G[0, 0] = 1.0
    G[1:1 + m, 1:1 + m] = np.eye(m)
    for k, E in enumerate(basis):
        G[1 + m:1 + 2 * m, 1 + k] = vectorize(kron(I, partial_trace(E, 1, (n, n))), "real")
    G[-1, -1] = 1.0

    Delta = distortion_operator(n)
    rows = vec_dim(n, "real")
    A_eq = np.zeros((rows + 1, m + 2))
    for k, E in enumerate(basis):
        A_eq[:rows, 1 + k] = vectorize(partial_trace(E, 2, (n, n)), "real")
    A_eq[rows, 1:1 + m] = vectorize(Delta, "real")
    A_eq[rows, -1] = 1.0
    b = np.concatenate((vectorize(I / n, "real"), [delta]))

    c = np.zeros(m + 2)
    c[0] = -1.0 if alpha < 1 else 1.0

    # Mix of the maximally entangled and the maximally mixed state using half of the distortion budget
    weight = float(np.clip(1 - (delta / 2) / (1 - 1 / N), 0.0, 1.0))
    X0 = weight * (np.eye(N) - Delta) + (1 - weight) * np.eye(N) / N
    psi = psi_value(cone.params, X0, kron(I, partial_trace(X0, 1, (n, n))))
    slack = delta - float(np.sum(X0 * Delta))
    start = np.concatenate(([_start_epigraph_variable(cone, psi)], vectorize(X0, "real"), [slack]))
    return ConicProblem(c, [cone, NonNeg(1)], A_eq, b, G, np.zeros(cone.dim + 1)), start


@doc_category("Experiments")
def rate_distortion(
    n: int,
    delta: float,
    alpha: float,
    config: Optional[SolverConfig] = None,
) -> RateDistortionResult:
    """
    Rate-distortion value of the maximally entangled state with distortion budget ``delta``.

    Parameters
    ------------
    n: int
        Local dimension, in ``[2, 4]``.
    delta: float
        Distortion in :math:`[0, 1]`.
    alpha: float
        Order in :math:`[1/2, 1) \\cup (1, 2]`.
    config: Optional[SolverConfig]
        Solver settings.

    Raises
    --------
    InfeasibleStartError
        ``delta`` is 0.
    """
    low, high = RATE_DISTORTION_DIMS
    if not low <= n <= high:
        raise ValueError(f"n must be in [{low}, {high}], got {n}.")

    problem, start = rate_distortion_problem(n, delta, alpha)
    config = experiment_config(config or SolverConfig(), alpha, abs(start[0]))
    logger.info("Rate distortion: n = %d, delta = %g, alpha = %g.", n, delta, alpha)
    result = solve(problem, config, start)
    X, value = rate_distortion_value(n, alpha, result.x)
    return RateDistortionResult(
        n, delta, alpha, X, value, rate_distortion_closed_form(n, delta), result, problem, start, config
    )


def rate_distortion_value(n: int, alpha: float, z: np.ndarray) -> Tuple[HermitianMatrix, float]:
    "Recovers ``X`` from a decision vector of :func:`rate_distortion_problem` and evaluates the divergence."
    N = n * n
    X = unvectorize(z[1:1 + vec_dim(N, "real")], N, "real")
    Y = kron(np.eye(n), partial_trace(X, 1, (n, n)))
    return X, d_alpha_value(TraceFnParams(alpha), X, Y)


# Fidelity
@doc_category("Experiments")
@dataclass(frozen=True)
class FidelityTrial:
    "One random instance of :func:`fidelity_check`."
    sdp: float
    direct: float
    error: float
    status: SolveStatus


@doc_category("Experiments")
@dataclass
class FidelityResult:
    "Result of :func:`fidelity_check`."
    n: int
    trials: List[FidelityTrial]

    @property
    def max_error(self) -> float:
        return max(trial.error for trial in self.trials)

    @property
    def status(self) -> SolveStatus:
        "The first non optimal status, or optimal."
        for trial in self.trials:
            if trial.status is not SolveStatus.OPTIMAL:
                return trial.status

        return SolveStatus.OPTIMAL


@doc_category("Experiments")
def fidelity_problem(X: HermitianMatrix, Y: HermitianMatrix) -> Tuple[ConicProblem, np.ndarray]:
    """
    Builds :math:`\\max \\operatorname{Re}\\operatorname{tr} Z` s.t. :math:`\\begin{pmatrix} X & Z \\\\ Z^* & Y \\end{pmatrix} \\succeq 0`,
    negated into a minimization.

    The decision vector holds the real parts of :math:`Z`, followed by its imaginary parts, row by row.
    The start :math:`Z = 0` is strictly feasible.
    """
    n = X.shape[0]
    cone = PSDCone(2 * n, "complex")
    G = np.zeros((cone.dim, 2 * n * n))
    for k in range(n * n):
        i, j = divmod(k, n)
        for offset, unit in ((0, 1.0), (n * n, 1j)):
            E = np.zeros((2 * n, 2 * n), dtype=complex)
            E[i, n + j] = unit
            E[n + j, i] = np.conj(unit)
            G[:, offset + k] = vectorize(E)

    h = vectorize(np.block([[X, np.zeros((n, n))], [np.zeros((n, n)), Y]]))
    c = np.zeros(2 * n * n)
    c[:n * n] = -np.eye(n).ravel()
    return ConicProblem(c, [cone], G=G, h=h), np.zeros(2 * n * n)


@doc_category("Experiments")
def fidelity_sdp(X: HermitianMatrix, Y: HermitianMatrix, config: Optional[SolverConfig] = None) -> Tuple[float, SolveResult]:
    "Solves :func:`fidelity_problem` and returns the fidelity (the negated optimal value) with the solver result."
    problem, start = fidelity_problem(np.asarray(X, dtype=complex), np.asarray(Y, dtype=complex))
    result = solve(problem, config or SolverConfig(), start)
    return -result.objective_value, result


@doc_category("Experiments")
def fidelity_check(
    n: int,
    seed: int = 0,
    trials: int = 10,
    config: Optional[SolverConfig] = None,
) -> FidelityResult:
    """
    Compares the semidefinite representation of the fidelity with :math:`\\Psi_{1/2}(X, Y)`
    over ``trials`` random positive definite pairs.
    """
    if not 1 <= n <= MAX_FIDELITY_DIM:
        raise ValueError(f"n must be in [1, {MAX_FIDELITY_DIM}], got {n}.")

    if trials < 1:
        raise ValueError(f"At least one trial is needed, got {trials}.")

    params = TraceFnParams(0.5)
    records = []
    for index in range(trials):
        rng = make_generator(seed, FIDELITY_STREAM, index)
        X = random_positive_definite(rng, n)
        Y = random_positive_definite(rng, n)
        sdp, result = fidelity_sdp(X, Y, config)
        direct = psi_value(params, X, Y)
        records.append(FidelityTrial(sdp, direct, abs(sdp - direct), result.status))
        logger.info("Fidelity trial %d: sdp = %.10g, direct = %.10g.", index, sdp, direct)

    return FidelityResult(n, records)
