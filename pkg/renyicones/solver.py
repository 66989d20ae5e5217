"""
Primal path-following interior-point method for

.. math::

    \\min_z \\; c^T z \\quad \\text{s.t.} \\quad Az = b, \\quad Gz + h \\in \\mathcal{K},

where :math:`\\mathcal{K}` is a product of cones from :mod:`renyicones.cones`.
Without ``G`` and ``h`` the decision vector lives directly in the cone.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import logging
import time

import numpy as np
import numpy.typing as npt
import scipy.linalg as sla
import scipy.sparse as sp

from .cones import Cone, NonNeg, solve_symmetric
from .doc import doc_category
from .errors import (
    DimensionError,
    DomainError,
    FactorizationError,
    InfeasibleStartError,
    ProblemFormatError,
    RenyiConesError,
)


__all__ = (
    "SolverConfig",
    "SolveStatus",
    "IterationRecord",
    "KKTResiduals",
    "SolveResult",
    "ConicProblem",
    "solve",
    "phase1_start",
    "dual_estimate",
    "kkt_residuals",
)


logger = logging.getLogger(__name__)

#: Relative singular value below which the constraint matrix is considered rank deficient.
RANK_TOLERANCE = 1e-10
#: Margin required from a user supplied start.
START_MARGIN = 1e-10
#: Relative residual accepted from the reduced Newton system.
NEWTON_RESIDUAL_TOLERANCE = 1e-6
MAX_POLISH_STEPS = 50
MAX_DOUBLINGS = 200


@doc_category("Solver")
@dataclass(frozen=True)
class SolverConfig:
    """
    Settings of :func:`solve`.

    Parameters
    ------------
    gap_tolerance: float
        Target for the duality gap bound :math:`\\nu\\mu`.
    max_iterations: int
        Maximum number of Newton steps, over all outer iterations.
    mu_reduction: float
        Factor in (0, 1) by which :math:`\\mu` shrinks after each centering.
    line_search_backtrack: float
        Factor in (0, 1) by which the step shrinks during backtracking.
    feasibility_tolerance: float
        Relative tolerance on :math:`\\|Az - b\\|`.
    initial_mu: float
        Starting value of :math:`\\mu`.
    armijo: float
        Sufficient decrease constant in (0, 1/2).
    centering_decrement: float
        Newton decrement under which a point counts as centered.
    polish_decrement: float
        Newton decrement targeted by the final centering.
    max_backtracks: int
        Backtracking steps allowed before declaring numerical failure.
    boundary_margin: float
        Relative margin kept from the cone boundary by accepted iterates.
    """
    gap_tolerance: float = 1e-8
    max_iterations: int = 200
    mu_reduction: float = 0.1
    line_search_backtrack: float = 0.8
    feasibility_tolerance: float = 1e-9
    initial_mu: float = 1.0
    armijo: float = 0.01
    centering_decrement: float = 0.25
    polish_decrement: float = 1e-9
    max_backtracks: int = 60
    boundary_margin: float = 1e-12

    def __post_init__(self):
        positive = ("gap_tolerance", "feasibility_tolerance", "initial_mu", "centering_decrement", "polish_decrement")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}.")

        for name in ("mu_reduction", "line_search_backtrack"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must be in (0, 1), got {getattr(self, name)}.")

        if not 0 < self.armijo < 0.5:
            raise ValueError(f"armijo must be in (0, 0.5), got {self.armijo}.")

        for name in ("max_iterations", "max_backtracks"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1, got {getattr(self, name)}.")

        if self.boundary_margin < 0:
            raise ValueError(f"boundary_margin must be non-negative, got {self.boundary_margin}.")


@doc_category("Solver")
class SolveStatus(str, Enum):
    "Termination status of :func:`solve`."
    OPTIMAL = "optimal"
    ITERATION_LIMIT = "iteration_limit"
    NUMERICAL_FAILURE = "numerical_failure"
    INFEASIBLE = "infeasible"


@doc_category("Solver")
@dataclass(frozen=True)
class IterationRecord:
    "One Newton step of the path-following method."
    iteration: int
    mu: float
    decrement: float
    step_length: float
    backtracks: int
    objective: float


@doc_category("Solver")
@dataclass(frozen=True)
class KKTResiduals:
    """
    Residuals of the optimality conditions.

    Parameters
    ------------
    primal: float
        :math:`\\|Az - b\\|`.
    dual: float
        :math:`\\|G^T s + A^T y - c\\|`.
    gap: float
        :math:`|c^T z - (b^T y - h^T s)|`.
    """
    primal: float
    dual: float
    gap: float


@doc_category("Solver")
@dataclass
class SolveResult:
    """
    Output of :func:`solve`.

    ``x`` is the decision vector :math:`z`, ``cone_vector`` the stacked cone point
    :math:`Gz + h`, ``dual`` the estimate :math:`s = -\\mu\\nabla F(Gz + h)` and
    ``multipliers`` the equality multipliers :math:`y`.
    """
    status: SolveStatus
    x: np.ndarray
    objective_value: float
    gap_bound: float
    iterations: int
    trace: List[IterationRecord] = field(default_factory=list)
    cone_vector: Optional[np.ndarray] = None
    dual: Optional[np.ndarray] = None
    multipliers: Optional[np.ndarray] = None
    residuals: Optional[KKTResiduals] = None
    mu: float = np.nan
    wall_time: float = 0.0
    message: str = ""


Matrix = Union[np.ndarray, sp.spmatrix]


def _as_sparse(M: Optional[Matrix], shape: Tuple[int, int], name: str) -> sp.csr_matrix:
    M = sp.csr_matrix(shape) if M is None else sp.csr_matrix(M, dtype=float)
    if M.shape != shape:
        raise DimensionError(f"{name} has shape {M.shape}, expected {shape}.")

    return M


@doc_category("Solver")
class ConicProblem:
    """
    Conic problem :math:`\\min c^T z` s.t. :math:`Az = b`, :math:`Gz + h \\in \\mathcal{K}`.

    Parameters
    ------------
    objective: numpy.ndarray
        The vector :math:`c`.
    cones: Sequence[Cone]
        Cone blocks. Their dimensions add up to the number of rows of ``G``.
    A: Optional[numpy.ndarray | scipy.sparse.spmatrix]
        Equality constraint matrix. Defaults to no constraints.
    b: Optional[numpy.ndarray]
        Equality right-hand side.
    G: Optional[numpy.ndarray | scipy.sparse.spmatrix]
        Cone embedding. Defaults to the identity.
    h: Optional[numpy.ndarray]
        Cone offset. Defaults to zero.

    Raises
    --------
    DimensionError
        Dimensions don't match.
    ProblemFormatError
        ``A`` doesn't have full row rank.
    """
    def __init__(
        self,
        objective: npt.ArrayLike,
        cones: Sequence[Cone],
        A: Optional[Matrix] = None,
        b: Optional[npt.ArrayLike] = None,
        G: Optional[Matrix] = None,
        h: Optional[npt.ArrayLike] = None,
    ) -> None:
        self.c = np.asarray(objective, dtype=float).ravel()
        self.cones = tuple(cones)
        if not self.cones:
            raise DimensionError("At least one cone block is needed.")

        n_vars = self.c.size
        cone_dim = sum(cone.dim for cone in self.cones)
        self.b = np.zeros(0) if b is None else np.asarray(b, dtype=float).ravel()
        self.A = _as_sparse(A, (self.b.size, n_vars), "A")
        if G is None:
            if cone_dim != n_vars:
                raise DimensionError(
                    f"Cone dimensions add up to {cone_dim}, but the objective has length {n_vars}."
                )
            G = sp.identity(n_vars, format="csr")

        self.G = _as_sparse(G, (cone_dim, n_vars), "G")
        self.h = np.zeros(cone_dim) if h is None else np.asarray(h, dtype=float).ravel()
        if self.h.shape != (cone_dim,):
            raise DimensionError(f"h has length {self.h.size}, expected {cone_dim}.")

        self._presolve()

    def _presolve(self):
        n_vars = self.c.size
        m = self.b.size
        if m == 0:
            self.null_space = np.eye(n_vars)
            self.particular = np.zeros(n_vars)
            return

        if m > n_vars:
            raise ProblemFormatError(f"{m} equality constraints on {n_vars} variables can't have full row rank.")

        U, S, Vt = sla.svd(self.A.toarray(), lapack_driver="gesvd")
        rank = int(np.sum(S > RANK_TOLERANCE * max(S[0], 1.0)))
        if rank < m:
            raise ProblemFormatError(
                f"Constraint matrix has rank {rank} < {m} rows (tolerance {RANK_TOLERANCE}).\n"
                "Remove redundant equality constraints."
            )

        self.null_space = Vt[m:].T
        self.particular = Vt[:m].T @ ((U.T @ self.b) / S)

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def nu(self) -> float:
        "Barrier parameter of the cone product."
        return float(sum(cone.nu for cone in self.cones))

    @property
    def blocks(self) -> List[Tuple[Cone, slice]]:
        "Cones paired with their slices of the stacked cone vector."
        blocks, offset = [], 0
        for cone in self.cones:
            blocks.append((cone, slice(offset, offset + cone.dim)))
            offset += cone.dim

        return blocks

    def cone_vector(self, z: np.ndarray) -> np.ndarray:
        "Returns :math:`Gz + h`."
        return self.G @ z + self.h

    def project(self, z: np.ndarray) -> np.ndarray:
        "Closest point to ``z`` on :math:`Az = b`."
        return self.particular + self.null_space @ (self.null_space.T @ (z - self.particular))

    def interior(self, z: np.ndarray, margin: float = 0.0) -> bool:
        "True if :math:`Gz + h` is inside every cone block, with margin ``margin``."
        x = self.cone_vector(z)
        return all(cone.interior(x[sl], margin) for cone, sl in self.blocks)

    def primal_residual(self, z: np.ndarray) -> float:
        return float(np.linalg.norm(self.A @ z - self.b)) if self.b.size else 0.0

    def interior_direction(self) -> np.ndarray:
        return np.concatenate([cone.interior_direction() for cone in self.cones])


class _BarrierObjective:
    """
    :math:`\\varphi(z) = c^T z / \\mu + F(Gz + h)` and its reduced derivatives,
    with :math:`z = z_p + N w` on the affine subspace.
    """
    def __init__(self, problem: ConicProblem) -> None:
        self.problem = problem
        self.K = np.asarray(problem.G @ problem.null_space)

    def oracles(self, z: np.ndarray):
        x = self.problem.cone_vector(z)
        return [(cone.oracle(x[sl]), sl) for cone, sl in self.problem.blocks]

    def barrier(self, z: np.ndarray) -> float:
        return sum(oracle.value for oracle, _ in self.oracles(z))

    def value(self, z: np.ndarray, mu: float) -> float:
        return float(self.problem.c @ z / mu + self.barrier(z))

    def barrier_gradient(self, oracles) -> np.ndarray:
        return np.concatenate([oracle.gradient for oracle, _ in oracles])

    def reduced_gradient(self, oracles, mu: float) -> np.ndarray:
        return self.problem.null_space.T @ self.problem.c / mu + self.K.T @ self.barrier_gradient(oracles)

    def reduced_hessian(self, oracles) -> np.ndarray:
        r = self.K.shape[1]
        hessian = np.zeros((r, r))
        for oracle, sl in oracles:
            K_block = self.K[sl]
            columns = np.flatnonzero(np.any(K_block != 0, axis=0))
            if not columns.size:
                continue

            K_used = K_block[:, columns]
            if columns.size >= K_block.shape[0]:
                HK = oracle.hessian_matrix @ K_used
            else:
                HK = np.stack([oracle.hessian_apply(column) for column in K_used.T], axis=1)

            hessian[np.ix_(columns, columns)] += K_used.T @ HK

        return (hessian + hessian.T) / 2


def _newton_direction(hessian: np.ndarray, gradient: np.ndarray) -> np.ndarray:
    if not gradient.size:
        return np.zeros(0)

    scale = np.sqrt(np.abs(np.diag(hessian)))
    scale[scale == 0] = 1.0
    scaled = hessian / np.outer(scale, scale)
    return -solve_symmetric(scaled, gradient / scale, NEWTON_RESIDUAL_TOLERANCE) / scale


Monitor = Callable[[np.ndarray, float, bool], Optional[SolveStatus]]


def _path_follow(
    problem: ConicProblem,
    config: SolverConfig,
    z: np.ndarray,
    monitor: Optional[Monitor] = None,
) -> SolveResult:
    objective = _BarrierObjective(problem)
    N = problem.null_space
    nu = problem.nu
    mu = config.initial_mu
    trace: List[IterationRecord] = []
    iterations = 0
    outer = 0
    status: Optional[SolveStatus] = None
    message = ""
    polishing = False
    polish_steps = 0

    logger.info(
        "Starting path following: %d variables, %d equalities, %d cone blocks, nu = %g.",
        problem.n_vars, problem.b.size, len(problem.cones), nu
    )

    while status is None:
        if not polishing and iterations >= config.max_iterations:
            status = SolveStatus.ITERATION_LIMIT
            message = f"Reached {config.max_iterations} Newton steps."
            break

        try:
            oracles = objective.oracles(z)
            gradient = objective.reduced_gradient(oracles, mu)
            direction = _newton_direction(objective.reduced_hessian(oracles), gradient)
        except (FactorizationError, DomainError, ArithmeticError) as exc:
            status = SolveStatus.NUMERICAL_FAILURE
            message = f"Newton system breakdown: {exc}"
            break

        slope = float(gradient @ direction)
        decrement = float(np.sqrt(max(-slope, 0.0)))
        if not np.isfinite(decrement):
            status = SolveStatus.NUMERICAL_FAILURE
            message = "Newton decrement is not finite."
            break

        if polishing and decrement <= config.polish_decrement:
            status = SolveStatus.OPTIMAL
            break

        # Line search
        dz = N @ direction
        current = objective.value(z, mu)
        step = 1.0
        margin = config.boundary_margin * max(1.0, float(np.max(np.abs(problem.cone_vector(z)))))
        for backtracks in range(config.max_backtracks + 1):
            candidate = z + step * dz
            if problem.interior(candidate, margin):
                # Inside the Dikin ellipsoid the full step is a descent step.
                if decrement <= config.centering_decrement:
                    break

                try:
                    if objective.value(candidate, mu) <= current + config.armijo * step * slope:
                        break
                except (DomainError, ArithmeticError):
                    pass

            step *= config.line_search_backtrack
        else:
            if polishing:
                # Can't improve the centering any further, the gap test already passed.
                status = SolveStatus.OPTIMAL
                break

            status = SolveStatus.NUMERICAL_FAILURE
            message = f"Line search failed after {config.max_backtracks} backtracks."
            break

        z = candidate
        iterations += 1
        record = IterationRecord(outer, mu, decrement, step, backtracks, float(problem.c @ z))
        trace.append(record)
        logger.debug(
            "Newton step %d: decrement = %.3e, step = %.3e, backtracks = %d.",
            iterations, decrement, step, backtracks
        )

        if polishing:
            polish_steps += 1
            if polish_steps >= MAX_POLISH_STEPS:
                status = SolveStatus.OPTIMAL
            continue

        centered = decrement <= config.centering_decrement
        if monitor is not None:
            status = monitor(z, mu, centered)
            if status is not None:
                break

        if centered:
            logger.info(
                "Outer iteration %d: mu = %.3e, objective = %.10g, gap bound = %.3e, Newton steps = %d.",
                outer, mu, record.objective, nu * mu, iterations
            )
            outer += 1
            if nu * mu <= config.gap_tolerance:
                polishing = True
            else:
                mu *= config.mu_reduction

    if status is SolveStatus.OPTIMAL and problem.primal_residual(z) > config.feasibility_tolerance * (1 + np.linalg.norm(problem.b)):
        status = SolveStatus.NUMERICAL_FAILURE
        message = "Equality constraints drifted beyond the feasibility tolerance."

    result = SolveResult(
        status=status,
        x=z,
        objective_value=float(problem.c @ z),
        gap_bound=nu * mu,
        iterations=iterations,
        trace=trace,
        cone_vector=problem.cone_vector(z),
        mu=mu,
        message=message,
    )
    try:
        result.dual, result.multipliers = dual_estimate(problem, z, mu)
        result.residuals = kkt_residuals(problem, z, result.dual, result.multipliers)
    except RenyiConesError as exc:
        logger.warning("Dual estimate unavailable: %s", exc)

    return result


@doc_category("Solver")
def solve(
    problem: ConicProblem,
    config: Optional[SolverConfig] = None,
    start: Optional[npt.ArrayLike] = None,
) -> SolveResult:
    """
    Solves ``problem`` by primal path following.

    Each outer iteration minimizes :math:`c^T z/\\mu + F(Gz + h)` over :math:`Az = b`
    with damped Newton steps. :math:`\\mu` is reduced once the Newton decrement drops
    under ``config.centering_decrement``, until :math:`\\nu\\mu \\le` ``config.gap_tolerance``.
    A final centering then brings the iterate close to the central path.

    Parameters
    ------------
    problem: ConicProblem
        The problem.
    config: Optional[SolverConfig]
        Settings. Defaults to :class:`SolverConfig()`.
    start: Optional[numpy.ndarray]
        Strictly feasible starting point. If omitted, one is found by :func:`phase1_start`.

    Returns
    ----------
    SolveResult
        The result. Numerical breakdowns are reported through its status.

    Raises
    --------
    DomainError
        ``start`` is not strictly inside the cones.
    InfeasibleStartError
        ``start`` was omitted and phase 1 found no strictly feasible point.
    """
    config = config or SolverConfig()
    started = time.perf_counter()
    if start is None:
        z = phase1_start(problem, config)
    else:
        z = np.asarray(start, dtype=float).ravel()
        if z.shape != (problem.n_vars,):
            raise DimensionError(f"Start has length {z.size}, expected {problem.n_vars}.")

        if problem.primal_residual(z) > config.feasibility_tolerance * (1 + np.linalg.norm(problem.b)):
            raise DomainError("Start doesn't satisfy the equality constraints.")

        z = problem.project(z)
        if not problem.interior(z, START_MARGIN):
            raise DomainError(f"Start is not inside every cone block with margin {START_MARGIN}.")

    result = _path_follow(problem, config, z)
    result.wall_time = time.perf_counter() - started
    logger.info(
        "Finished with status %s: objective = %.10g, gap bound = %.3e, %d Newton steps.",
        result.status.value, result.objective_value, result.gap_bound, result.iterations
    )
    return result


@doc_category("Solver")
def phase1_start(problem: ConicProblem, config: Optional[SolverConfig] = None) -> np.ndarray:
    """
    Finds a strictly feasible point of ``problem``.

    Solves the auxiliary problem :math:`\\min \\sigma` s.t. :math:`Az = b`,
    :math:`Gz + h + \\sigma e \\in \\mathcal{K}`, :math:`\\sigma + 1 \\ge 0`,
    where :math:`e` is an interior direction of the cones, and stops as soon as :math:`\\sigma < 0`.

    Raises
    --------
    InfeasibleStartError
        The central path certifies :math:`\\sigma^* \\ge 0` or the auxiliary solve failed.
    """
    config = config or SolverConfig()
    z = problem.particular.copy()
    if problem.interior(z, START_MARGIN):
        return z

    e = problem.interior_direction()
    x = problem.cone_vector(z)
    sigma = 1.0
    for _ in range(MAX_DOUBLINGS):
        if all(cone.interior(x[sl] + sigma * e[sl], 1.0) for cone, sl in problem.blocks):
            break
        sigma *= 2
    else:
        raise InfeasibleStartError("No multiple of the interior direction reaches the interior.")

    n = problem.n_vars
    c_aux = np.zeros(n + 1)
    c_aux[-1] = 1.0
    A_aux = sp.hstack((problem.A, sp.csr_matrix((problem.b.size, 1)))) if problem.b.size else None
    G_aux = sp.bmat([
        [problem.G, sp.csr_matrix(e[:, None])],
        [None, sp.csr_matrix(np.array([[1.0]]))],
    ])
    h_aux = np.concatenate((problem.h, [1.0]))
    auxiliary = ConicProblem(c_aux, (*problem.cones, NonNeg(1)), A_aux, problem.b if problem.b.size else None, G_aux, h_aux)
    nu = auxiliary.nu

    def monitor(w: np.ndarray, mu: float, centered: bool) -> Optional[SolveStatus]:
        if w[-1] < 0 and problem.interior(w[:-1], START_MARGIN):
            return SolveStatus.OPTIMAL
        if centered and w[-1] - nu * mu > 0:
            return SolveStatus.INFEASIBLE

        return None

    logger.info("Phase 1: searching for a strictly feasible point, sigma = %g.", sigma)
    result = _path_follow(auxiliary, config, np.concatenate((z, [sigma])), monitor)
    w = result.x
    if w[-1] < 0 and problem.interior(w[:-1], START_MARGIN):
        logger.info("Phase 1 succeeded after %d Newton steps.", result.iterations)
        return problem.project(w[:-1])

    if result.status is SolveStatus.ITERATION_LIMIT:
        raise InfeasibleStartError(f"Phase 1 reached the iteration limit with sigma = {w[-1]:.3e}.")

    raise InfeasibleStartError(
        f"Phase 1 found no strictly feasible point (status {result.status.value}, sigma = {w[-1]:.3e})."
    )


@doc_category("Solver")
def dual_estimate(problem: ConicProblem, z: np.ndarray, mu: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Dual estimate at the point ``z`` of the central path with parameter ``mu``.

    Returns the conic dual :math:`s = -\\mu \\nabla F(Gz + h)` and the least-squares
    multipliers :math:`y` of :math:`G^T s + A^T y = c`.
    """
    x = problem.cone_vector(z)
    s = -mu * np.concatenate([cone.oracle(x[sl]).gradient for cone, sl in problem.blocks])
    if not problem.b.size:
        return s, np.zeros(0)

    rhs = problem.c - problem.G.T @ s
    y = sla.lstsq(problem.A.T.toarray(), rhs)[0]
    return s, y


@doc_category("Solver")
def kkt_residuals(
    problem: ConicProblem,
    z: np.ndarray,
    dual: np.ndarray,
    multipliers: Optional[np.ndarray] = None,
) -> KKTResiduals:
    """
    Returns the primal residual, dual residual and duality gap at ``(z, dual, multipliers)``.

    If ``multipliers`` is omitted, the least-squares multipliers of
    :math:`G^T s + A^T y = c` are used.
    """
    z = np.asarray(z, dtype=float)
    dual = np.asarray(dual, dtype=float)
    if multipliers is None:
        if problem.b.size:
            multipliers = sla.lstsq(problem.A.T.toarray(), problem.c - problem.G.T @ dual)[0]
        else:
            multipliers = np.zeros(0)

    dual_value = problem.b @ multipliers - problem.h @ dual
    dual_residual = problem.G.T @ dual + problem.A.T @ multipliers - problem.c
    return KKTResiduals(
        primal=problem.primal_residual(z),
        dual=float(np.linalg.norm(dual_residual)),
        gap=float(abs(problem.c @ z - dual_value)),
    )
