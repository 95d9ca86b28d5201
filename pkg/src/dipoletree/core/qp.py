"""
Filename: qp.py

Description:
    Operator-splitting (ADMM) solver for the box-constrained convex
    QP with a single linear equality that arises as the kernelized
    dual of the node splitter:

        maximize    q . mu - 1/2 mu' P mu
        subject to  a . mu = 0,  lower <= mu <= upper

    The constraint matrix is A = [a'; I]. The equality row carries a
    step size 1e3 times larger than the box rows. The step is rescaled
    every few iterations to balance the primal and dual residuals,
    and the linear system is refactored only when it changes by more
    than a factor of 5. The returned point is closed by an exact
    projection onto {a . mu = 0} intersected with the box.

    The final iterate (or the best one after max_iter) is polished:
    the active set is guessed from the ADMM iterate and the reduced
    KKT system is solved directly. The polished point is kept only
    when its bound multipliers have the right signs and it lowers the
    residuals.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Any

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, lu_factor, lu_solve
from scipy.optimize import brentq

from dipoletree.utilities.errors import QpFailureError, QpInputError, UsageError

logger = logging.getLogger(__name__)


class QpStatus(Enum):
    """ Terminal states of a solve """
    SOLVED = auto()
    MAX_ITER = auto()
    INFEASIBLE = auto()

    @property
    def label(self) -> str:
        """ Lower case name used in reports """
        return self.name.lower()

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class SolverConfig:
    """ ADMM parameters; tol is used for both primal and dual residuals """
    tol: float = 1e-6
    max_iter: int = 20000
    rho: float = 1.0
    alpha: float = 1.6
    sigma: float = 1e-6
    equality_scale: float = 1e3
    polish: bool = True
    delta: float = 1e-6
    refine_iter: int = 3
    adaptive_rho: bool = True
    adaptive_interval: int = 25
    adaptive_tolerance: float = 5.0

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise UsageError("SolverConfig", f"tol must be > 0, got {self.tol}")

        if self.max_iter < 1:
            raise UsageError("SolverConfig", f"max_iter must be >= 1, got {self.max_iter}")

        if not self.rho > 0:
            raise UsageError("SolverConfig", f"rho must be > 0, got {self.rho}")

        if not 0 < self.alpha < 2:
            raise UsageError("SolverConfig", f"alpha must lie in (0, 2), got {self.alpha}")

        if self.adaptive_interval < 1:
            raise UsageError("SolverConfig", f"adaptive_interval must be >= 1, got {self.adaptive_interval}")

    def to_dict(self) -> dict[str, float | int]:
        """ Returns a JSON compatible record """
        return {"tol": self.tol, "max_iter": self.max_iter, "rho": self.rho, "alpha": self.alpha}


@dataclass(frozen=True, eq=False)
class QpProblem:
    """ Box and single-equality constrained convex QP """
    P: np.ndarray
    q: np.ndarray
    a: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        vectors = [np.asarray(v, dtype=float).reshape(-1) for v in (self.q, self.a, self.lower, self.upper)]
        m = vectors[0].shape[0]

        if m == 0:
            P = np.zeros((0, 0))

        if P.shape != (m, m) or any(v.shape[0] != m for v in vectors):
            raise QpInputError(f"inconsistent shapes P{P.shape} with vectors of length {m}")

        if not np.all(np.isfinite(P)) or not all(np.all(np.isfinite(v)) for v in vectors):
            raise QpInputError("NaN or infinite entries in the problem data")

        scale = 1.0 + (np.max(np.abs(P)) if m else 0.0)
        if m and np.max(np.abs(P - P.T)) > 1e-9 * scale:
            raise QpInputError("P is not symmetric")

        if np.any(vectors[2] > vectors[3]):
            raise QpInputError("lower bound exceeds upper bound")

        object.__setattr__(self, "P", 0.5 * (P + P.T))
        for name, vector in zip(("q", "a", "lower", "upper"), vectors):
            object.__setattr__(self, name, vector)

    @property
    def size(self) -> int:
        """ Number of variables """
        return int(self.q.shape[0])

    def objective(self, mu: np.ndarray) -> float:
        """ q . mu - 1/2 mu' P mu """
        return float(self.q @ mu - 0.5 * mu @ (self.P @ mu))

    def is_feasible(self) -> bool:
        """ True when some box point satisfies a . mu = 0 """
        low = np.minimum(self.a * self.lower, self.a * self.upper).sum()
        high = np.maximum(self.a * self.lower, self.a * self.upper).sum()
        slack = 1e-12 * (1.0 + np.abs(self.a) @ np.maximum(np.abs(self.lower), np.abs(self.upper)))

        return bool(low <= slack and high >= -slack)


@dataclass(frozen=True, eq=False)
class QpSolution:
    """ Solver output; duals has one entry for the equality then one per variable """
    mu: np.ndarray
    objective: float
    iterations: int
    status: QpStatus
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    duals: np.ndarray = field(default_factory=lambda: np.zeros(1))


def project_feasible(v: np.ndarray, a: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """
    Euclidean projection onto {a . mu = 0} within the box.

    The projection is clip(v - lam * a) for the root lam of the
    nonincreasing function h(lam) = a . clip(v - lam * a).
    """
    def h(lam: float) -> float:
        return float(a @ np.clip(v - lam * a, lower, upper))

    if h(0.0) == 0.0:
        return np.clip(v, lower, upper)

    active = np.abs(a) > 0
    span = np.max(np.abs(v)) + np.max(np.abs(lower)) + np.max(np.abs(upper)) + 1.0
    bound = span / np.min(np.abs(a[active]))

    lam = brentq(h, -bound, bound, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return np.clip(v - lam * a, lower, upper)


def solve(
    problem: QpProblem,
    cfg: SolverConfig | None = None,
    warm_mu: np.ndarray | None = None,
    warm_duals: np.ndarray | None = None,
) -> QpSolution:
    """ Maximizes q . mu - 1/2 mu' P mu over the constraint set """
    cfg = cfg or SolverConfig()
    m = problem.size

    if m == 0:
        return QpSolution(np.zeros(0), 0.0, 0, QpStatus.SOLVED)

    if not problem.is_feasible():
        logger.debug("QP with %d variables has an empty constraint set", m)
        mu = np.clip(np.zeros(m), problem.lower, problem.upper)
        return QpSolution(mu, problem.objective(mu), 0, QpStatus.INFEASIBLE, np.inf, np.inf)

    P, a, c = problem.P, problem.a, -problem.q
    lower_c = np.concatenate(([0.0], problem.lower))
    upper_c = np.concatenate(([0.0], problem.upper))

    trace = float(np.trace(P))
    jitter = 1e-10 * trace / m if trace > 0 else 0.0

    def factorize(step: float) -> tuple[np.ndarray, Any]:
        rho = np.full(m + 1, step)
        rho[0] = step * cfg.equality_scale

        system = P + (cfg.sigma + step + jitter) * np.eye(m) + rho[0] * np.outer(a, a)
        try:
            return rho, cho_factor(system)
        except LinAlgError as e:
            raise QpFailureError("factorization", str(e)) from e

    step = cfg.rho
    rho, factor = factorize(step)

    def apply_a(x: np.ndarray) -> np.ndarray:
        return np.concatenate(([a @ x], x))

    def apply_at(y: np.ndarray) -> np.ndarray:
        return a * y[0] + y[1:]

    # Initial iterate (warm or cold)
    x = np.zeros(m) if warm_mu is None else np.clip(np.asarray(warm_mu, dtype=float), problem.lower, problem.upper)
    z = np.clip(apply_a(x), lower_c, upper_c)
    y = np.zeros(m + 1) if warm_duals is None else np.asarray(warm_duals, dtype=float).copy()

    status = QpStatus.MAX_ITER
    best = (np.inf, x, z, y, np.inf, np.inf)
    r_prim = r_dual = np.inf
    iteration = 0

    for iteration in range(1, cfg.max_iter + 1):
        rhs = cfg.sigma * x - c + apply_at(rho * z - y)
        x_tilde = cho_solve(factor, rhs)
        z_tilde = apply_a(x_tilde)

        # Over-relaxed updates
        x_next = cfg.alpha * x_tilde + (1.0 - cfg.alpha) * x
        z_relaxed = cfg.alpha * z_tilde + (1.0 - cfg.alpha) * z
        z_next = np.clip(z_relaxed + y / rho, lower_c, upper_c)
        y = y + rho * (z_relaxed - z_next)
        x, z = x_next, z_next

        if not np.all(np.isfinite(x)):
            raise QpFailureError("diverged", f"non-finite iterate at iteration {iteration}")

        ax, px, aty = apply_a(x), P @ x, apply_at(y)
        r_prim = float(np.max(np.abs(ax - z)))
        r_dual = float(np.max(np.abs(px + c + aty)))

        eps_prim = cfg.tol + cfg.tol * max(np.max(np.abs(ax)), np.max(np.abs(z)))
        eps_dual = cfg.tol + cfg.tol * max(np.max(np.abs(px)), np.max(np.abs(aty)), np.max(np.abs(c)))

        if r_prim <= eps_prim and r_dual <= eps_dual:
            status = QpStatus.SOLVED
            break

        merit = max(r_prim / eps_prim, r_dual / eps_dual)
        if merit < best[0]:
            best = (merit, x.copy(), z.copy(), y.copy(), r_prim, r_dual)

        if cfg.adaptive_rho and iteration % cfg.adaptive_interval == 0:
            proposal = _rho_estimate(step, r_prim, r_dual, ax, z, px, aty, c)
            if proposal > cfg.adaptive_tolerance * step or proposal * cfg.adaptive_tolerance < step:
                logger.debug("Iteration %d: rho %.3g -> %.3g", iteration, step, proposal)
                step = proposal
                rho, factor = factorize(step)

    if status is QpStatus.MAX_ITER:
        _, x, z, y, r_prim, r_dual = best

    if cfg.polish:
        polished = _polish(problem, cfg, x, z, y, r_prim, r_dual)
        if polished is not None:
            x, y, r_prim, r_dual = polished

            # A polished best iterate that meets the tolerance is a solution
            if status is QpStatus.MAX_ITER and max(r_prim, r_dual) <= cfg.tol:
                status = QpStatus.SOLVED

    mu = project_feasible(x, a, problem.lower, problem.upper)
    logger.debug(
        "QP m=%d finished %s after %d iterations (r_prim=%.2e, r_dual=%.2e)",
        m, status.label, iteration, r_prim, r_dual
    )

    return QpSolution(mu, problem.objective(mu), iteration, status, r_prim, r_dual, y)


def _rho_estimate(
    step: float, r_prim: float, r_dual: float, ax: np.ndarray, z: np.ndarray,
    px: np.ndarray, aty: np.ndarray, c: np.ndarray,
) -> float:
    """ Step balancing the normalized primal and dual residuals """
    tiny = 1e-12
    prim = r_prim / max(np.max(np.abs(ax)), np.max(np.abs(z)), tiny)
    dual = r_dual / max(np.max(np.abs(px)), np.max(np.abs(aty)), np.max(np.abs(c)), tiny)

    return float(np.clip(step * np.sqrt(prim / max(dual, tiny)), 1e-6, 1e6))


def _polish(
    problem: QpProblem, cfg: SolverConfig, x: np.ndarray, z: np.ndarray, y: np.ndarray,
    r_prim: float, r_dual: float,
) -> tuple[np.ndarray, np.ndarray, float, float] | None:
    """
    Solves the equality constrained QP on the guessed active set.

    Returns (x, y, r_prim, r_dual) of the polished point, or None
    when it does not improve on the ADMM iterate.
    """
    m = problem.size
    lower, upper = problem.lower, problem.upper
    box_z, box_y = z[1:], y[1:]

    at_lower = np.flatnonzero(box_z - lower < -box_y)
    at_upper = np.setdiff1d(np.flatnonzero(upper - box_z < box_y), at_lower)
    rows = np.concatenate((at_lower, at_upper))

    # The equality row is always active
    reduced = np.vstack((problem.a.reshape(1, -1), np.eye(m)[rows]))
    rhs_bounds = np.concatenate(([0.0], lower[at_lower], upper[at_upper]))
    k = reduced.shape[0]

    exact = np.block([[problem.P, reduced.T], [reduced, np.zeros((k, k))]])
    regularized = exact + np.diag(np.concatenate((np.full(m, cfg.delta), np.full(k, -cfg.delta))))
    rhs = np.concatenate((problem.q, rhs_bounds))

    try:
        factor = lu_factor(regularized, check_finite=True)
    except (LinAlgError, ValueError):
        return None

    solution = lu_solve(factor, rhs)
    for _ in range(cfg.refine_iter):
        solution = solution + lu_solve(factor, rhs - exact @ solution)

    if not np.all(np.isfinite(solution)):
        return None

    x_pol, y_red = solution[:m], solution[m:]
    z_pol = np.concatenate(([problem.a @ x_pol], x_pol))
    low_c = np.concatenate(([0.0], lower))
    up_c = np.concatenate(([0.0], upper))

    pol_prim = float(np.max(np.maximum(low_c - z_pol, 0) + np.maximum(z_pol - up_c, 0)))
    pol_dual = float(np.max(np.abs(problem.P @ x_pol - problem.q + reduced.T @ y_red)))

    # Lower bound multipliers are <= 0, upper bound ones >= 0
    box_multipliers = y_red[1:]
    wrong_sign = np.concatenate((box_multipliers[:at_lower.size], -box_multipliers[at_lower.size:]))
    if wrong_sign.size:
        pol_dual = max(pol_dual, float(np.max(wrong_sign)))

    improved = (
        (pol_prim < r_prim and pol_dual < r_dual)
        or (pol_prim < r_prim and r_dual < 1e-10)
        or (pol_dual < r_dual and r_prim < 1e-10)
    )
    if not improved:
        return None

    y_pol = np.zeros(m + 1)
    y_pol[0] = y_red[0]
    y_pol[1 + rows] = y_red[1:]
    return x_pol, y_pol, pol_prim, pol_dual
