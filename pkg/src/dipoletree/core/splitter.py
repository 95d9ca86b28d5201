"""
Filename: splitter.py

Description:
    The node-splitting SVM. Dipoles are oriented against a candidate
    surface, their hinge penalties are aggregated into per-point
    weights, and the ridge-regularized criterion is minimized through
    its kernelized dual. The loop re-orients against each new surface
    until the criterion stops improving.

    NOTE: Index pairs are 0-based rows of the node's covariate matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum, auto
from math import comb
from typing import Any, Callable, Protocol, runtime_checkable

import numpy as np

from dipoletree.core.data import DipoleLabels
from dipoletree.core.kernel import KernelKind, KernelSpec, cross_gram, gram_matrix
from dipoletree.core.qp import QpProblem, QpSolution, QpStatus, SolverConfig, solve
from dipoletree.utilities.errors import (
    DegenerateSplitError, DimensionError, QpFailureError, SolverLimitWarning, UsageError
)

logger = logging.getLogger(__name__)


class DipoleKind(Enum):
    """ Pure dipoles should stay together, mixed ones should be split """
    PURE = auto()
    MIXED = auto()


@dataclass(frozen=True, slots=True)
class Margin:
    """ Uniform hinge margin epsilon """
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise UsageError("Margin", f"epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True, slots=True)
class PriceFactors:
    """ Price factor applied to every pure and every mixed dipole """
    pure: float = 1.0
    mixed: float = 1.0

    def __post_init__(self) -> None:
        if self.pure < 0 or self.mixed < 0:
            raise UsageError("PriceFactors", "price factors must be nonnegative")


@dataclass(frozen=True, eq=False)
class OrientationAssignment:
    """ The four disjoint orientation classes of the labelled dipoles """
    pure_pos: np.ndarray
    pure_neg: np.ndarray
    mixed_pos: np.ndarray
    mixed_neg: np.ndarray

    @property
    def n_dipoles(self) -> int:
        """ Total number of oriented dipoles """
        return sum(int(s.shape[0]) for s in (self.pure_pos, self.pure_neg, self.mixed_pos, self.mixed_neg))


@dataclass(frozen=True, eq=False)
class BetaWeights:
    """ Per-point aggregated hinge weights """
    beta_plus: np.ndarray
    beta_minus: np.ndarray

    @property
    def total(self) -> float:
        """ Sum of both weight vectors """
        return float(self.beta_plus.sum() + self.beta_minus.sum())


@runtime_checkable
class Surface(Protocol):
    """ A splitting surface f(x) = w0 + <w, phi(x)> """
    def values(self, points: np.ndarray) -> np.ndarray:
        """ f at each row of points """

    def ridge_norm(self) -> float:
        """ <w, w>, the intercept excluded """


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """ Explicit oblique hyperplane w0 + w . x """
    intercept: float
    slopes: np.ndarray

    def values(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.slopes.shape[0]:
            raise DimensionError("Hyperplane.values", self.slopes.shape[0], points.shape[1])

        return self.intercept + points @ self.slopes

    def ridge_norm(self) -> float:
        return float(self.slopes @ self.slopes)


@dataclass(frozen=True, eq=False)
class Paraboloid:
    """
    Folded start surface sum_c w_c (x_c - center_c)^2 - offset.

    ridge is the norm of the surface in the polynomial kernel's
    feature space, fixed at construction.
    """
    weights: np.ndarray
    center: np.ndarray
    offset: float
    ridge: float

    def values(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.weights.shape[0]:
            raise DimensionError("Paraboloid.values", self.weights.shape[0], points.shape[1])

        return (points - self.center) ** 2 @ self.weights - self.offset

    def ridge_norm(self) -> float:
        return self.ridge


@dataclass(frozen=True, eq=False)
class SplitModel:
    """
    One node's splitting surface, held by its dual counterparts:
    f(x) = intercept + sum_j c_j K(x_j, x) over the support points.

    history holds the criteria of the kept rounds; trace holds every
    round the loop computed, a discarded final round included.
    """
    support: np.ndarray
    coefficients: np.ndarray
    intercept: float
    kernel: KernelSpec
    kappa: float
    margin: Margin = field(default_factory=Margin)
    objective: float = 0.0
    rounds: int = 0
    history: tuple[float, ...] = ()
    trace: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        support = np.atleast_2d(np.asarray(self.support, dtype=float))
        coefficients = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if support.shape[0] != coefficients.shape[0]:
            raise DimensionError("SplitModel", support.shape[0], coefficients.shape[0])

        object.__setattr__(self, "support", support)
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "intercept", float(self.intercept))

    @property
    def p(self) -> int:
        """ Covariate dimension of the support points """
        return int(self.support.shape[1])

    def values(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.p:
            raise DimensionError("SplitModel.values", self.p, points.shape[1])

        if self.coefficients.size == 0:
            return np.full(points.shape[0], self.intercept)

        return self.intercept + cross_gram(self.kernel, points, self.support) @ self.coefficients

    def ridge_norm(self) -> float:
        if self.coefficients.size == 0:
            return 0.0

        gram = gram_matrix(self.kernel, self.support)
        return float(self.coefficients @ gram @ self.coefficients)

    def to_dict(self) -> dict[str, Any]:
        """ Returns a JSON compatible record """
        return {
            "p": self.p,
            "support": self.support.tolist(),
            "coefficients": self.coefficients.tolist(),
            "intercept": self.intercept,
            "kernel": self.kernel.to_dict(),
            "kappa": self.kappa,
            "epsilon": self.margin.epsilon,
            "objective": self.objective,
            "rounds": self.rounds,
            "history": list(self.history),
            "trace": list(self.trace),
        }

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> SplitModel:
        """ Rebuilds a model from to_dict output """
        support = np.asarray(record["support"], dtype=float)
        if support.size == 0:
            support = support.reshape(0, int(record.get("p", 0)))

        return cls(
            support, np.asarray(record["coefficients"], dtype=float), float(record["intercept"]),
            KernelSpec.from_dict(record["kernel"]), float(record["kappa"]),
            Margin(float(record["epsilon"])), float(record.get("objective", 0.0)),
            int(record.get("rounds", 0)), tuple(float(v) for v in record.get("history", ())),
            tuple(float(v) for v in record.get("trace", ())),
        )


def hinge_pair(v_dot_z: float, epsilon: float) -> tuple[float, float]:
    """ (max(0, eps - v.z), max(0, eps + v.z)) """
    if not epsilon > 0:
        raise UsageError("hinge_pair", f"epsilon must be > 0, got {epsilon}")

    return max(0.0, epsilon - v_dot_z), max(0.0, epsilon + v_dot_z)


def dipole_penalty(
    kind: DipoleKind, positive: bool, f_first: Any, f_second: Any, epsilon: float
) -> np.ndarray:
    """
    Penalty of a dipole under one of its two orientation variants.

    pure  +: phi+(j) + phi+(k)      pure  -: phi-(j) + phi-(k)
    mixed +: phi+(j) + phi-(k)      mixed -: phi-(j) + phi+(k)
    """
    f_first, f_second = np.asarray(f_first, dtype=float), np.asarray(f_second, dtype=float)
    plus_first, minus_first = np.maximum(0, epsilon - f_first), np.maximum(0, epsilon + f_first)
    plus_second, minus_second = np.maximum(0, epsilon - f_second), np.maximum(0, epsilon + f_second)

    if kind is DipoleKind.PURE:
        return plus_first + plus_second if positive else minus_first + minus_second

    return plus_first + minus_second if positive else minus_first + plus_second


def _surface_values(f: Any, points: np.ndarray | None) -> np.ndarray:
    """ Evaluates a Surface, a callable or passes precomputed values through """
    if isinstance(f, Surface):
        return f.values(points)

    if callable(f):
        return np.asarray(f(points), dtype=float)

    return np.asarray(f, dtype=float)


def orient_dipoles(
    labels: DipoleLabels, f: Surface | Callable | np.ndarray, points: np.ndarray | None = None
) -> OrientationAssignment:
    """
    Orients every labelled dipole against the surface f.

    A pure dipole is positive when f(x_j) + f(x_k) >= 0 and a mixed
    dipole when f(x_j) - f(x_k) >= 0, with j the lower index.
    """
    values = _surface_values(f, points)

    pure, mixed = labels.pure, labels.mixed
    pure_positive = values[pure[:, 0]] + values[pure[:, 1]] >= 0
    mixed_positive = values[mixed[:, 0]] - values[mixed[:, 1]] >= 0

    return OrientationAssignment(
        pure[pure_positive], pure[~pure_positive], mixed[mixed_positive], mixed[~mixed_positive]
    )


def beta_weights(
    assign: OrientationAssignment, n: int, price: PriceFactors | None = None
) -> BetaWeights:
    """ Aggregates the oriented dipole penalties into per-point hinge weights """
    price = price or PriceFactors()
    beta_plus, beta_minus = np.zeros(n), np.zeros(n)

    # Pure dipoles weight both endpoints on the same side
    np.add.at(beta_plus, assign.pure_pos.ravel(), price.pure)
    np.add.at(beta_minus, assign.pure_neg.ravel(), price.pure)

    # Mixed dipoles weight the endpoints on opposite sides
    np.add.at(beta_plus, assign.mixed_pos[:, 0], price.mixed)
    np.add.at(beta_minus, assign.mixed_pos[:, 1], price.mixed)
    np.add.at(beta_minus, assign.mixed_neg[:, 0], price.mixed)
    np.add.at(beta_plus, assign.mixed_neg[:, 1], price.mixed)

    return BetaWeights(beta_plus, beta_minus)


def weighted_hinge(values: np.ndarray, betas: BetaWeights, epsilon: float) -> float:
    """ sum_j beta+_j max(0, eps - f_j) + beta-_j max(0, eps + f_j) """
    return float(
        betas.beta_plus @ np.maximum(0.0, epsilon - values)
        + betas.beta_minus @ np.maximum(0.0, epsilon + values)
    )


def regularized_criterion(
    f: Surface, betas: BetaWeights, kappa: float, epsilon: float, points: np.ndarray
) -> float:
    """ 1/2 <w, w> + kappa * weighted hinge loss """
    if not kappa > 0:
        raise UsageError("regularized_criterion", f"kappa must be > 0, got {kappa}")

    return 0.5 * f.ridge_norm() + kappa * weighted_hinge(f.values(points), betas, epsilon)


@dataclass(frozen=True, eq=False)
class DualProblem:
    """
    A QP over the nonzero-bound variables only. Variable v belongs
    to node point points[v] with sign +1 (mu+) or -1 (mu-).
    """
    problem: QpProblem
    points: np.ndarray
    signs: np.ndarray
    n: int

    def expand(self, mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """ Returns full-length (mu+, mu-) vectors """
        mu_plus, mu_minus = np.zeros(self.n), np.zeros(self.n)
        plus = self.signs > 0

        mu_plus[self.points[plus]] = mu[plus]
        mu_minus[self.points[~plus]] = mu[~plus]
        return mu_plus, mu_minus

    def keys(self) -> list[tuple[int, int]]:
        """ (point, sign) identity of each variable """
        return list(zip(self.points.tolist(), self.signs.tolist()))


def assemble_dual(betas: BetaWeights, gram: np.ndarray, kappa: float, epsilon: float) -> DualProblem:
    """ Kernelized dual with stacked (mu+, mu-) variables """
    if not kappa > 0:
        raise UsageError("assemble_dual", f"kappa must be > 0, got {kappa}")

    n = betas.beta_plus.shape[0]
    if gram.shape != (n, n):
        raise DimensionError("assemble_dual", n, gram.shape[0])

    plus = np.flatnonzero(betas.beta_plus > 0)
    minus = np.flatnonzero(betas.beta_minus > 0)
    if plus.size + minus.size == 0:
        raise DegenerateSplitError("assemble_dual", "all hinge weights are zero")

    points = np.concatenate((plus, minus))
    signs = np.concatenate((np.ones(plus.size), -np.ones(minus.size)))
    upper = kappa * np.concatenate((betas.beta_plus[plus], betas.beta_minus[minus]))

    P = np.outer(signs, signs) * gram[np.ix_(points, points)]
    problem = QpProblem(P, np.full(points.size, epsilon), signs, np.zeros(points.size), upper)

    return DualProblem(problem, points, signs, n)


def _free_tolerance(bound: np.ndarray) -> np.ndarray:
    return 1e-6 * np.maximum(1.0, bound)


def recover_intercept(
    sol: QpSolution, dual: DualProblem, betas: BetaWeights, gram: np.ndarray, kappa: float, epsilon: float
) -> float:
    """
    Intercept from the KKT conditions.

    Averages the candidates of free support vectors; with none free,
    returns the midpoint of the interval the bound multipliers imply
    (its finite end when one-sided, 0 when unconstrained).
    """
    mu_plus, mu_minus = dual.expand(sol.mu)
    g = gram @ (mu_plus - mu_minus)

    upper_plus, upper_minus = kappa * betas.beta_plus, kappa * betas.beta_minus
    tol_plus, tol_minus = _free_tolerance(upper_plus), _free_tolerance(upper_minus)

    active_plus, active_minus = betas.beta_plus > 0, betas.beta_minus > 0
    free_plus = active_plus & (mu_plus > tol_plus) & (mu_plus < upper_plus - tol_plus)
    free_minus = active_minus & (mu_minus > tol_minus) & (mu_minus < upper_minus - tol_minus)

    candidates = np.concatenate((epsilon - g[free_plus], -epsilon - g[free_minus]))
    if candidates.size:
        return float(candidates.mean())

    at_zero_plus = active_plus & ~free_plus & (mu_plus <= tol_plus)
    at_upper_plus = active_plus & ~free_plus & ~at_zero_plus
    at_zero_minus = active_minus & ~free_minus & (mu_minus <= tol_minus)
    at_upper_minus = active_minus & ~free_minus & ~at_zero_minus

    # Inactive hinges bound w0 from one side, saturated ones from the other
    lows = np.concatenate((epsilon - g[at_zero_plus], -epsilon - g[at_upper_minus]))
    highs = np.concatenate((epsilon - g[at_upper_plus], -epsilon - g[at_zero_minus]))

    return _interval_midpoint(lows, highs)


def _interval_midpoint(lows: np.ndarray, highs: np.ndarray) -> float:
    low = float(lows.max()) if lows.size else -np.inf
    high = float(highs.min()) if highs.size else np.inf

    if np.isfinite(low) and np.isfinite(high):
        return 0.5 * (low + high)

    if np.isfinite(low):
        return low

    return high if np.isfinite(high) else 0.0


def intercept_interval(g: np.ndarray, betas: BetaWeights, epsilon: float) -> tuple[float, float]:
    """
    Minimizers of the weighted hinge loss over w0 with w fixed.

    The loss is convex piecewise linear in w0 with kinks at
    eps - g_j (beta+) and -eps - g_j (beta-); the argmin set is the
    interval returned, possibly unbounded.
    """
    plus, minus = betas.beta_plus > 0, betas.beta_minus > 0
    knots = np.unique(np.concatenate((epsilon - g[plus], -epsilon - g[minus])))
    if knots.size == 0:
        return -np.inf, np.inf

    losses = np.array([weighted_hinge(w0 + g, betas, epsilon) for w0 in knots])
    best = losses.min()
    optimal = knots[losses <= best + 1e-12 * (1.0 + abs(best))]

    low, high = float(optimal.min()), float(optimal.max())

    # The loss is flat beyond the outer knots when one weight side is empty
    if betas.beta_plus.sum() == 0 and low == knots[0]:
        low = -np.inf

    if betas.beta_minus.sum() == 0 and high == knots[-1]:
        high = np.inf

    return low, high


def decision_value(model: Surface, x: np.ndarray) -> float:
    """ f(x) for a single covariate vector """
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(model.values(x)[0])


def initial_hyperplane(
    points: Any,
    labels: DipoleLabels,
    kappa: float,
    epsilon: float,
    price: PriceFactors | None = None,
) -> Hyperplane:
    """ Best univariate median split; ties go to the lowest covariate index """
    X = np.atleast_2d(np.asarray(getattr(points, "covariates", points), dtype=float))
    n, p = X.shape
    if p < 1:
        raise DimensionError("initial_hyperplane", 1, p)

    best: tuple[float, Hyperplane] | None = None
    for column in range(p):
        slopes = np.zeros(p)
        slopes[column] = 1.0
        candidate = Hyperplane(-float(np.median(X[:, column])), slopes)

        values = candidate.values(X)
        betas = beta_weights(orient_dipoles(labels, values), n, price)
        criterion = 0.5 + kappa * weighted_hinge(values, betas, epsilon)

        if best is None or criterion < best[0]:
            best = (criterion, candidate)

    return best[1]


def _paraboloid_ridge(spec: KernelSpec, weights: np.ndarray, center: np.ndarray) -> float | None:
    """ Feature-space norm of a paraboloid, None when the kernel cannot express it """
    if spec.kind is not KernelKind.POLYNOMIAL or spec.degree < 2:
        return None

    square = comb(spec.degree, 2) * spec.offset ** (spec.degree - 2)
    linear = spec.degree * spec.offset ** (spec.degree - 1)
    if square <= 0:
        return None

    cross = weights * center
    if linear <= 0:
        return None if np.any(cross != 0) else float(weights @ weights / square)

    return float(weights @ weights / square + 4.0 * (cross @ cross) / linear)


def initial_paraboloid(
    points: Any,
    labels: DipoleLabels,
    spec: KernelSpec,
    kappa: float,
    epsilon: float,
    price: PriceFactors | None = None,
) -> Paraboloid | None:
    """
    Best folded start around the covariate medians.

    Candidates fold each single column and, with p > 1, all columns
    at once. The level sits at the median squared distance and the
    surface is scaled to unit mean deviation. Returns None for kernels
    without quadratic features.
    """
    X = np.atleast_2d(np.asarray(getattr(points, "covariates", points), dtype=float))
    n, p = X.shape
    if p < 1:
        raise DimensionError("initial_paraboloid", 1, p)

    center = np.median(X, axis=0)
    masks = [np.eye(p, dtype=bool)[column] for column in range(p)]
    if p > 1:
        masks.append(np.ones(p, dtype=bool))

    best: tuple[float, Paraboloid] | None = None
    for mask in masks:
        distances = (X[:, mask] - center[mask]) ** 2 @ np.ones(int(mask.sum()))
        level = float(np.median(distances))
        spread = float(np.mean(np.abs(distances - level)))
        scale = 1.0 / spread if spread > 0 else 1.0

        weights = np.where(mask, scale, 0.0)
        ridge = _paraboloid_ridge(spec, weights, center)
        if ridge is None:
            return None

        candidate = Paraboloid(weights, center, scale * level, ridge)
        values = candidate.values(X)
        betas = beta_weights(orient_dipoles(labels, values), n, price)
        criterion = 0.5 * ridge + kappa * weighted_hinge(values, betas, epsilon)

        if best is None or criterion < best[0]:
            best = (criterion, candidate)

    return best[1]


def _warm_start(previous: tuple[DualProblem, QpSolution] | None, dual: DualProblem) -> tuple[Any, Any]:
    """ Maps the previous round's iterate onto the new variable set """
    if previous is None:
        return None, None

    old_dual, old_sol = previous
    lookup = {key: index for index, key in enumerate(old_dual.keys())}

    mu = np.zeros(dual.problem.size)
    duals = np.zeros(dual.problem.size + 1)
    duals[0] = old_sol.duals[0]

    for index, key in enumerate(dual.keys()):
        old = lookup.get(key)
        if old is not None:
            mu[index] = old_sol.mu[old]
            duals[index + 1] = old_sol.duals[old + 1]

    return mu, duals




def fit_split(
    points: Any,
    labels: DipoleLabels,
    spec: KernelSpec,
    kappa: float = 1.0,
    epsilon: float = 1.0,
    tau: float = 1e-5,
    max_rounds: int = 25,
    solver: SolverConfig | None = None,
    price: PriceFactors | None = None,
    initial: Surface | None = None,
) -> SplitModel:
    """
    Recursive reorientation and optimization.

    Each round orients the dipoles against the current surface,
    solves the dual, and recovers the intercept. The loop stops once
    consecutive criteria differ by at most tau times the starting
    criterion, after max_rounds, or when a round would increase the
    criterion (the previous surface is kept).

    Without an initial surface the loop starts from the best median
    hyperplane and, for polynomial kernels of degree >= 2, also from
    the best folded paraboloid; the lower final criterion wins, the
    hyperplane run on ties.
    """
    X = np.atleast_2d(np.asarray(getattr(points, "covariates", points), dtype=float))

    if not kappa > 0:
        raise UsageError("fit_split", f"kappa must be > 0, got {kappa}")

    if labels.is_empty:
        raise DegenerateSplitError("fit_split", "no labelled dipoles")

    spec = spec.resolve(X)
    gram = gram_matrix(spec, X)

    if initial is not None:
        starts: list[Surface] = [initial]
    else:
        starts = [initial_hyperplane(X, labels, kappa, epsilon, price)]
        folded = initial_paraboloid(X, labels, spec, kappa, epsilon, price)
        if folded is not None:
            starts.append(folded)

    best: SplitModel | None = None
    for surface in starts:
        model = _reorient(X, labels, spec, gram, surface, kappa, epsilon, tau, max_rounds, solver, price)
        logger.debug("%s start: criterion %.8g after %d rounds", type(surface).__name__, model.objective, model.rounds)

        if best is None or model.objective < best.objective:
            best = model

    return best


def _reorient(
    X: np.ndarray,
    labels: DipoleLabels,
    spec: KernelSpec,
    gram: np.ndarray,
    surface: Surface,
    kappa: float,
    epsilon: float,
    tau: float,
    max_rounds: int,
    solver: SolverConfig | None,
    price: PriceFactors | None,
) -> SplitModel:
    """ The reorientation loop from one start surface """
    n = X.shape[0]
    margin = Margin(epsilon)

    values = surface.values(X)
    betas = beta_weights(orient_dipoles(labels, values), n, price)
    start = 0.5 * surface.ridge_norm() + kappa * weighted_hinge(values, betas, epsilon)

    tolerance = tau * max(start, np.finfo(float).tiny)
    previous_criterion = start
    history: list[float] = []
    trace: list[float] = []
    model: SplitModel | None = None
    previous: tuple[DualProblem, QpSolution] | None = None

    for round_index in range(1, max_rounds + 1):
        dual = assemble_dual(betas, gram, kappa, epsilon)
        sol = solve(dual.problem, solver, *_warm_start(previous, dual))

        if sol.status is QpStatus.INFEASIBLE or not np.isfinite(sol.objective):
            raise QpFailureError(sol.status, "the dual has no usable solution")

        if sol.status is QpStatus.MAX_ITER:
            SolverLimitWarning(sol.iterations, max(sol.primal_residual, sol.dual_residual)).display()

        mu_plus, mu_minus = dual.expand(sol.mu)
        coefficients = mu_plus - mu_minus
        g = gram @ coefficients

        intercept = recover_intercept(sol, dual, betas, gram, kappa, epsilon)
        low, high = intercept_interval(g, betas, epsilon)
        intercept = float(np.clip(intercept, low, high))

        values = intercept + g
        next_betas = beta_weights(orient_dipoles(labels, values), n, price)
        criterion = 0.5 * float(coefficients @ g) + kappa * weighted_hinge(values, next_betas, epsilon)
        trace.append(criterion)

        logger.debug("Round %d: criterion %.8g (QP %s, %d iterations)", round_index, criterion, sol.status, sol.iterations)

        if model is not None and criterion > history[-1]:
            logger.debug("Round %d raised the criterion, keeping round %d", round_index, round_index - 1)
            model = replace(model, trace=tuple(trace))
            break

        history.append(criterion)
        support = coefficients != 0
        model = SplitModel(
            X[support], coefficients[support], intercept, spec, kappa, margin,
            criterion, round_index, tuple(history), tuple(trace)
        )

        converged = abs(previous_criterion - criterion) <= tolerance
        previous_criterion, betas, previous = criterion, next_betas, (dual, sol)

        if converged:
            break

    return model
