"""Discrete optimal-transport primitives.

Cost matrices, an entropy-regularized Sinkhorn solver, and a small-instance
exact oracle used for testing.  The solver minimises

    <T, C> - epsilon * H(T)    over couplings T with marginals (a, b),

where H(T) = -sum_ij t_ij (log t_ij - 1).  Plain matrix-scaling iterations run
in the exp domain; when a scaling factor leaves [1e-300, 1e300] (or the kernel
exp(-C/eps) has a fully underflowed row or column) the solve restarts with
log-sum-exp updates, which are slower but stable for arbitrarily small eps.

All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, NumericalFailureError, UnsupportedSizeError

# Scaling factors outside this range trigger the log-domain fallback.
_SCALING_RANGE = (1e-300, 1e300)
# exp(x) underflows to 0.0 below roughly -745; use the bound matching _SCALING_RANGE.
_LOG_UNDERFLOW = -690.0

DEFAULT_TOLERANCE = 1e-9
DEFAULT_MAX_ITERATIONS = 10_000
DEFAULT_EPSILON_SCALE = 0.05
ORACLE_MAX_SIZE = 8


@dataclass(frozen=True)
class DiscreteMeasure:
    """A weighted point cloud: ``support`` is (n, d), ``weights`` a probability vector."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        support = np.asarray(self.support, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if support.ndim != 2 or support.shape[0] < 1:
            raise InvalidInputError("support must be a non-empty (n, d) matrix")
        if not np.all(np.isfinite(support)):
            raise InvalidInputError("support contains non-finite features")
        if weights.shape != (support.shape[0],):
            raise InvalidInputError(
                f"weights shape {weights.shape} does not match {support.shape[0]} support points"
            )
        if np.any(weights < 0):
            raise InvalidInputError("weights must be nonnegative")
        if abs(float(weights.sum()) - 1.0) > 1e-12:
            raise InvalidInputError("weights must sum to 1 within 1e-12")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, points: np.ndarray) -> "DiscreteMeasure":
        points = np.asarray(points, dtype=float)
        n = points.shape[0]
        return cls(points, np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return self.support.shape[0]


@dataclass
class TransportPlan:
    """A coupling between two discrete measures plus solver diagnostics.

    ``coupling`` is the (n, m) nonnegative matrix; ``marginal_error`` is the
    L-infinity deviation of its row/column sums from the requested marginals.
    ``log_domain`` records whether the log-sum-exp fallback produced the plan.
    """

    coupling: np.ndarray
    epsilon: float
    iterations: int
    converged: bool
    marginal_error: float
    log_domain: bool = field(default=False)


def transport_cost(plan: TransportPlan, cost: np.ndarray) -> float:
    """Frobenius inner product <T, C> of a plan with a cost matrix."""
    return float(np.sum(plan.coupling * np.asarray(cost, dtype=float)))


def build_cost_matrix(source_points: np.ndarray, target_points: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, shape (n, m).

    Raises:
        InvalidInputError: empty input, dimension mismatch, or non-finite feature.
    """
    X = np.atleast_2d(np.asarray(source_points, dtype=float))
    Y = np.atleast_2d(np.asarray(target_points, dtype=float))
    if X.size == 0 or Y.size == 0:
        raise InvalidInputError("point sets must be non-empty")
    if X.shape[1] != Y.shape[1]:
        raise InvalidInputError(
            f"feature dimensions differ: {X.shape[1]} vs {Y.shape[1]}"
        )
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise InvalidInputError("point sets contain non-finite features")
    sq_x = np.sum(X * X, axis=1)[:, None]
    sq_y = np.sum(Y * Y, axis=1)[None, :]
    C = sq_x + sq_y - 2.0 * (X @ Y.T)
    # rounding can push tiny values below zero
    np.maximum(C, 0.0, out=C)
    return C


def default_epsilon(cost: np.ndarray, scale: float = DEFAULT_EPSILON_SCALE) -> float:
    """Scale-adaptive regularization strength: ``scale * mean(cost)``.

    The mean is robust on clustered data, where cost entries split into a
    near and a far group and quantile statistics jump between them.  Falls
    back to 1.0 for an all-zero cost matrix (any eps yields the same plan).
    """
    eps = scale * float(np.mean(cost))
    return eps if eps > 0.0 else 1.0


def resolve_epsilon(cost: np.ndarray, epsilon: float | None) -> float:
    """Return ``epsilon`` if given, otherwise the scale-adaptive default for ``cost``."""
    if epsilon is None:
        return default_epsilon(cost)
    if epsilon <= 0:
        raise InvalidInputError("epsilon must be positive")
    return float(epsilon)


def _validate_sinkhorn_inputs(a: np.ndarray, b: np.ndarray, C: np.ndarray, epsilon: float) -> None:
    n, m = C.shape
    if a.shape != (n,) or b.shape != (m,):
        raise InvalidInputError(
            f"marginal shapes {a.shape}, {b.shape} do not match cost matrix {C.shape}"
        )
    if not (np.all(np.isfinite(C)) and np.all(C >= 0)):
        raise InvalidInputError("cost matrix must be finite and nonnegative")
    for name, v in (("a", a), ("b", b)):
        if np.any(v <= 0):
            raise InvalidInputError(f"marginal {name} has a zero or negative entry")
        if abs(float(v.sum()) - 1.0) > 1e-9:
            raise InvalidInputError(f"marginal {name} must sum to 1")
    if epsilon <= 0:
        raise InvalidInputError("epsilon must be positive")


def _marginal_error(T: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    row = np.abs(T.sum(axis=1) - a).max()
    col = np.abs(T.sum(axis=0) - b).max()
    return float(max(row, col))


def _sinkhorn_scaling(
    a: np.ndarray,
    b: np.ndarray,
    C: np.ndarray,
    epsilon: float,
    tolerance: float,
    max_iterations: int,
    check_interval: int,
) -> TransportPlan | None:
    """Plain exp-domain scaling.  Returns None when factors leave the safe range."""
    K = np.exp(-C / epsilon)
    lo, hi = _SCALING_RANGE
    u = np.ones_like(a)
    v = np.ones_like(b)
    iterations = 0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        while iterations < max_iterations:
            iterations += 1
            v = b / (K.T @ u)
            u = a / (K @ v)
            if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
                return None
            umin, umax = u.min(), np.abs(u).max()
            vmin, vmax = v.min(), np.abs(v).max()
            if min(umin, vmin) < lo or max(umax, vmax) > hi:
                return None
            if iterations % check_interval == 0:
                T = u[:, None] * K * v[None, :]
                if _marginal_error(T, a, b) <= tolerance:
                    break
    T = u[:, None] * K * v[None, :]
    err = _marginal_error(T, a, b)
    return TransportPlan(T, epsilon, iterations, err <= tolerance, err, log_domain=False)


def _sinkhorn_log(
    a: np.ndarray,
    b: np.ndarray,
    C: np.ndarray,
    epsilon: float,
    tolerance: float,
    max_iterations: int,
    check_interval: int,
) -> TransportPlan:
    """Log-sum-exp updates on the dual potentials; stable for small epsilon."""
    log_a = np.log(a)
    log_b = np.log(b)
    f = np.zeros_like(a)
    g = np.zeros_like(b)
    iterations = 0

    def plan() -> np.ndarray:
        return np.exp((f[:, None] + g[None, :] - C) / epsilon)

    while iterations < max_iterations:
        iterations += 1
        M = (g[None, :] - C) / epsilon
        peak = M.max(axis=1)
        f = epsilon * (log_a - (peak + np.log(np.exp(M - peak[:, None]).sum(axis=1))))
        M = (f[:, None] - C) / epsilon
        peak = M.max(axis=0)
        g = epsilon * (log_b - (peak + np.log(np.exp(M - peak[None, :]).sum(axis=0))))
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))):
            raise NumericalFailureError(
                "log-domain potentials diverged; epsilon is too small for this cost matrix"
            )
        if iterations % check_interval == 0:
            if _marginal_error(plan(), a, b) <= tolerance:
                break
    T = plan()
    err = _marginal_error(T, a, b)
    return TransportPlan(T, epsilon, iterations, err <= tolerance, err, log_domain=True)


def sinkhorn(
    a: np.ndarray,
    b: np.ndarray,
    cost: np.ndarray,
    epsilon: float,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    method: str = "auto",
    check_interval: int = 10,
) -> TransportPlan:
    """Solve the entropy-regularized transport problem between marginals a and b.

    Args:
        a, b: strictly positive probability vectors of lengths n and m.
        cost: (n, m) nonnegative cost matrix.
        epsilon: regularization strength, > 0.
        tolerance: L-infinity bound on the marginal violation for convergence.
        max_iterations: cap on scaling iterations; when exhausted the best
            iterate is returned with ``converged=False``.
        method: "auto" (exp domain, falling back to log domain when scaling
            factors leave [1e-300, 1e300]), "scaling" (exp domain only; raises
            NumericalFailureError instead of falling back), or "log".

    Raises:
        InvalidInputError: malformed marginals/cost, or a zero marginal entry.
        NumericalFailureError: method="scaling" underflowed, or even the
            log-domain updates diverged.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    C = np.asarray(cost, dtype=float)
    if C.ndim != 2:
        raise InvalidInputError("cost must be a 2-D matrix")
    _validate_sinkhorn_inputs(a, b, C, epsilon)
    if method not in ("auto", "scaling", "log"):
        raise InvalidInputError(f"unknown method {method!r}")

    if method != "log":
        # A kernel row/column that underflows entirely makes exp-domain
        # scaling divide by zero on the first pass; go straight to log.
        log_kernel_peak = min(
            float((-C / epsilon).max(axis=1).min()),
            float((-C / epsilon).max(axis=0).min()),
        )
        doomed = log_kernel_peak < _LOG_UNDERFLOW
        if not doomed:
            plan = _sinkhorn_scaling(a, b, C, epsilon, tolerance, max_iterations, check_interval)
            if plan is not None:
                return plan
        if method == "scaling":
            raise NumericalFailureError(
                "matrix scaling left the range [1e-300, 1e300] at this epsilon; "
                "rerun with method='log' (log-sum-exp updates) or a larger epsilon"
            )
    return _sinkhorn_log(a, b, C, epsilon, tolerance, max_iterations, check_interval)


def plan_entropy(coupling: np.ndarray | TransportPlan) -> float:
    """Entropy H(T) = -sum_ij t_ij (log t_ij - 1), with 0 * (log 0 - 1) := 0."""
    T = coupling.coupling if isinstance(coupling, TransportPlan) else np.asarray(coupling, dtype=float)
    if np.any(T < 0):
        raise InvalidInputError("coupling entries must be nonnegative")
    positive = T[T > 0]
    return float(-np.sum(positive * (np.log(positive) - 1.0)))


def exact_assignment_oracle(cost: np.ndarray) -> TransportPlan:
    """Exact unregularized optimum for the uniform square case, by enumeration.

    Enumerates all n! permutations of an (n, n) cost matrix with uniform
    marginals 1/n and returns the cheapest permutation coupling; exact ties
    keep the lexicographically smallest permutation.  Intended as a test
    oracle, hence the n <= 8 limit.

    Raises:
        UnsupportedSizeError: non-square cost or n > 8.
    """
    C = np.asarray(cost, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise UnsupportedSizeError(f"oracle requires a square matrix, got {C.shape}")
    n = C.shape[0]
    if n > ORACLE_MAX_SIZE:
        raise UnsupportedSizeError(f"oracle enumerates at most {ORACLE_MAX_SIZE}! assignments, got n={n}")
    if not (np.all(np.isfinite(C)) and np.all(C >= 0)):
        raise InvalidInputError("cost matrix must be finite and nonnegative")
    rows = np.arange(n)
    best_perm: tuple[int, ...] | None = None
    best_cost = np.inf
    for perm in itertools.permutations(range(n)):
        total = float(C[rows, perm].sum())
        if total < best_cost:  # strict: first (lexicographically smallest) wins ties
            best_cost = total
            best_perm = perm
    T = np.zeros((n, n))
    T[rows, best_perm] = 1.0 / n
    return TransportPlan(T, epsilon=0.0, iterations=0, converged=True, marginal_error=0.0)
