"""Transductive label propagation over optimal-transport affinities.

Labels flow from a labeled pool to unlabeled points through a bipartite
affinity matrix derived from the transport plan between the two point sets.
The labeled side is never modified; each unlabeled point receives a class
distribution (the per-class share of its affinity column), a certainty score
(one minus normalized Shannon entropy), and finally an argmax label.

Propagation optionally iterates: points whose certainty clears a threshold
are absorbed into the pool with their argmax label and the affinities are
recomputed for the rest.  The default configuration runs a single voting
round, which measured consistently stronger on benchmark data than threshold
absorption (absorbed batches skew the pool's class proportions, and the
uniform transport marginals then force mass across classes).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .transport import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
    build_cost_matrix,
    resolve_epsilon,
    sinkhorn,
)


@dataclass(frozen=True)
class LabeledPool:
    """Labeled training points: ``points`` (n, d) and integer ``labels`` in {0..K-1}.

    Every class in {0..K-1} must appear at least once, and n >= K >= 2.
    """

    points: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self) -> None:
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        labels = np.asarray(self.labels, dtype=int)
        if labels.shape != (points.shape[0],):
            raise InvalidInputError("labels length must match the number of points")
        if self.num_classes < 2:
            raise InvalidInputError("a labeled pool needs at least two classes")
        if points.shape[0] < self.num_classes:
            raise InvalidInputError("fewer labeled points than classes")
        present = np.unique(labels)
        if present.min(initial=0) < 0 or present.max(initial=0) >= self.num_classes:
            raise InvalidInputError(f"labels must lie in 0..{self.num_classes - 1}")
        if len(present) != self.num_classes:
            missing = sorted(set(range(self.num_classes)) - set(present.tolist()))
            raise InvalidInputError(f"classes without a labeled representative: {missing}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class PropagationConfig:
    """Knobs for ``propagate``.

    ``epsilon=None`` selects the scale-adaptive default per cost matrix.
    ``certainty_threshold`` is the absorption cutoff; it only matters when
    ``max_rounds`` exceeds one.
    """

    epsilon: float | None = None
    certainty_threshold: float = 0.8
    max_rounds: int = 1
    solver_tolerance: float = DEFAULT_TOLERANCE
    solver_max_iterations: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self) -> None:
        if self.max_rounds < 1:
            raise InvalidInputError("max_rounds must be at least 1")
        if not 0.0 <= self.certainty_threshold <= 1.0:
            raise InvalidInputError("certainty_threshold must lie in [0, 1]")


@dataclass
class PropagationResult:
    """Labels for the unlabeled points, in their original order.

    ``distributions`` has one row per point (a probability vector over the K
    classes, recorded at the round in which the point was labeled) and
    ``certainty`` the matching entropy-based scores in [0, 1].
    """

    predicted_labels: np.ndarray
    distributions: np.ndarray
    certainty: np.ndarray
    rounds: int


def bipartite_affinities(
    labeled_points: np.ndarray,
    unlabeled_points: np.ndarray,
    epsilon: float | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> np.ndarray:
    """Column-normalized transport plan between two uniform point clouds.

    Solves entropic transport between the uniform empirical measures on the
    two sets and divides each column by its sum, so that column j is a
    probability vector over the labeled points for unlabeled point j.
    """
    X = np.atleast_2d(np.asarray(labeled_points, dtype=float))
    Y = np.atleast_2d(np.asarray(unlabeled_points, dtype=float))
    C = build_cost_matrix(X, Y)
    eps = resolve_epsilon(C, epsilon)
    a = np.full(X.shape[0], 1.0 / X.shape[0])
    b = np.full(Y.shape[0], 1.0 / Y.shape[0])
    plan = sinkhorn(a, b, C, eps, tolerance=tolerance, max_iterations=max_iterations)
    column_mass = plan.coupling.sum(axis=0, keepdims=True)
    return plan.coupling / np.maximum(column_mass, np.finfo(float).tiny)


def class_mass(affinities: np.ndarray, labels: np.ndarray, num_classes: int) -> np.ndarray:
    """Aggregate affinity columns per class: out[j, k] = sum of column j over rows with label k."""
    W = np.asarray(affinities, dtype=float)
    out = np.zeros((W.shape[1], num_classes))
    for k in range(num_classes):
        out[:, k] = W[labels == k].sum(axis=0)
    return out


def certainty_scores(distributions: np.ndarray) -> np.ndarray:
    """1 - H(p)/log(K) per row: 1 for one-hot rows, 0 for uniform rows."""
    P = np.asarray(distributions, dtype=float)
    K = P.shape[1]
    safe = np.where(P > 0, P, 1.0)
    entropy = -np.sum(P * np.log(safe), axis=1)
    return 1.0 - entropy / np.log(K)


def propagate(
    pool: LabeledPool,
    unlabeled_points: np.ndarray,
    config: PropagationConfig | None = None,
) -> PropagationResult:
    """Assign a class to every unlabeled point by transport-affinity voting.

    Each round computes bipartite affinities between the current pool and the
    still-unlabeled points, per-class column masses, and certainty scores.
    Points at or above the certainty threshold join the pool with their argmax
    label (ties break toward the lowest class index).  The loop stops when
    everything is labeled, no point clears the threshold, or ``max_rounds`` is
    reached; any remaining points then keep the argmax label of the final
    round, so the result is always total.

    Raises:
        InvalidInputError: empty ``unlabeled_points`` or dimension mismatch.
    """
    cfg = config or PropagationConfig()
    X_u = np.atleast_2d(np.asarray(unlabeled_points, dtype=float))
    if X_u.size == 0:
        raise InvalidInputError("unlabeled_points must be non-empty")
    if X_u.shape[1] != pool.points.shape[1]:
        raise InvalidInputError(
            f"unlabeled feature dimension {X_u.shape[1]} does not match pool {pool.points.shape[1]}"
        )
    K = pool.num_classes
    n_u = X_u.shape[0]

    predicted = np.full(n_u, -1, dtype=int)
    distributions = np.zeros((n_u, K))
    certainty = np.zeros(n_u)
    pool_points = pool.points
    pool_labels = pool.labels
    remaining = np.arange(n_u)
    rounds = 0

    while remaining.size > 0 and rounds < cfg.max_rounds:
        rounds += 1
        W = bipartite_affinities(
            pool_points,
            X_u[remaining],
            cfg.epsilon,
            tolerance=cfg.solver_tolerance,
            max_iterations=cfg.solver_max_iterations,
        )
        dist = class_mass(W, pool_labels, K)
        score = certainty_scores(dist)
        labels = dist.argmax(axis=1)
        distributions[remaining] = dist
        certainty[remaining] = score
        passed = score >= cfg.certainty_threshold
        if not passed.any() or rounds == cfg.max_rounds:
            # forced final round: everything left keeps its argmax label
            predicted[remaining] = labels
            remaining = remaining[:0]
            break
        absorbed = remaining[passed]
        predicted[absorbed] = labels[passed]
        pool_points = np.vstack([pool_points, X_u[absorbed]])
        pool_labels = np.concatenate([pool_labels, labels[passed]])
        remaining = remaining[~passed]

    return PropagationResult(predicted, distributions, certainty, rounds)


def one_hot(labels: np.ndarray, num_classes: int) -> np.ndarray:
    """(n, K) one-hot encoding of integer labels."""
    labels = np.asarray(labels, dtype=int)
    out = np.zeros((labels.shape[0], num_classes))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def transductive_objective(
    affinities: np.ndarray,
    labeled_values: np.ndarray,
    predicted_values: np.ndarray,
) -> float:
    """Smoothness objective sum_ij W_ij * ||y_i - f_j||^2 (diagnostic).

    Values may be scalars per point (e.g. a +/-1 binary encoding) or one-hot
    rows; the loss is the squared Euclidean distance between value vectors.
    """
    W = np.asarray(affinities, dtype=float)
    Y = np.asarray(labeled_values, dtype=float)
    F = np.asarray(predicted_values, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if F.ndim == 1:
        F = F[:, None]
    if W.shape != (Y.shape[0], F.shape[0]) or Y.shape[1] != F.shape[1]:
        raise InvalidInputError("affinity and value shapes are inconsistent")
    sq = (
        np.sum(Y * Y, axis=1)[:, None]
        + np.sum(F * F, axis=1)[None, :]
        - 2.0 * (Y @ F.T)
    )
    return float(np.sum(W * np.maximum(sq, 0.0)))
