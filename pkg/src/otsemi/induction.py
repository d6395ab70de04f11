"""Closed-form out-of-sample prediction from optimal-transport weights.

New points never seen during propagation are labeled without re-running it:
one transport plan between the full training set and the batch of new points
yields, per new point, a normalized weight vector over training points.  The
label is the weighted majority vote (multi-class) or, for a +/-1 binary
encoding, the sign of the weighted mean.

A batch of size one is degenerate by construction: the plan between n
training points and a single target is forced to the source marginal, so the
weights are uniform and the vote returns the majority training class.
Meaningful weights need a batch whose geometry the plan can discriminate.
"""

from __future__ import annotations

from dataclasses import dataclass

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
class BinaryEncoding:
    """Bijection between two class indices and the values {+1, -1}.

    ``positive_class`` maps to +1 and ``negative_class`` to -1.  Keeping the
    positive side on the lower class index makes the sign rule agree exactly
    with the multi-class vote, whose ties resolve toward lower indices.
    """

    positive_class: int = 0
    negative_class: int = 1

    def __post_init__(self) -> None:
        if self.positive_class == self.negative_class:
            raise InvalidInputError("binary encoding needs two distinct classes")

    def encode(self, labels: np.ndarray) -> np.ndarray:
        labels = np.asarray(labels, dtype=int)
        values = np.where(labels == self.positive_class, 1.0, -1.0)
        unknown = (labels != self.positive_class) & (labels != self.negative_class)
        if np.any(unknown):
            raise InvalidInputError("labels outside the encoded pair")
        return values

    def decode(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if not np.all(np.isin(values, (-1.0, 1.0))):
            raise InvalidInputError("values must be +1 or -1")
        return np.where(values > 0, self.positive_class, self.negative_class).astype(int)


def induction_weights(
    training_points: np.ndarray,
    new_points: np.ndarray,
    epsilon: float | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> np.ndarray:
    """Per-new-point weight vectors over the training set, shape (n_train, n_new).

    One plan is solved between the uniform empirical measures on the training
    set and on the whole batch of new points (squared Euclidean cost); every
    column is then normalized independently to sum to 1.
    """
    X = np.atleast_2d(np.asarray(training_points, dtype=float))
    Y = np.atleast_2d(np.asarray(new_points, dtype=float))
    C = build_cost_matrix(X, Y)
    eps = resolve_epsilon(C, epsilon)
    a = np.full(X.shape[0], 1.0 / X.shape[0])
    b = np.full(Y.shape[0], 1.0 / Y.shape[0])
    plan = sinkhorn(a, b, C, eps, tolerance=tolerance, max_iterations=max_iterations)
    column_mass = plan.coupling.sum(axis=0, keepdims=True)
    return plan.coupling / np.maximum(column_mass, np.finfo(float).tiny)


def inductive_objective(weights: np.ndarray, encoded_labels: np.ndarray, candidate: float) -> float:
    """Weighted squared loss sum_i w_i (y_i - candidate)^2; convex in the candidate."""
    w = np.asarray(weights, dtype=float)
    y = np.asarray(encoded_labels, dtype=float)
    if w.shape != y.shape:
        raise InvalidInputError("weights and labels must have matching shapes")
    return float(np.sum(w * (y - candidate) ** 2))


def predict_regression_value(weights: np.ndarray, encoded_labels: np.ndarray) -> float:
    """Minimizer of the weighted squared loss: sum w_i y_i / sum w_i."""
    w = np.asarray(weights, dtype=float)
    y = np.asarray(encoded_labels, dtype=float)
    if w.shape != y.shape:
        raise InvalidInputError("weights and labels must have matching shapes")
    total = float(w.sum())
    if total <= 0:
        raise InvalidInputError("weights must have positive total mass")
    return float(np.dot(w, y) / total)


def predict_binary(weights: np.ndarray, encoded_labels: np.ndarray) -> int:
    """+1 when the regression value is >= 0, else -1 (zero resolves to +1)."""
    return 1 if predict_regression_value(weights, encoded_labels) >= 0 else -1


def predict_multiclass(weights: np.ndarray, labels: np.ndarray, num_classes: int) -> int:
    """Class whose training representatives carry the largest total weight.

    Ties resolve toward the lowest class index.
    """
    w = np.asarray(weights, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if w.shape != labels.shape:
        raise InvalidInputError("weights and labels must have matching shapes")
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= num_classes:
        raise InvalidInputError(f"labels must lie in 0..{num_classes - 1}")
    votes = np.zeros(num_classes)
    np.add.at(votes, labels, w)
    return int(votes.argmax())


def predict_batch(
    training_points: np.ndarray,
    training_labels: np.ndarray,
    new_points: np.ndarray,
    epsilon: float | None = None,
    num_classes: int | None = None,
    binary_encoding: BinaryEncoding | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> np.ndarray:
    """Label every new point from one shared transport plan.

    Computes ``induction_weights`` once for the batch, then votes per column.
    With ``binary_encoding`` given (two classes), the sign rule on the +/-1
    encoding is used instead of the general vote; the two agree everywhere,
    including ties.
    """
    labels = np.asarray(training_labels, dtype=int)
    K = int(num_classes) if num_classes is not None else int(labels.max()) + 1
    if K < 2:
        raise InvalidInputError("prediction needs at least two classes")
    W = induction_weights(
        training_points, new_points, epsilon, tolerance=tolerance, max_iterations=max_iterations
    )
    if binary_encoding is not None:
        if K != 2:
            raise InvalidInputError("binary encoding applies only to two-class problems")
        encoded = binary_encoding.encode(labels)
        signs = np.array([predict_binary(W[:, j], encoded) for j in range(W.shape[1])])
        return binary_encoding.decode(signs)
    return np.array([predict_multiclass(W[:, j], labels, K) for j in range(W.shape[1])])
