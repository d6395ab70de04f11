"""Clustering-agreement metrics: adjusted Rand index and normalized mutual information.

Both metrics are relabeling-invariant and symmetric in their arguments.
Counts are kept in exact integer arithmetic as long as possible so that
identical partitions score exactly 1.0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class ContingencyTable:
    """Joint label counts between two partitions of the same items."""

    counts: np.ndarray  # (K_true, K_pred) nonnegative ints
    row_sums: np.ndarray
    col_sums: np.ndarray
    total: int

    @classmethod
    def from_labels(cls, labels_true, labels_pred) -> "ContingencyTable":
        a = np.asarray(labels_true).ravel()
        b = np.asarray(labels_pred).ravel()
        if a.size != b.size:
            raise InvalidInputError(f"label lengths differ: {a.size} vs {b.size}")
        if a.size < 2:
            raise InvalidInputError("need at least two items to compare partitions")
        _, ai = np.unique(a, return_inverse=True)
        _, bi = np.unique(b, return_inverse=True)
        k_true = int(ai.max()) + 1
        k_pred = int(bi.max()) + 1
        counts = np.zeros((k_true, k_pred), dtype=np.int64)
        np.add.at(counts, (ai, bi), 1)
        return cls(counts, counts.sum(axis=1), counts.sum(axis=0), int(a.size))


def _pairs(x: int) -> int:
    return x * (x - 1) // 2


def adjusted_rand_index(labels_true, labels_pred) -> float:
    """Hubert-Arabie adjusted Rand index in [-1, 1].

    (Index - Expected) / (Max - Expected) over co-clustered pair counts; 1.0
    exactly iff the partitions are identical up to relabeling.  When Max equals
    Expected (both partitions trivial) the index is defined as 1.0.
    """
    table = ContingencyTable.from_labels(labels_true, labels_pred)
    index = int(sum(_pairs(int(v)) for v in table.counts.ravel()))
    pairs_true = int(sum(_pairs(int(v)) for v in table.row_sums))
    pairs_pred = int(sum(_pairs(int(v)) for v in table.col_sums))
    total_pairs = _pairs(table.total)
    expected = pairs_true * pairs_pred / total_pairs
    maximum = (pairs_true + pairs_pred) / 2
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))


def normalized_mutual_information(labels_true, labels_pred) -> float:
    """Mutual information normalized by the arithmetic mean of the two entropies.

    Natural logarithms throughout (the normalization cancels the base).
    Conventions for degenerate inputs: both partitions constant -> 1.0, exactly
    one constant -> 0.0.
    """
    table = ContingencyTable.from_labels(labels_true, labels_pred)
    n = float(table.total)

    def entropy(sums: np.ndarray) -> float:
        s = sums[sums > 0].astype(float)
        return float(np.sum((s / n) * np.log(n / s)))

    h_true = entropy(table.row_sums)
    h_pred = entropy(table.col_sums)
    if h_true == 0.0 and h_pred == 0.0:
        return 1.0
    flat = table.counts.ravel()
    nz = flat > 0
    nij = flat[nz].astype(float)
    outer = np.multiply.outer(table.row_sums, table.col_sums).ravel()[nz].astype(float)
    mutual = float(np.sum((nij / n) * np.log(nij * n / outer)))
    value = mutual / ((h_true + h_pred) / 2.0)
    # float guard only; exact-arithmetic counts keep identical partitions at 1.0
    return float(min(max(value, 0.0), 1.0))
