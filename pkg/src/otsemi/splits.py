"""Randomized labeled/unlabeled/out-of-sample splits.

A split takes round-half-up(zeta * n) labeled points; of the remainder,
round-half-up 40% become the unlabeled pool and the rest the out-of-sample
set.  All three draws are stratified per class with largest-remainder
allocation, so each part mirrors the dataset's class proportions as closely
as the integer counts allow and every class keeps at least one labeled
representative.  Splits are a pure function of (dataset, zeta, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .errors import InfeasibleSplitError, InvalidInputError

UNLABELED_SHARE = 0.4


def round_half_up(x: float) -> int:
    """round(7.5) -> 8; python's banker's rounding would give 8 only for halves going up."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class Split:
    """Disjoint index sets covering a dataset, plus the draw parameters."""

    labeled_indices: np.ndarray
    unlabeled_indices: np.ndarray
    new_indices: np.ndarray
    zeta: float
    seed: int

    def __post_init__(self) -> None:
        parts = (self.labeled_indices, self.unlabeled_indices, self.new_indices)
        combined = np.concatenate(parts)
        if len(np.unique(combined)) != combined.size:
            raise InvalidInputError("split parts must be disjoint")


def _largest_remainder(total: int, quotas: np.ndarray) -> np.ndarray:
    """Integer allocation summing to ``total``, proportional to ``quotas``."""
    base = np.floor(quotas).astype(int)
    remainder = quotas - base
    while base.sum() < total:
        k = int(np.argmax(remainder))
        base[k] += 1
        remainder[k] = -np.inf
    while base.sum() > total:
        k = int(np.argmin(remainder))
        base[k] -= 1
        remainder[k] = np.inf
    return base


def split_sizes(n: int, zeta: float) -> tuple[int, int, int]:
    """(labeled, unlabeled, new) sizes for a dataset of n points at rate zeta."""
    n_labeled = round_half_up(zeta * n)
    rest = n - n_labeled
    n_unlabeled = round_half_up(UNLABELED_SHARE * rest)
    return n_labeled, n_unlabeled, rest - n_unlabeled


def make_split(dataset: Dataset, zeta: float, seed: int) -> Split:
    """Draw a stratified split, deterministic given (dataset, zeta, seed).

    Raises:
        InvalidInputError: zeta outside (0, 1).
        InfeasibleSplitError: too few labeled slots to cover every class, or an
            empty unlabeled/out-of-sample part.
    """
    if not 0.0 < zeta < 1.0:
        raise InvalidInputError("zeta must lie strictly between 0 and 1")
    n = len(dataset)
    k = dataset.num_classes
    n_labeled, n_unlabeled, n_new = split_sizes(n, zeta)
    if n_labeled < k:
        raise InfeasibleSplitError(
            f"zeta={zeta} gives {n_labeled} labeled slots for {k} classes"
        )
    if n_unlabeled < 1 or n_new < 1:
        raise InfeasibleSplitError(
            f"zeta={zeta} leaves an empty part: unlabeled={n_unlabeled}, new={n_new}"
        )

    counts = np.bincount(dataset.labels, minlength=k)
    labeled_per_class = _largest_remainder(n_labeled, zeta * counts.astype(float))
    # every class needs a labeled representative; take slots from the largest shares
    while np.any(labeled_per_class == 0):
        short = int(np.argmin(labeled_per_class))
        donor = int(np.argmax(labeled_per_class - zeta * counts))
        if labeled_per_class[donor] <= 1:
            raise InfeasibleSplitError(f"cannot cover all {k} classes with {n_labeled} labeled slots")
        labeled_per_class[donor] -= 1
        labeled_per_class[short] += 1
    if np.any(labeled_per_class > counts):
        raise InfeasibleSplitError("a class has fewer points than its labeled allocation")

    rest_per_class = counts - labeled_per_class
    unlabeled_per_class = _largest_remainder(n_unlabeled, UNLABELED_SHARE * rest_per_class.astype(float))
    if np.any(unlabeled_per_class > rest_per_class):
        # shift the excess to classes that still have spare points
        excess_classes = np.where(unlabeled_per_class > rest_per_class)[0]
        for c in excess_classes:
            spill = unlabeled_per_class[c] - rest_per_class[c]
            unlabeled_per_class[c] = rest_per_class[c]
            room = rest_per_class - unlabeled_per_class
            for d in np.argsort(-room):
                take = min(spill, room[d])
                unlabeled_per_class[d] += take
                spill -= take
                if spill == 0:
                    break

    rng = np.random.default_rng(seed)
    labeled, unlabeled, new = [], [], []
    for c in range(k):
        members = rng.permutation(np.where(dataset.labels == c)[0])
        lc, uc = int(labeled_per_class[c]), int(unlabeled_per_class[c])
        labeled.append(members[:lc])
        unlabeled.append(members[lc : lc + uc])
        new.append(members[lc + uc :])
    return Split(
        labeled_indices=np.concatenate(labeled),
        unlabeled_indices=np.concatenate(unlabeled),
        new_indices=np.concatenate(new),
        zeta=zeta,
        seed=seed,
    )
