"""CSV ingestion and dataset validation.

The on-disk format is a UTF-8 CSV with a header row, one designated label
column, and numeric values everywhere else.  Ingestion errors name the row
(1-based, excluding the header) and column that failed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IngestionError, InvalidInputError


@dataclass(frozen=True)
class Dataset:
    """A validated feature matrix with integer class labels.

    ``class_names`` maps label index -> original label text, in first
    appearance order.
    """

    name: str
    features: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]

    def __post_init__(self) -> None:
        features = np.atleast_2d(np.asarray(self.features, dtype=float))
        labels = np.asarray(self.labels, dtype=int)
        k = len(self.class_names)
        if labels.shape != (features.shape[0],):
            raise InvalidInputError("labels length must match the number of rows")
        if k < 2:
            raise InvalidInputError("a dataset needs at least two classes")
        if features.shape[0] < k:
            raise InvalidInputError("fewer rows than classes")
        if not np.all(np.isfinite(features)):
            raise InvalidInputError("features must be finite")
        if labels.min(initial=0) < 0 or labels.max(initial=0) >= k:
            raise InvalidInputError(f"labels must lie in 0..{k - 1}")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    def __len__(self) -> int:
        return self.features.shape[0]


def standardize_features(features: np.ndarray) -> np.ndarray:
    """Per-feature z-scoring; constant features are left centered at zero."""
    X = np.asarray(features, dtype=float)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0] = 1.0
    return (X - mean) / std


def _read_rows(path: str | Path) -> tuple[list[str], list[list[str]]]:
    p = Path(path)
    if not p.exists():
        raise IngestionError(f"no such file: {p}")
    with open(p, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{p}: file is empty, expected a header row") from None
        rows = [row for row in reader if row]
    if not rows:
        raise IngestionError(f"{p}: no data rows after the header")
    return [h.strip() for h in header], rows


def _parse_cell(text: str, row_index: int, column: str, path: Path) -> float:
    try:
        value = float(text)
    except ValueError:
        raise IngestionError(
            f"{path}: row {row_index}, column {column!r}: {text!r} is not numeric"
        ) from None
    if not np.isfinite(value):
        raise IngestionError(f"{path}: row {row_index}, column {column!r}: non-finite value")
    return value


def _parse_table(
    path: str | Path, label_column: str, allow_missing_labels: bool
) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    p = Path(path)
    header, rows = _read_rows(p)
    if label_column not in header:
        raise IngestionError(f"{p}: label column {label_column!r} not in header {header}")
    label_pos = header.index(label_column)
    feature_names = [h for i, h in enumerate(header) if i != label_pos]
    if not feature_names:
        raise IngestionError(f"{p}: no feature columns besides the label column")

    features = np.empty((len(rows), len(feature_names)))
    class_names: list[str] = []
    class_index: dict[str, int] = {}
    labels = np.empty(len(rows), dtype=int)
    for r, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise IngestionError(
                f"{p}: row {r} has {len(row)} fields, header has {len(header)}"
            )
        c = 0
        for i, cell in enumerate(row):
            if i == label_pos:
                continue
            features[r - 1, c] = _parse_cell(cell.strip(), r, header[i], p)
            c += 1
        raw_label = row[label_pos].strip()
        if not raw_label:
            if not allow_missing_labels:
                raise IngestionError(f"{p}: row {r}: empty label cell")
            labels[r - 1] = -1
            continue
        if raw_label not in class_index:
            class_index[raw_label] = len(class_names)
            class_names.append(raw_label)
        labels[r - 1] = class_index[raw_label]
    return features, labels, tuple(class_names)


def load_csv(path: str | Path, label_column: str, name: str | None = None) -> Dataset:
    """Load a fully labeled dataset; class names map to indices in first-appearance order.

    Raises:
        IngestionError: missing file, malformed row, non-numeric feature cell,
            unknown label column, or empty label cell (with row/column named).
    """
    features, labels, class_names = _parse_table(path, label_column, allow_missing_labels=False)
    dataset_name = name if name is not None else Path(path).stem
    try:
        return Dataset(dataset_name, features, labels, class_names)
    except InvalidInputError as exc:
        raise IngestionError(f"{path}: {exc}") from exc


def load_partially_labeled_csv(
    path: str | Path, label_column: str
) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Load a training file in which empty label cells mark unlabeled rows.

    Returns (features, labels, class_names) with -1 for unlabeled rows.
    """
    return _parse_table(path, label_column, allow_missing_labels=True)


def load_features_csv(path: str | Path) -> np.ndarray:
    """Load a CSV of numeric feature rows (header required, no label column)."""
    p = Path(path)
    header, rows = _read_rows(p)
    features = np.empty((len(rows), len(header)))
    for r, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise IngestionError(f"{p}: row {r} has {len(row)} fields, header has {len(header)}")
        for i, cell in enumerate(row):
            features[r - 1, i] = _parse_cell(cell.strip(), r, header[i], p)
    return features


def load_label_column(path: str | Path) -> list[str]:
    """Load a single-column label file (header required); values stay as text."""
    p = Path(path)
    header, rows = _read_rows(p)
    if len(header) != 1:
        raise IngestionError(f"{p}: expected exactly one column, found {len(header)}")
    out = []
    for r, row in enumerate(rows, start=1):
        if len(row) != 1:
            raise IngestionError(f"{p}: row {r} has {len(row)} fields, expected 1")
        value = row[0].strip()
        if not value:
            raise IngestionError(f"{p}: row {r}: empty label")
        out.append(value)
    return out
