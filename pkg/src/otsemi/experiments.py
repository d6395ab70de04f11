"""Benchmark protocol: repeated randomized splits, two evaluation routes, aggregation.

For each sampling rate zeta and each repetition the harness draws a split,
then scores two predictors on the out-of-sample points:

* ``inductive`` - propagate labels from the labeled pool to the unlabeled
  pool, then label the out-of-sample batch with the closed-form transport
  vote over the combined training set.
* ``transductive`` - reference route: propagation runs with the out-of-sample
  points merged into the unlabeled pool, and only their predictions are
  scored.  This mirrors how purely transductive methods are evaluated on
  out-of-sample data.

True labels of the out-of-sample part are used only for scoring.  Per-run
seeds derive from the master seed as ``master_seed + run_index``, making the
whole experiment a pure function of (dataset, zeta values, configuration).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .datasets import Dataset, standardize_features
from .errors import InvalidInputError
from .induction import predict_batch
from .metrics import adjusted_rand_index, normalized_mutual_information
from .propagation import LabeledPool, PropagationConfig, propagate
from .splits import Split, make_split
from .transport import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE

METHODS = ("inductive", "transductive")
METRICS = ("ari", "nmi")


@dataclass(frozen=True)
class ExperimentConfig:
    """Harness configuration; ``None`` epsilons select the scale-adaptive default."""

    transduction_epsilon: float | None = None
    induction_epsilon: float | None = None
    certainty_threshold: float = 0.8
    max_rounds: int = 1
    solver_tolerance: float = DEFAULT_TOLERANCE
    solver_max_iterations: int = DEFAULT_MAX_ITERATIONS
    standardize: bool = False
    master_seed: int = 0

    def propagation_config(self) -> PropagationConfig:
        return PropagationConfig(
            epsilon=self.transduction_epsilon,
            certainty_threshold=self.certainty_threshold,
            max_rounds=self.max_rounds,
            solver_tolerance=self.solver_tolerance,
            solver_max_iterations=self.solver_max_iterations,
        )

    def echo(self) -> dict[str, Any]:
        return {
            "transduction_epsilon": self.transduction_epsilon,
            "induction_epsilon": self.induction_epsilon,
            "certainty_threshold": self.certainty_threshold,
            "max_rounds": self.max_rounds,
            "solver_tolerance": self.solver_tolerance,
            "solver_max_iterations": self.solver_max_iterations,
            "standardize": self.standardize,
            "master_seed": self.master_seed,
        }


@dataclass
class RunRecord:
    """Scores (or the error) of one repetition."""

    run_index: int
    seed: int
    scores: dict[str, dict[str, float]] = field(default_factory=dict)
    error: str | None = None

    @property
    def succeeded(self) -> bool:
        return self.error is None


@dataclass
class ExperimentReport:
    """All repetitions for one (dataset, zeta) cell plus their aggregates."""

    dataset_name: str
    zeta: float
    repetitions: int
    runs: list[RunRecord]
    aggregates: dict[str, dict[str, dict[str, float]]]
    config: dict[str, Any]

    @property
    def complete(self) -> bool:
        return sum(1 for r in self.runs if r.succeeded) == self.repetitions

    def mean(self, method: str, metric: str) -> float:
        return self.aggregates[method][metric]["mean"]

    def to_dict(self) -> dict[str, Any]:
        return {
            "dataset": self.dataset_name,
            "zeta": self.zeta,
            "repetitions": self.repetitions,
            "complete": self.complete,
            "config": dict(self.config),
            "runs": [
                {
                    "run_index": r.run_index,
                    "seed": r.seed,
                    "scores": r.scores,
                    "error": r.error,
                }
                for r in self.runs
            ],
            "aggregates": self.aggregates,
        }


def report_from_dict(payload: dict[str, Any]) -> ExperimentReport:
    runs = [
        RunRecord(
            run_index=r["run_index"],
            seed=r["seed"],
            scores={m: dict(v) for m, v in r["scores"].items()},
            error=r.get("error"),
        )
        for r in payload["runs"]
    ]
    return ExperimentReport(
        dataset_name=payload["dataset"],
        zeta=payload["zeta"],
        repetitions=payload["repetitions"],
        runs=runs,
        aggregates=payload["aggregates"],
        config=payload["config"],
    )


def _score(y_true: np.ndarray, y_pred: np.ndarray) -> dict[str, float]:
    return {
        "ari": adjusted_rand_index(y_true, y_pred),
        "nmi": normalized_mutual_information(y_true, y_pred),
    }


def evaluate_split(dataset_features: np.ndarray, labels: np.ndarray, num_classes: int,
                   split: Split, config: ExperimentConfig) -> dict[str, dict[str, float]]:
    """Run both evaluation routes on one split; returns scores per method."""
    X = dataset_features
    y = labels
    X_l, y_l = X[split.labeled_indices], y[split.labeled_indices]
    X_u = X[split.unlabeled_indices]
    X_new, y_new = X[split.new_indices], y[split.new_indices]
    pool = LabeledPool(X_l, y_l, num_classes)
    prop_cfg = config.propagation_config()

    result = propagate(pool, X_u, prop_cfg)
    X_train = np.vstack([X_l, X_u])
    y_train = np.concatenate([y_l, result.predicted_labels])
    inductive_pred = predict_batch(
        X_train,
        y_train,
        X_new,
        epsilon=config.induction_epsilon,
        num_classes=num_classes,
        tolerance=config.solver_tolerance,
        max_iterations=config.solver_max_iterations,
    )

    merged = np.vstack([X_u, X_new])
    merged_result = propagate(pool, merged, prop_cfg)
    transductive_pred = merged_result.predicted_labels[X_u.shape[0]:]

    return {
        "inductive": _score(y_new, inductive_pred),
        "transductive": _score(y_new, transductive_pred),
    }


def run_experiment(
    dataset: Dataset,
    zeta_values: list[float],
    repetitions: int = 10,
    config: ExperimentConfig | None = None,
) -> list[ExperimentReport]:
    """One report per zeta value; failed runs are recorded, not raised."""
    cfg = config or ExperimentConfig()
    if repetitions < 1:
        raise InvalidInputError("repetitions must be at least 1")
    if not zeta_values:
        raise InvalidInputError("zeta_values must be non-empty")
    features = standardize_features(dataset.features) if cfg.standardize else dataset.features

    reports = []
    for zeta in zeta_values:
        runs: list[RunRecord] = []
        for run_index in range(repetitions):
            seed = cfg.master_seed + run_index
            record = RunRecord(run_index=run_index, seed=seed)
            try:
                split = make_split(dataset, zeta, seed)
                record.scores = evaluate_split(
                    features, dataset.labels, dataset.num_classes, split, cfg
                )
            except Exception as exc:  # record and continue with the other runs
                record.error = f"{type(exc).__name__}: {exc}"
            runs.append(record)
        reports.append(
            ExperimentReport(
                dataset_name=dataset.name,
                zeta=zeta,
                repetitions=repetitions,
                runs=runs,
                aggregates=_aggregate(runs),
                config=cfg.echo(),
            )
        )
    return reports


def _aggregate(runs: list[RunRecord]) -> dict[str, dict[str, dict[str, float]]]:
    out: dict[str, dict[str, dict[str, float]]] = {}
    good = [r for r in runs if r.succeeded]
    for method in METHODS:
        out[method] = {}
        for metric in METRICS:
            values = np.array([r.scores[method][metric] for r in good])
            if values.size == 0:
                out[method][metric] = {"mean": float("nan"), "std": float("nan")}
            else:
                std = float(values.std(ddof=1)) if values.size > 1 else 0.0
                out[method][metric] = {"mean": float(values.mean()), "std": std}
    return out
