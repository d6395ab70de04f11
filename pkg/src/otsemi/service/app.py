"""FastAPI application wrapping the core package.

The service holds fitted models in memory so that out-of-sample points can be
labeled on the fly without re-running propagation: ``POST /models`` runs the
training (propagation) phase once, ``POST /models/{id}/predict`` answers any
number of later batches against the frozen training set.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..datasets import Dataset
from ..errors import (
    InfeasibleSplitError,
    IngestionError,
    InvalidInputError,
    NumericalFailureError,
    OtsemiError,
    UnsupportedSizeError,
)
from ..experiments import ExperimentConfig, run_experiment
from ..induction import predict_batch
from ..metrics import adjusted_rand_index, normalized_mutual_information
from ..propagation import LabeledPool, PropagationConfig, propagate
from ..reporting import report_document
from .schemas import (
    AssignedLabels,
    ExperimentRequest,
    ExperimentResponse,
    FitRequest,
    FitResponse,
    HealthResponse,
    MetricsRequest,
    MetricsResponse,
    ModelSummary,
    PredictRequest,
    PredictResponse,
)

_BAD_REQUEST = (InvalidInputError, IngestionError, InfeasibleSplitError, UnsupportedSizeError)


@dataclass
class FittedModel:
    """A frozen training set plus the settings it was fitted with."""

    model_id: str
    features: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    num_labeled: int
    epsilon: float | None
    solver_tolerance: float
    solver_max_iterations: int

    def summary(self) -> ModelSummary:
        return ModelSummary(
            model_id=self.model_id,
            num_points=int(self.features.shape[0]),
            num_labeled=self.num_labeled,
            classes=list(self.class_names),
        )


class ModelStore:
    """Thread-safe in-memory registry with deterministic ids."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._models: dict[str, FittedModel] = {}
        self._counter = 0

    def add(self, build) -> FittedModel:
        with self._lock:
            self._counter += 1
            model_id = f"model-{self._counter:06d}"
            model = build(model_id)
            self._models[model_id] = model
            return model

    def get(self, model_id: str) -> FittedModel | None:
        with self._lock:
            return self._models.get(model_id)

    def remove(self, model_id: str) -> bool:
        with self._lock:
            return self._models.pop(model_id, None) is not None

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._models)


def _index_labels(raw: list) -> tuple[np.ndarray, tuple[str, ...]]:
    """Map raw labels to indices in first-appearance order; None/empty -> -1."""
    names: list[str] = []
    index: dict[str, int] = {}
    out = np.empty(len(raw), dtype=int)
    for i, value in enumerate(raw):
        if value is None or (isinstance(value, str) and not value.strip()):
            out[i] = -1
            continue
        key = str(value)
        if key not in index:
            index[key] = len(names)
            names.append(key)
        out[i] = index[key]
    return out, tuple(names)


def create_app() -> FastAPI:
    app = FastAPI(title="otsemi service", version=__version__)
    store = ModelStore()
    app.state.models = store

    @app.exception_handler(OtsemiError)
    async def _domain_error(request: Request, exc: OtsemiError) -> JSONResponse:
        status = 400 if isinstance(exc, _BAD_REQUEST) else 500
        if isinstance(exc, NumericalFailureError):
            status = 500
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/metrics/score", response_model=MetricsResponse)
    def score(request: MetricsRequest) -> MetricsResponse:
        y_true = [str(v) for v in request.labels_true]
        y_pred = [str(v) for v in request.labels_pred]
        return MetricsResponse(
            ari=adjusted_rand_index(y_true, y_pred),
            nmi=normalized_mutual_information(y_true, y_pred),
        )

    @app.post("/experiments/run", response_model=ExperimentResponse)
    def run(request: ExperimentRequest) -> ExperimentResponse:
        labels, class_names = _index_labels(list(request.dataset.labels))
        if np.any(labels < 0):
            raise InvalidInputError("experiment datasets must be fully labeled")
        dataset = Dataset(
            name=request.dataset.name,
            features=np.asarray(request.dataset.features, dtype=float),
            labels=labels,
            class_names=class_names,
        )
        config = ExperimentConfig(**request.config.model_dump())
        reports = run_experiment(dataset, request.zetas, request.repetitions, config)
        document = report_document(reports)
        return ExperimentResponse(**document)

    @app.post("/models", response_model=FitResponse)
    def fit(request: FitRequest) -> FitResponse:
        features = np.asarray(request.features, dtype=float)
        if features.ndim != 2:
            raise InvalidInputError("features must be a rectangular matrix")
        if len(request.labels) != features.shape[0]:
            raise InvalidInputError("labels length must match the number of feature rows")
        labels, class_names = _index_labels(list(request.labels))
        if len(class_names) < 2:
            raise InvalidInputError("training data must contain at least two labeled classes")
        labeled_mask = labels >= 0
        num_labeled = int(labeled_mask.sum())
        settings = request.config
        prop_cfg = PropagationConfig(
            epsilon=settings.epsilon,
            certainty_threshold=settings.certainty_threshold,
            max_rounds=settings.max_rounds,
            solver_tolerance=settings.solver_tolerance,
            solver_max_iterations=settings.solver_max_iterations,
        )
        unlabeled_indices = np.where(~labeled_mask)[0]
        full_labels = labels.copy()
        if unlabeled_indices.size:
            pool = LabeledPool(features[labeled_mask], labels[labeled_mask], len(class_names))
            result = propagate(pool, features[unlabeled_indices], prop_cfg)
            full_labels[unlabeled_indices] = result.predicted_labels
            propagation = AssignedLabels(
                rounds=result.rounds,
                unlabeled_indices=[int(i) for i in unlabeled_indices],
                labels=[class_names[int(k)] for k in result.predicted_labels],
                certainty=[float(c) for c in result.certainty],
            )
        else:
            propagation = AssignedLabels(rounds=0, unlabeled_indices=[], labels=[], certainty=[])

        model = store.add(
            lambda model_id: FittedModel(
                model_id=model_id,
                features=features,
                labels=full_labels,
                class_names=class_names,
                num_labeled=num_labeled,
                epsilon=settings.epsilon,
                solver_tolerance=settings.solver_tolerance,
                solver_max_iterations=settings.solver_max_iterations,
            )
        )
        return FitResponse(
            model_id=model.model_id,
            num_points=int(features.shape[0]),
            num_labeled=num_labeled,
            classes=list(class_names),
            propagation=propagation,
        )

    @app.get("/models", response_model=list[str])
    def list_models() -> list[str]:
        return store.ids()

    @app.get("/models/{model_id}", response_model=ModelSummary)
    def model_summary(model_id: str) -> ModelSummary:
        model = store.get(model_id)
        if model is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown model {model_id!r}"})
        return model.summary()

    @app.post("/models/{model_id}/predict", response_model=PredictResponse)
    def predict(model_id: str, request: PredictRequest) -> PredictResponse:
        model = store.get(model_id)
        if model is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown model {model_id!r}"})
        features = np.asarray(request.features, dtype=float)
        epsilon = request.epsilon if request.epsilon is not None else model.epsilon
        predictions = predict_batch(
            model.features,
            model.labels,
            features,
            epsilon=epsilon,
            num_classes=len(model.class_names),
            tolerance=model.solver_tolerance,
            max_iterations=model.solver_max_iterations,
        )
        return PredictResponse(labels=[model.class_names[int(k)] for k in predictions])

    @app.delete("/models/{model_id}")
    def delete_model(model_id: str) -> JSONResponse:
        if not store.remove(model_id):
            return JSONResponse(status_code=404, content={"detail": f"unknown model {model_id!r}"})
        return JSONResponse(status_code=200, content={"deleted": model_id})

    return app
