"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field

Label = int | str


class HealthResponse(BaseModel):
    status: str
    version: str


class MetricsRequest(BaseModel):
    labels_true: list[Label] = Field(min_length=2)
    labels_pred: list[Label] = Field(min_length=2)


class MetricsResponse(BaseModel):
    ari: float
    nmi: float


class ConfigPayload(BaseModel):
    """Mirrors ExperimentConfig; omitted fields keep the harness defaults."""

    transduction_epsilon: float | None = None
    induction_epsilon: float | None = None
    certainty_threshold: float = 0.8
    max_rounds: int = 1
    solver_tolerance: float = 1e-9
    solver_max_iterations: int = 10_000
    standardize: bool = False
    master_seed: int = 0


class DatasetPayload(BaseModel):
    name: str
    features: list[list[float]] = Field(min_length=2)
    labels: list[Label] = Field(min_length=2)


class ExperimentRequest(BaseModel):
    dataset: DatasetPayload
    zetas: list[float] = Field(min_length=1)
    repetitions: int = 10
    config: ConfigPayload = ConfigPayload()


class ExperimentResponse(BaseModel):
    format_version: str
    artifact_version: str
    reports: list[dict[str, Any]]


class PropagationSettings(BaseModel):
    epsilon: float | None = None
    certainty_threshold: float = 0.8
    max_rounds: int = 1
    solver_tolerance: float = 1e-9
    solver_max_iterations: int = 10_000


class FitRequest(BaseModel):
    """Training rows; a null (or empty) label marks a row as unlabeled."""

    features: list[list[float]] = Field(min_length=2)
    labels: list[Label | None] = Field(min_length=2)
    config: PropagationSettings = PropagationSettings()


class AssignedLabels(BaseModel):
    rounds: int
    unlabeled_indices: list[int]
    labels: list[str]
    certainty: list[float]


class FitResponse(BaseModel):
    model_id: str
    num_points: int
    num_labeled: int
    classes: list[str]
    propagation: AssignedLabels


class ModelSummary(BaseModel):
    model_id: str
    num_points: int
    num_labeled: int
    classes: list[str]


class PredictRequest(BaseModel):
    features: list[list[float]] = Field(min_length=1)
    epsilon: float | None = None


class PredictResponse(BaseModel):
    labels: list[str]
