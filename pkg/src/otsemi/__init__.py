"""Semi-supervised classification through entropic optimal transport.

The package has three layers: transport primitives (cost matrices, a
Sinkhorn solver, a small exact oracle), the learning stages (transductive
label propagation and closed-form out-of-sample induction), and a benchmark
harness (datasets, stratified splits, repeated experiments, ARI/NMI scoring,
result documents).  A FastAPI service wraps the core for long-running use;
the CLI is a thin client of that service.
"""

__version__ = "0.1.0"

from .datasets import Dataset, load_csv
from .errors import (
    InfeasibleSplitError,
    IngestionError,
    InvalidInputError,
    NumericalFailureError,
    OtsemiError,
    ReportError,
    UnsupportedSizeError,
)
from .experiments import ExperimentConfig, ExperimentReport, run_experiment
from .induction import (
    BinaryEncoding,
    induction_weights,
    inductive_objective,
    predict_batch,
    predict_binary,
    predict_multiclass,
    predict_regression_value,
)
from .metrics import adjusted_rand_index, normalized_mutual_information
from .propagation import (
    LabeledPool,
    PropagationConfig,
    PropagationResult,
    bipartite_affinities,
    propagate,
    transductive_objective,
)
from .reporting import emit_report, load_report_document
from .splits import Split, make_split
from .transport import (
    DiscreteMeasure,
    TransportPlan,
    build_cost_matrix,
    default_epsilon,
    exact_assignment_oracle,
    plan_entropy,
    sinkhorn,
    transport_cost,
)

__all__ = [
    "__version__",
    "BinaryEncoding",
    "Dataset",
    "DiscreteMeasure",
    "ExperimentConfig",
    "ExperimentReport",
    "InfeasibleSplitError",
    "IngestionError",
    "InvalidInputError",
    "LabeledPool",
    "NumericalFailureError",
    "OtsemiError",
    "PropagationConfig",
    "PropagationResult",
    "ReportError",
    "Split",
    "TransportPlan",
    "UnsupportedSizeError",
    "adjusted_rand_index",
    "bipartite_affinities",
    "build_cost_matrix",
    "default_epsilon",
    "emit_report",
    "exact_assignment_oracle",
    "induction_weights",
    "inductive_objective",
    "load_csv",
    "load_report_document",
    "make_split",
    "normalized_mutual_information",
    "plan_entropy",
    "predict_batch",
    "predict_binary",
    "predict_multiclass",
    "predict_regression_value",
    "propagate",
    "run_experiment",
    "sinkhorn",
    "transductive_objective",
    "transport_cost",
]
