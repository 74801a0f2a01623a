"""Plan-structured neural networks for query latency prediction."""

import json

from ._qppnet import (  # noqa: F401
    CostBaseline,
    DimensionError,
    EncodingError,
    Encoder,
    Error,
    FitError,
    InferenceError,
    MetricError,
    Model,
    ParseError,
    PlanTree,
    SchemaError,
    TrainingError,
    UsageError,
    __version__,
    holdout_split,
    load_corpus,
    mean_absolute_error,
    parse_explain,
    r_factor,
    relative_error,
    save_corpus,
    synth,
    train,
)
from ._qppnet import _evaluate_json


def evaluate(plans, predicted):
    """Query-level metrics of `predicted` root latencies against `plans`."""
    return json.loads(_evaluate_json(plans, list(predicted)))


def select(plans, indices):
    return [plans[i] for i in indices]
