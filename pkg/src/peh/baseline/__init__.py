"""Dependency-light scalogram classifier used by the sweep."""

from peh.baseline.features import FEATURE_LENGTH, extract_features
from peh.baseline.classifier import (
    BaselineModel,
    EvalProtocol,
    Metrics,
    TrainOpts,
    evaluate,
    load_model,
    loss_and_grad,
    majority_accuracy,
    save_model,
    train_baseline,
)

__all__ = [
    "BaselineModel",
    "EvalProtocol",
    "FEATURE_LENGTH",
    "Metrics",
    "TrainOpts",
    "evaluate",
    "extract_features",
    "load_model",
    "loss_and_grad",
    "majority_accuracy",
    "save_model",
    "train_baseline",
]
