"""Multinomial linear classifier trained by batch gradient descent.

Softmax cross-entropy with L2 weight decay; descent steps use Armijo
backtracking from a unit step, run until the gradient norm drops below
tolerance or the iteration cap. Everything is deterministic for a fixed
split seed, so sweep results are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

N_CLASSES = 3


@dataclass(frozen=True)
class TrainOpts:
    l2_penalty: float = 1.0e-3
    grad_tol: float = 1.0e-6
    max_iter: int = 5000


@dataclass(frozen=True)
class BaselineModel:
    weights: np.ndarray  # (n_features + 1, n_classes), last row is bias
    feature_mean: np.ndarray
    feature_scale: np.ndarray

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        x = (np.atleast_2d(features) - self.feature_mean) / self.feature_scale
        return _softmax(np.hstack([x, np.ones((len(x), 1))]) @ self.weights)

    def predict(self, features: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(features), axis=1)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    expd = np.exp(shifted)
    return expd / expd.sum(axis=1, keepdims=True)


def loss_and_grad(
    weights: np.ndarray, x: np.ndarray, labels: np.ndarray, l2_penalty: float
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy + (l2/2)||W||^2 (bias row unpenalized) and gradient.

    x must already carry the bias column; weights has shape
    (n_features + 1, n_classes).
    """
    n = len(x)
    proba = _softmax(x @ weights)
    log_like = -np.log(proba[np.arange(n), labels] + 1e-300).mean()
    penalized = weights.copy()
    penalized[-1, :] = 0.0
    loss = log_like + 0.5 * l2_penalty * np.sum(penalized**2)
    indicator = np.zeros_like(proba)
    indicator[np.arange(n), labels] = 1.0
    grad = x.T @ (proba - indicator) / n + l2_penalty * penalized
    return float(loss), grad


def _standardize(train_x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = train_x.mean(axis=0)
    scale = train_x.std(axis=0)
    scale[scale == 0.0] = 1.0
    return mean, scale


def train_baseline(
    features: np.ndarray, labels: np.ndarray, opts: TrainOpts | None = None
) -> BaselineModel:
    """Fit the classifier on raw (unstandardized) features."""
    opts = opts or TrainOpts()
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=int)
    present = np.unique(labels)
    if len(present) < 2:
        raise ValueError(f"training needs at least 2 classes, got {present.tolist()}")
    mean, scale = _standardize(features)
    x = np.hstack([(features - mean) / scale, np.ones((len(features), 1))])
    weights = np.zeros((x.shape[1], N_CLASSES))

    loss, grad = loss_and_grad(weights, x, labels, opts.l2_penalty)
    step = 1.0
    for _ in range(opts.max_iter):
        gnorm = np.linalg.norm(grad)
        if gnorm < opts.grad_tol:
            break
        # Armijo backtracking, growing the step again on easy accepts.
        step = min(step * 2.0, 64.0)
        while True:
            trial = weights - step * grad
            trial_loss, trial_grad = loss_and_grad(trial, x, labels, opts.l2_penalty)
            if trial_loss <= loss - 1e-4 * step * gnorm**2 or step < 1e-12:
                break
            step *= 0.5
        weights, loss, grad = trial, trial_loss, trial_grad
    return BaselineModel(weights=weights, feature_mean=mean, feature_scale=scale)


@dataclass(frozen=True)
class EvalProtocol:
    n_runs: int = 5
    train_fraction: float = 0.7
    seed: int = 0


@dataclass(frozen=True)
class Metrics:
    """Per-run accuracy plus the confusion matrix of the final run."""

    run_accuracies: tuple[float, ...]
    confusion: np.ndarray  # rows = true class, cols = predicted, final run

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.run_accuracies))

    @property
    def std_accuracy(self) -> float:
        return float(np.std(self.run_accuracies))

    def to_dict(self) -> dict:
        return {
            "run_accuracies": list(self.run_accuracies),
            "mean_accuracy": self.mean_accuracy,
            "std_accuracy": self.std_accuracy,
            "confusion": self.confusion.tolist(),
            "classes": ["C30", "C40", "C50"],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def from_dict(cls, data: dict) -> "Metrics":
        return cls(
            run_accuracies=tuple(float(a) for a in data["run_accuracies"]),
            confusion=np.asarray(data["confusion"], dtype=int),
        )


def _split(n: int, train_fraction: float, labels: np.ndarray, rng) -> tuple[np.ndarray, np.ndarray]:
    """Random split; resampled until every class shows up on both sides."""
    for _ in range(1000):
        order = rng.permutation(n)
        cut = int(round(train_fraction * n))
        train, test = order[:cut], order[cut:]
        if len(np.unique(labels[train])) == N_CLASSES and len(np.unique(labels[test])) == N_CLASSES:
            return train, test
    raise ValueError("could not draw a split containing every class on both sides")


def evaluate(
    features: np.ndarray,
    labels: np.ndarray,
    protocol: EvalProtocol | None = None,
    opts: TrainOpts | None = None,
) -> Metrics:
    """Repeated random-split protocol: train/evaluate once per run."""
    protocol = protocol or EvalProtocol()
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if len(np.unique(labels)) < N_CLASSES:
        raise ValueError("evaluation dataset must contain all three classes")
    accuracies = []
    confusion = np.zeros((N_CLASSES, N_CLASSES), dtype=int)
    for run in range(protocol.n_runs):
        rng = np.random.default_rng([protocol.seed, run])
        train_idx, test_idx = _split(len(labels), protocol.train_fraction, labels, rng)
        model = train_baseline(features[train_idx], labels[train_idx], opts)
        predicted = model.predict(features[test_idx])
        truth = labels[test_idx]
        accuracies.append(float(np.mean(predicted == truth)))
        if run == protocol.n_runs - 1:
            for t, p in zip(truth, predicted):
                confusion[t, p] += 1
    return Metrics(run_accuracies=tuple(accuracies), confusion=confusion)


def majority_accuracy(labels: np.ndarray) -> float:
    """Accuracy of always predicting the most common class."""
    labels = np.asarray(labels, dtype=int)
    counts = np.bincount(labels, minlength=N_CLASSES)
    return float(counts.max() / counts.sum())


def save_model(model: BaselineModel, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(
            {
                "weights": model.weights.tolist(),
                "feature_mean": model.feature_mean.tolist(),
                "feature_scale": model.feature_scale.tolist(),
            }
        )
        + "\n"
    )


def load_model(path: str | Path) -> BaselineModel:
    data = json.loads(Path(path).read_text())
    return BaselineModel(
        weights=np.asarray(data["weights"], dtype=float),
        feature_mean=np.asarray(data["feature_mean"], dtype=float),
        feature_scale=np.asarray(data["feature_scale"], dtype=float),
    )
