"""Training protocol: repeated random 70/30 splits, curves, and metrics.

Each epoch runs seeded minibatch Adam and is then audited against the
full-training-set loss: if an epoch made it worse, the epoch is rolled
back (model and optimizer state) and the learning rate halved before
retrying. That keeps the recorded loss curve non-increasing by
construction without giving up minibatch convergence speed.

Metrics are written in the same JSON schema the linear baseline emits, so
sweep tooling can consume either classifier's output.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn

from peh_cnn.data import CLASS_NAMES, ImageDataset
from peh_cnn.model import N_CLASSES, ScalogramCnn, synthetic_ridge_images


@dataclass(frozen=True)
class TrainProtocol:
    n_runs: int = 5
    train_fraction: float = 0.7
    epochs: int = 50
    batch_size: int = 16
    learning_rate: float = 2e-3
    seed: int = 0
    freeze_lower_layers: bool = False
    pretrain_epochs: int = 40
    pretrain_images: int = 240
    max_epoch_retries: int = 6


@dataclass
class RunResult:
    train_losses: list[float]  # full-set loss after each accepted epoch
    train_accuracies: list[float]
    val_accuracy: float
    confusion: np.ndarray


@dataclass
class TrainOutcome:
    runs: list[RunResult]
    protocol: TrainProtocol

    @property
    def run_accuracies(self) -> list[float]:
        return [r.val_accuracy for r in self.runs]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.run_accuracies))

    def monotone_runs(self) -> int:
        """How many runs kept a non-increasing training-loss curve."""
        count = 0
        for run in self.runs:
            pairs = zip(run.train_losses, run.train_losses[1:])
            count += all(b <= a + 1e-12 for a, b in pairs)
        return count

    def metrics_dict(self) -> dict:
        accs = self.run_accuracies
        return {
            "run_accuracies": accs,
            "mean_accuracy": float(np.mean(accs)),
            "std_accuracy": float(np.std(accs)),
            "confusion": self.runs[-1].confusion.tolist(),
            "classes": list(CLASS_NAMES),
        }

    def save(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "metrics.json").write_text(json.dumps(self.metrics_dict(), indent=2) + "\n")
        for i, run in enumerate(self.runs):
            with (out_dir / f"curves_run{i}.csv").open("w") as fh:
                fh.write("epoch,train_loss,train_accuracy\n")
                for epoch, (loss, acc) in enumerate(
                    zip(run.train_losses, run.train_accuracies)
                ):
                    fh.write(f"{epoch},{loss:.8e},{acc:.6f}\n")


def _split_indices(labels: np.ndarray, fraction: float, rng: np.random.Generator):
    for _ in range(1000):
        order = rng.permutation(len(labels))
        cut = int(round(fraction * len(labels)))
        train, val = order[:cut], order[cut:]
        if (
            len(np.unique(labels[train])) == N_CLASSES
            and len(np.unique(labels[val])) == N_CLASSES
        ):
            return train, val
    raise ValueError("could not draw a split with every class on both sides")


def _pretrain_features(model: ScalogramCnn, size: tuple[int, int], protocol: TrainProtocol):
    images, labels = synthetic_ridge_images(protocol.pretrain_images, size, protocol.seed)
    x = torch.from_numpy(images)
    y = torch.from_numpy(labels)
    optimizer = torch.optim.Adam(model.parameters(), lr=protocol.learning_rate)
    loss_fn = nn.CrossEntropyLoss()
    model.train()
    for _ in range(protocol.pretrain_epochs):
        perm = torch.randperm(len(x))
        for i in range(0, len(x), protocol.batch_size):
            idx = perm[i : i + protocol.batch_size]
            optimizer.zero_grad()
            loss = loss_fn(model(x[idx]), y[idx])
            loss.backward()
            optimizer.step()


def _full_set_stats(model, x, y, loss_fn) -> tuple[float, float]:
    model.eval()
    with torch.no_grad():
        logits = model(x)
        loss = float(loss_fn(logits, y))
        accuracy = float((logits.argmax(dim=1) == y).float().mean())
    model.train()
    return loss, accuracy


def _train_one_run(dataset: ImageDataset, protocol: TrainProtocol, run_index: int) -> RunResult:
    torch.manual_seed(int(np.random.default_rng([protocol.seed, run_index]).integers(2**31)))
    rng = np.random.default_rng([protocol.seed, run_index])
    train_idx, val_idx = _split_indices(dataset.labels, protocol.train_fraction, rng)

    model = ScalogramCnn()
    if protocol.freeze_lower_layers:
        _pretrain_features(model, dataset.image_size, protocol)
        model.freeze_features()
        # Fresh head so only generic features survive pretraining.
        for layer in model.classifier:
            if isinstance(layer, nn.Linear):
                layer.reset_parameters()

    x_train = torch.from_numpy(dataset.images[train_idx])
    y_train = torch.from_numpy(dataset.labels[train_idx])
    x_val = torch.from_numpy(dataset.images[val_idx])
    y_val = torch.from_numpy(dataset.labels[val_idx])

    trainable = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.Adam(trainable, lr=protocol.learning_rate)
    loss_fn = nn.CrossEntropyLoss()
    lr = protocol.learning_rate

    loss, accuracy = _full_set_stats(model, x_train, y_train, loss_fn)
    losses, accuracies = [loss], [accuracy]
    for _ in range(protocol.epochs):
        snap_model = copy.deepcopy(model.state_dict())
        snap_opt = copy.deepcopy(optimizer.state_dict())
        accepted = False
        for _attempt in range(protocol.max_epoch_retries):
            perm = torch.randperm(len(x_train))
            for i in range(0, len(x_train), protocol.batch_size):
                idx = perm[i : i + protocol.batch_size]
                optimizer.zero_grad()
                batch_loss = loss_fn(model(x_train[idx]), y_train[idx])
                batch_loss.backward()
                optimizer.step()
            loss, accuracy = _full_set_stats(model, x_train, y_train, loss_fn)
            if loss <= losses[-1] + 1e-12:
                accepted = True
                break
            model.load_state_dict(snap_model)
            optimizer.load_state_dict(snap_opt)
            lr *= 0.5
            for group in optimizer.param_groups:
                group["lr"] = lr
        if not accepted:  # converged: record the plateau, keep going
            loss, accuracy = losses[-1], accuracies[-1]
        losses.append(loss)
        accuracies.append(accuracy)

    model.eval()
    with torch.no_grad():
        predicted = model(x_val).argmax(dim=1)
    val_accuracy = float((predicted == y_val).float().mean())
    confusion = np.zeros((N_CLASSES, N_CLASSES), dtype=int)
    for t, p in zip(y_val.numpy(), predicted.numpy()):
        confusion[t, p] += 1
    return RunResult(losses, accuracies, val_accuracy, confusion)


def train_cnn(dataset: ImageDataset, protocol: TrainProtocol | None = None) -> TrainOutcome:
    protocol = protocol or TrainProtocol()
    runs = [_train_one_run(dataset, protocol, i) for i in range(protocol.n_runs)]
    return TrainOutcome(runs=runs, protocol=protocol)
