"""Softmax-regression training harness and the evaluation metrics.

The classifier is multinomial logistic regression (weights C x D plus
bias), trained by minibatch SGD with momentum, L2 weight decay, and step
learning-rate decay. Weights start at zero, so the untrained model
predicts class 0 everywhere (argmax ties break to the lowest index).
Shuffles come from stream (seed, TAG_SHUFFLE, epoch); reruns are
bit-identical on a given kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .backend import kernels
from .data import (Dataset, SynthWorldSpec, generate_world,
                   sample_around_prototypes)
from .errors import (DataValidationError, EmptySelectionError,
                     TrainingDivergedError)
from .modify import ModifierConfig, modify
from .noise import NoiseSpec, inject
from .select import SelectionResult, select

# salt for deriving the fresh test world's seed in evaluate_pipeline
TEST_WORLD_SALT = 0x7E57DA7A


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer hyperparameters. Defaults follow the usual SGD recipe
    (lr 0.1, momentum 0.9, weight decay 1e-4, batch 128, decay x0.1)."""

    epochs: int
    learning_rate: float = 0.1
    momentum: float = 0.9
    weight_decay: float = 1e-4
    batch_size: int = 128
    lr_decay_epochs: tuple[int, ...] = (100, 150)
    lr_decay_factor: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise DataValidationError("epochs must be >= 0")
        if not self.learning_rate > 0:
            raise DataValidationError("learning_rate must be > 0")
        if not 0.0 <= self.momentum < 1.0:
            raise DataValidationError("momentum must be in [0, 1)")
        if self.weight_decay < 0:
            raise DataValidationError("weight_decay must be >= 0")
        if self.batch_size < 1:
            raise DataValidationError("batch_size must be >= 1")
        for d in self.lr_decay_epochs:
            if not 0 <= d < max(self.epochs, 1):
                raise DataValidationError(
                    f"decay epoch {d} outside [0, {self.epochs})")

    def lr_at(self, epoch: int) -> float:
        drops = sum(1 for d in self.lr_decay_epochs if d <= epoch)
        return self.learning_rate * self.lr_decay_factor ** drops


@dataclass(frozen=True)
class EvalReport:
    """Test accuracy, per-epoch loss curves, and (for refined runs) the
    selection quality numbers."""

    test_accuracy: float
    train_loss_curve: np.ndarray
    test_loss_curve: np.ndarray
    selection_accuracy: float | None = None
    num_selected: int | None = None


@dataclass
class FitResult:
    weights: np.ndarray
    bias: np.ndarray
    train_losses: np.ndarray
    test_losses: np.ndarray
    weight_snapshots: list[np.ndarray] | None = None


def fit_softmax(train: Dataset, config: TrainConfig,
                test: Dataset | None = None,
                record_weights: bool = False) -> FitResult:
    """Train the classifier; optionally record per-epoch weight copies."""
    if len(train) == 0:
        raise DataValidationError("cannot train on an empty dataset")
    if config.batch_size > len(train):
        raise DataValidationError(
            f"batch_size {config.batch_size} exceeds dataset size {len(train)}")
    if test is not None:
        if (test.num_classes, test.dim) != (train.num_classes, train.dim):
            raise DataValidationError("train/test C or D mismatch")
        if not test.has_truth:
            raise DataValidationError("test dataset must carry true labels")
    kern = kernels()
    c, d = train.num_classes, train.dim
    x = np.ascontiguousarray(train.features)
    y = np.ascontiguousarray(train.noisy_labels)
    if test is not None:
        x_test = np.ascontiguousarray(test.features)
        y_test = np.ascontiguousarray(test.true_labels)
    weights = np.zeros((c, d))
    bias = np.zeros(c)
    vel_w = np.zeros((c, d))
    vel_b = np.zeros(c)
    train_losses = np.empty(config.epochs)
    test_losses = np.empty(config.epochs)
    snapshots: list[np.ndarray] | None = [] if record_weights else None
    for epoch in range(config.epochs):
        order = rng.stream(config.seed, rng.TAG_SHUFFLE,
                           epoch).permutation(len(train)).astype(np.int64)
        kern.sgd_epoch(weights, bias, vel_w, vel_b, x, y, order,
                       config.batch_size, config.lr_at(epoch),
                       config.momentum, config.weight_decay)
        loss = kern.mean_ce_loss(weights, bias, x, y)
        if not math.isfinite(loss):
            raise TrainingDivergedError(f"loss became {loss} at epoch {epoch}")
        train_losses[epoch] = loss
        if test is not None:
            test_losses[epoch] = kern.mean_ce_loss(weights, bias, x_test, y_test)
        else:
            test_losses[epoch] = np.nan
        if record_weights:
            snapshots.append(weights.copy())
    return FitResult(weights, bias, train_losses, test_losses, snapshots)


def predict_labels(weights: np.ndarray, bias: np.ndarray,
                   features: np.ndarray) -> np.ndarray:
    """Argmax class per row; ties break to the lowest class index."""
    return np.argmax(features @ weights.T + bias, axis=1).astype(np.int64)


def loss_and_grad(weights: np.ndarray, bias: np.ndarray, x: np.ndarray,
                  y: np.ndarray, weight_decay: float):
    """Regularized mean cross entropy and its analytic gradient.

    This is the objective one SGD step descends on a batch: mean CE plus
    (wd/2)(||W||^2 + ||b||^2). Vectorized numpy, used by the finite
    difference gradient check.
    """
    n = len(y)
    z = x @ weights.T + bias
    zmax = z.max(axis=1, keepdims=True)
    logp = z - zmax - np.log(np.sum(np.exp(z - zmax), axis=1, keepdims=True))
    loss = -float(np.mean(logp[np.arange(n), y]))
    loss += 0.5 * weight_decay * (float(np.sum(weights ** 2))
                                  + float(np.sum(bias ** 2)))
    p = np.exp(logp)
    p[np.arange(n), y] -= 1.0
    grad_w = p.T @ x / n + weight_decay * weights
    grad_b = p.sum(axis=0) / n + weight_decay * bias
    return loss, grad_w, grad_b


def train_classifier(train: Dataset, test: Dataset,
                     config: TrainConfig) -> EvalReport:
    """Fit on the training labels, score accuracy against test truth."""
    fit = fit_softmax(train, config, test=test)
    predicted = predict_labels(fit.weights, fit.bias, test.features)
    accuracy = float(np.mean(predicted == test.true_labels))
    return EvalReport(accuracy, fit.train_losses, fit.test_losses)


def selection_quality(result: SelectionResult,
                      truth: Dataset) -> tuple[float, int]:
    """Part-1 clean fraction and part-1 size, judged against true labels."""
    if not truth.has_truth:
        raise DataValidationError("truth dataset must carry true labels")
    k = result.num_part1
    if k == 0:
        raise EmptySelectionError(
            "no originals retained; selection accuracy is undefined")
    true_by_id = dict(zip(truth.ids.tolist(), truth.true_labels.tolist()))
    ids = result.refined.ids[:k]
    labels = result.refined.noisy_labels[:k]
    try:
        true = np.array([true_by_id[int(i)] for i in ids], dtype=np.int64)
    except KeyError as exc:
        raise DataValidationError(f"id {exc} not found in truth dataset")
    return float(np.mean(labels == true)), int(k)


def evaluate_pipeline(world_spec: SynthWorldSpec, noise_spec: NoiseSpec,
                      modifier_config: ModifierConfig, tau: float,
                      train_config: TrainConfig
                      ) -> tuple[EvalReport, EvalReport]:
    """Train on the refined dataset and on the raw noisy baseline.

    Both runs share the training config and a fresh clean test set drawn
    around the same prototypes at seed XOR TEST_WORLD_SALT.
    """
    dataset, prototypes = generate_world(world_spec)
    noisy = inject(dataset, noise_spec)
    pairs = modify(noisy, prototypes, modifier_config)
    result = select(pairs, tau, source=noisy)
    test_seed = rng.derived_seed(world_spec.seed, TEST_WORLD_SALT)
    test_ds = sample_around_prototypes(
        prototypes, world_spec.intra_class_std, world_spec.samples_per_class,
        test_seed, f"test_split(seed={test_seed})")
    refined_report = train_classifier(result.refined, test_ds, train_config)
    baseline_report = train_classifier(noisy, test_ds, train_config)
    try:
        sel_acc, num_sel = selection_quality(result, dataset)
    except EmptySelectionError:
        sel_acc, num_sel = None, 0
    refined_report = EvalReport(refined_report.test_accuracy,
                                refined_report.train_loss_curve,
                                refined_report.test_loss_curve,
                                selection_accuracy=sel_acc,
                                num_selected=num_sel)
    return refined_report, baseline_report


def write_eval_csv(report: EvalReport, path) -> None:
    """Per-epoch losses as CSV."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch,train_loss,test_loss\n")
        for e in range(len(report.train_loss_curve)):
            fh.write(f"{e},{float(report.train_loss_curve[e])!r},"
                     f"{float(report.test_loss_curve[e])!r}\n")


def summarize(report: EvalReport) -> str:
    lines = [f"test_accuracy={report.test_accuracy!r}"]
    if report.selection_accuracy is not None:
        lines.append(f"selection_accuracy={report.selection_accuracy!r}")
    if report.num_selected is not None:
        lines.append(f"num_selected={report.num_selected}")
    if len(report.train_loss_curve):
        lines.append(f"final_train_loss={float(report.train_loss_curve[-1])!r}")
        lines.append(f"final_test_loss={float(report.test_loss_curve[-1])!r}")
    return "\n".join(lines) + "\n"
