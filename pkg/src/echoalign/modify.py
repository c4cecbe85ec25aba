"""Instance modification: pull features toward the labeled class prototype.

The desk-scale modifier is a convex pull, modified = normalize(
(1-lambda)*original + lambda*prototype[noisy_label] + residual). It is
near-identity for instances that already sit at their label's prototype
and moves mislabeled instances label-ward, which is all the selection
stage needs. Externally generated modified features enter through
ingest_external instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .backend import kernels
from .data import Dataset, read_feature_file
from .errors import DataValidationError, PairMismatchError

SIMILARITY_CACHE_TOL = 1e-9


@dataclass(frozen=True)
class ModifierConfig:
    """Pull strength lambda in (0, 1], residual noise, seed."""

    pull_strength: float
    residual_std: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.pull_strength <= 1.0:
            raise DataValidationError("pull_strength must be in (0, 1]")
        if self.residual_std < 0.0:
            raise DataValidationError("residual_std must be >= 0")


@dataclass(frozen=True)
class ModifiedPair:
    """Original/modified feature vectors for one instance, with the
    original-vs-modified cosine similarity cached."""

    id: int
    original: np.ndarray
    modified: np.ndarray
    noisy_label: int
    similarity: float

    def __post_init__(self):
        for name, vec in (("original", self.original), ("modified", self.modified)):
            if not np.all(np.isfinite(vec)):
                raise DataValidationError(f"{name} vector must be finite")
            if not np.any(vec):
                raise DataValidationError(f"{name} vector must be nonzero")
        if not -1.0 <= self.similarity <= 1.0:
            raise DataValidationError("similarity must lie in [-1, 1]")


def _cached_pairs(ids, originals, modifieds, labels) -> list[ModifiedPair]:
    sims = np.clip(kernels().row_cosine(originals, modifieds), -1.0, 1.0)
    return [ModifiedPair(int(ids[i]), originals[i].copy(), modifieds[i].copy(),
                         int(labels[i]), float(sims[i]))
            for i in range(len(ids))]


def modify(dataset: Dataset, prototypes: np.ndarray,
           config: ModifierConfig) -> list[ModifiedPair]:
    """Modify every instance toward its noisy label's prototype.

    Residuals come from stream (seed, TAG_MODIFY, id); output order and ids
    match the input dataset.
    """
    if prototypes.shape != (dataset.num_classes, dataset.dim):
        raise DataValidationError(
            f"prototype matrix shape {prototypes.shape} does not match "
            f"(C={dataset.num_classes}, D={dataset.dim})")
    lam = config.pull_strength
    pulled = (1.0 - lam) * dataset.features + lam * prototypes[dataset.noisy_labels]
    if config.residual_std > 0 and len(dataset):
        eps = rng.per_element_normals(config.seed, rng.TAG_MODIFY,
                                      dataset.ids, dataset.dim)
        pulled = pulled + config.residual_std * eps
    norms = np.linalg.norm(pulled, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise DataValidationError("modification produced a zero vector")
    modified = pulled / norms
    return _cached_pairs(dataset.ids, dataset.features, modified,
                         dataset.noisy_labels)


def class_centroids(dataset: Dataset) -> np.ndarray:
    """Unit-norm per-class centroids of the features, grouped by noisy label.

    This is the prototype source when no generator prototypes exist (real
    data): centroids only use observable quantities.
    """
    out = np.zeros((dataset.num_classes, dataset.dim))
    for c in range(dataset.num_classes):
        members = dataset.features[dataset.noisy_labels == c]
        if len(members) == 0:
            raise DataValidationError(f"no instances labeled {c}; cannot "
                                      "form a centroid prototype")
        mean = members.mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm == 0.0:
            raise DataValidationError(f"class {c} centroid is the zero vector")
        out[c] = mean / norm
    return out


def pair_datasets(original: Dataset, modified: Dataset) -> list[ModifiedPair]:
    """Match two datasets by id into pairs; labels come from the original."""
    if original.dim != modified.dim:
        raise PairMismatchError(
            f"dimension mismatch: {original.dim} vs {modified.dim}")
    if original.num_classes != modified.num_classes:
        raise PairMismatchError(
            f"class-count mismatch: {original.num_classes} vs "
            f"{modified.num_classes}")
    pos_by_id = {int(i): p for p, i in enumerate(modified.ids)}
    missing = [int(i) for i in original.ids if int(i) not in pos_by_id]
    if missing:
        raise PairMismatchError(
            f"id {missing[0]} present in original but not in modified")
    extra = set(pos_by_id) - {int(i) for i in original.ids}
    if extra:
        raise PairMismatchError(
            f"id {min(extra)} present in modified but not in original")
    order = np.array([pos_by_id[int(i)] for i in original.ids], dtype=np.int64)
    return _cached_pairs(original.ids, original.features,
                         modified.features[order], original.noisy_labels)


def ingest_external(original_path, modified_path) -> list[ModifiedPair]:
    """Build pairs from two feature files with identical id sets."""
    return pair_datasets(read_feature_file(original_path),
                         read_feature_file(modified_path))


def pairs_to_dataset(pairs: list[ModifiedPair], num_classes: int,
                     provenance: str, use_modified: bool = True) -> Dataset:
    """Assemble a dataset from the pairs (modified or original features)."""
    if not pairs:
        raise DataValidationError("no pairs to assemble")
    ids = np.array([p.id for p in pairs], dtype=np.int64)
    feats = np.stack([p.modified if use_modified else p.original for p in pairs])
    labels = np.array([p.noisy_label for p in pairs], dtype=np.int64)
    return Dataset(ids, feats, labels, None, num_classes, feats.shape[1],
                   provenance)
