"""Core dataset types, the synthetic benchmark world, and feature-file I/O.

The on-disk format ("v1 feature file") is a UTF-8 text file:

    echoalign-features v1 C=<int> D=<int> truth=<0|1>[ provenance=<pct-encoded>]
    id,label[,true_label],f0,...,f(D-1)
    ...

Features are printed with shortest round-trip precision, LF endings. The
optional provenance token records how the file was produced; everything
else is data and round-trips bit-exactly.
"""

from __future__ import annotations

import urllib.parse
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import (DataValidationError, FeatureFileError,
                     PrototypePlacementError)

HEADER_MAGIC = "echoalign-features"
FORMAT_VERSION = "v1"


@dataclass(frozen=True)
class LabeledInstance:
    """One sample: id, feature vector, noisy label, optional hidden truth."""

    id: int
    features: np.ndarray
    noisy_label: int
    true_label: int | None = None


@dataclass(frozen=True)
class SynthWorldSpec:
    """Gaussian-mixture-on-the-sphere benchmark world."""

    num_classes: int
    dim: int
    prototype_separation: float
    intra_class_std: float
    samples_per_class: int
    seed: int

    def __post_init__(self):
        if self.num_classes < 2:
            raise DataValidationError("num_classes must be >= 2")
        if self.dim < 1:
            raise DataValidationError("dim must be >= 1")
        if not self.prototype_separation > 0:
            raise DataValidationError("prototype_separation must be > 0")
        if not self.intra_class_std > 0:
            raise DataValidationError("intra_class_std must be > 0")
        if self.samples_per_class < 0:
            raise DataValidationError("samples_per_class must be >= 0")


class Dataset:
    """Ordered collection of labeled instances with shared C and D.

    Stored column-wise as numpy arrays. Ids must be unique and non-negative;
    generated and corrupted datasets keep them sorted ascending, while a
    refined dataset (part 1 then part 2) may not, so sortedness is a
    convention of the producers rather than a constructor requirement.
    """

    def __init__(self, ids, features, noisy_labels, true_labels,
                 num_classes: int, dim: int, provenance: str = ""):
        ids = np.asarray(ids, dtype=np.int64)
        features = np.asarray(features, dtype=np.float64)
        noisy_labels = np.asarray(noisy_labels, dtype=np.int64)
        if true_labels is not None:
            true_labels = np.asarray(true_labels, dtype=np.int64)
        if num_classes < 2:
            raise DataValidationError("num_classes must be >= 2")
        if dim < 1:
            raise DataValidationError("dim must be >= 1")
        n = len(ids)
        if features.shape != (n, dim):
            raise DataValidationError(
                f"features shape {features.shape} != ({n}, {dim})")
        if noisy_labels.shape != (n,):
            raise DataValidationError("noisy_labels length mismatch")
        if true_labels is not None and true_labels.shape != (n,):
            raise DataValidationError("true_labels length mismatch")
        if n and ids.min() < 0:
            raise DataValidationError("ids must be non-negative")
        if len(np.unique(ids)) != n:
            raise DataValidationError("ids must be unique")
        if not np.all(np.isfinite(features)):
            raise DataValidationError("features must be finite")
        for name, labels in (("noisy", noisy_labels), ("true", true_labels)):
            if labels is not None and n and (
                    labels.min() < 0 or labels.max() >= num_classes):
                raise DataValidationError(f"{name} label out of range")
        self.ids = ids
        self.features = features
        self.noisy_labels = noisy_labels
        self.true_labels = true_labels
        self.num_classes = num_classes
        self.dim = dim
        self.provenance = provenance

    @property
    def has_truth(self) -> bool:
        return self.true_labels is not None

    def __len__(self) -> int:
        return len(self.ids)

    def instance(self, position: int) -> LabeledInstance:
        true = None if self.true_labels is None else int(self.true_labels[position])
        return LabeledInstance(int(self.ids[position]),
                               self.features[position].copy(),
                               int(self.noisy_labels[position]), true)

    def __iter__(self):
        return (self.instance(i) for i in range(len(self)))

    @property
    def instances(self) -> list[LabeledInstance]:
        return list(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        if (self.num_classes, self.dim, self.provenance) != \
                (other.num_classes, other.dim, other.provenance):
            return False
        if (self.true_labels is None) != (other.true_labels is None):
            return False
        return (np.array_equal(self.ids, other.ids)
                and np.array_equal(self.features, other.features)
                and np.array_equal(self.noisy_labels, other.noisy_labels)
                and (self.true_labels is None
                     or np.array_equal(self.true_labels, other.true_labels)))

    def replaced(self, **fields) -> "Dataset":
        """Copy with the named constructor arguments replaced."""
        args = dict(ids=self.ids, features=self.features,
                    noisy_labels=self.noisy_labels, true_labels=self.true_labels,
                    num_classes=self.num_classes, dim=self.dim,
                    provenance=self.provenance)
        args.update(fields)
        return Dataset(**args)


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def sample_prototypes(spec: SynthWorldSpec) -> np.ndarray:
    """Rejection-sample C unit-norm prototypes with pairwise separation.

    Candidates are drawn sequentially from one stream and kept when far
    enough from all accepted prototypes; the total draw budget is 10*C.
    """
    gen = rng.stream(spec.seed, rng.TAG_PROTOTYPES)
    accepted: list[np.ndarray] = []
    attempts = 0
    budget = 10 * spec.num_classes
    while len(accepted) < spec.num_classes:
        if attempts >= budget:
            raise PrototypePlacementError(
                f"could not place {spec.num_classes} prototypes with "
                f"separation {spec.prototype_separation} in dim {spec.dim} "
                f"within {budget} attempts")
        attempts += 1
        cand = gen.normal(size=spec.dim)
        cand /= np.linalg.norm(cand)
        if all(np.linalg.norm(cand - p) >= spec.prototype_separation
               for p in accepted):
            accepted.append(cand)
    return np.array(accepted)


def sample_around_prototypes(prototypes: np.ndarray, intra_class_std: float,
                             samples_per_class: int, seed: int,
                             provenance: str) -> Dataset:
    """Draw instances around given prototypes (the instance half of
    generate_world; also used to draw fresh test sets from the same world).

    Instance ids run 0..n-1 class-major; features are the class prototype
    plus iid Gaussian(0, intra_class_std^2) noise, renormalized to the unit
    sphere. Per-instance noise comes from stream (seed, TAG_WORLD, id).
    """
    c, d = prototypes.shape
    n = c * samples_per_class
    labels = np.repeat(np.arange(c, dtype=np.int64), samples_per_class)
    ids = np.arange(n, dtype=np.int64)
    if n:
        eps = rng.per_element_normals(seed, rng.TAG_WORLD, ids, d)
        features = _normalize_rows(prototypes[labels] + intra_class_std * eps)
    else:
        features = np.empty((0, d))
    return Dataset(ids, features, labels, labels.copy(), c, d, provenance)


def generate_world(spec: SynthWorldSpec) -> tuple[Dataset, np.ndarray]:
    """Generate the benchmark dataset and its class prototypes."""
    prototypes = sample_prototypes(spec)
    provenance = (f"generate_world(C={spec.num_classes},D={spec.dim},"
                  f"sep={spec.prototype_separation},"
                  f"std={spec.intra_class_std},per_class={spec.samples_per_class},"
                  f"seed={spec.seed})")
    dataset = sample_around_prototypes(prototypes, spec.intra_class_std,
                                       spec.samples_per_class, spec.seed,
                                       provenance)
    return dataset, prototypes


def prototypes_to_dataset(prototypes: np.ndarray, num_classes: int,
                          provenance: str = "prototypes") -> Dataset:
    """Wrap a prototype matrix as a feature file payload (id = label = class)."""
    c = np.arange(num_classes, dtype=np.int64)
    return Dataset(c, prototypes, c, None, num_classes,
                   prototypes.shape[1], provenance)


def prototype_matrix(dataset: Dataset) -> np.ndarray:
    """Inverse of prototypes_to_dataset; validates one row per class."""
    if len(dataset) != dataset.num_classes or \
            not np.array_equal(dataset.ids, np.arange(dataset.num_classes)):
        raise DataValidationError(
            "prototype file must hold exactly one row per class, ids 0..C-1")
    return dataset.features


def _format_float(value: float) -> str:
    return repr(float(value))


def write_feature_file(dataset: Dataset, path) -> None:
    header = (f"{HEADER_MAGIC} {FORMAT_VERSION} C={dataset.num_classes} "
              f"D={dataset.dim} truth={1 if dataset.has_truth else 0}")
    if dataset.provenance:
        header += " provenance=" + urllib.parse.quote(dataset.provenance, safe="")
    lines = [header]
    for i in range(len(dataset)):
        fields = [str(int(dataset.ids[i])), str(int(dataset.noisy_labels[i]))]
        if dataset.has_truth:
            fields.append(str(int(dataset.true_labels[i])))
        fields.extend(_format_float(v) for v in dataset.features[i])
        lines.append(",".join(fields))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_header(path, line: str):
    tokens = line.split(" ")
    if len(tokens) < 5 or tokens[0] != HEADER_MAGIC:
        raise FeatureFileError(path, 1, f"not a {HEADER_MAGIC} file")
    if tokens[1] != FORMAT_VERSION:
        raise FeatureFileError(path, 1, f"unsupported version {tokens[1]!r}")
    fields = {}
    for tok in tokens[2:]:
        key, sep, value = tok.partition("=")
        if not sep:
            raise FeatureFileError(path, 1, f"malformed header token {tok!r}")
        fields[key] = value
    try:
        num_classes = int(fields["C"])
        dim = int(fields["D"])
        truth = int(fields["truth"])
    except (KeyError, ValueError) as exc:
        raise FeatureFileError(path, 1, f"bad header field: {exc}")
    if truth not in (0, 1):
        raise FeatureFileError(path, 1, "truth flag must be 0 or 1")
    provenance = urllib.parse.unquote(fields.get("provenance", ""))
    return num_classes, dim, bool(truth), provenance


def read_feature_file(path) -> Dataset:
    """Parse a v1 feature file; malformed input raises FeatureFileError
    carrying the 1-based line number."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FeatureFileError(path, 1, "empty file")
    num_classes, dim, truth, provenance = _parse_header(path, lines[0])
    expected = 2 + (1 if truth else 0) + dim
    n = len(lines) - 1
    ids = np.empty(n, dtype=np.int64)
    noisy = np.empty(n, dtype=np.int64)
    true = np.empty(n, dtype=np.int64) if truth else None
    features = np.empty((n, dim), dtype=np.float64)
    seen: dict[int, int] = {}
    for row, line in enumerate(lines[1:]):
        lineno = row + 2
        fields = line.split(",")
        if len(fields) != expected:
            raise FeatureFileError(
                path, lineno, f"expected {expected} fields, got {len(fields)}")
        try:
            ids[row] = int(fields[0])
            noisy[row] = int(fields[1])
            if truth:
                true[row] = int(fields[2])
            features[row] = [float(v) for v in fields[2 + int(truth):]]
        except ValueError as exc:
            raise FeatureFileError(path, lineno, f"unparseable field: {exc}")
        if ids[row] < 0:
            raise FeatureFileError(path, lineno, "negative id")
        if not 0 <= noisy[row] < num_classes:
            raise FeatureFileError(
                path, lineno, f"label {noisy[row]} out of range [0, {num_classes})")
        if truth and not 0 <= true[row] < num_classes:
            raise FeatureFileError(
                path, lineno, f"true label {true[row]} out of range")
        if not np.all(np.isfinite(features[row])):
            raise FeatureFileError(path, lineno, "non-finite feature value")
        key = int(ids[row])
        if key in seen:
            raise FeatureFileError(
                path, lineno, f"duplicate id {key} (first on line {seen[key]})")
        seen[key] = lineno
    return Dataset(ids, features, noisy, true, num_classes, dim, provenance)
