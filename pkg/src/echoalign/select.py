"""Similarity metric, the two-part selection rule, and the threshold sweep.

Selection partitions pairs by cached original-vs-modified cosine
similarity against a threshold tau: originals at or above tau are retained
(part 1), instances below tau enter as their modified version (part 2).
The refined dataset lists part 1 then part 2, each sorted by id, every row
labeled with its noisy label.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, read_feature_file
from .errors import DataValidationError, ZeroVectorError
from .modify import ModifiedPair, ModifierConfig, class_centroids, \
    ingest_external, modify

DEFAULT_GRID_POINTS = 101


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two vectors; zero-norm input is an error."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DataValidationError("inputs must be 1-d vectors of equal length")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise DataValidationError("inputs must be finite")
    peak_a = np.max(np.abs(a))
    peak_b = np.max(np.abs(b))
    if peak_a == 0.0 or peak_b == 0.0:
        raise ZeroVectorError("cosine similarity of a zero vector is undefined")
    # scaling by the peak keeps squares clear of under/overflow
    a = a / peak_a
    b = b / peak_b
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


@dataclass(frozen=True)
class SelectionResult:
    """Partition of all input ids: part 1 keeps originals, part 2 swaps in
    the modified instance. The two parts are disjoint and exhaustive."""

    threshold: float
    retained_original_ids: np.ndarray
    included_modified_ids: np.ndarray
    refined: Dataset

    @property
    def num_part1(self) -> int:
        return len(self.retained_original_ids)

    @property
    def num_part2(self) -> int:
        return len(self.included_modified_ids)


def select(pairs: list[ModifiedPair], tau: float,
           source: Dataset | None = None) -> SelectionResult:
    """Apply the threshold rule (similarity >= tau keeps the original).

    ``source``, when given, supplies hidden true labels and C/D metadata
    for the refined dataset; otherwise C is inferred from the labels seen.
    """
    if not pairs:
        raise DataValidationError("cannot select from an empty pair list")
    if not -1.0 <= tau <= 1.0:
        raise DataValidationError("tau must lie in [-1, 1]")
    ids = np.array([p.id for p in pairs], dtype=np.int64)
    sims = np.array([p.similarity for p in pairs])
    labels = np.array([p.noisy_label for p in pairs], dtype=np.int64)
    originals = np.stack([p.original for p in pairs])
    modifieds = np.stack([p.modified for p in pairs])

    keep = sims >= tau
    order1 = np.argsort(ids[keep])
    order2 = np.argsort(ids[~keep])
    part1_ids = ids[keep][order1]
    part2_ids = ids[~keep][order2]

    refined_ids = np.concatenate([part1_ids, part2_ids])
    refined_feats = np.concatenate([originals[keep][order1],
                                    modifieds[~keep][order2]])
    refined_labels = np.concatenate([labels[keep][order1],
                                     labels[~keep][order2]])
    if source is not None:
        num_classes, dim = source.num_classes, source.dim
        if source.has_truth:
            true_by_id = dict(zip(source.ids.tolist(),
                                  source.true_labels.tolist()))
            try:
                refined_true = np.array([true_by_id[i] for i in refined_ids],
                                        dtype=np.int64)
            except KeyError as exc:
                raise DataValidationError(f"id {exc} missing from source dataset")
        else:
            refined_true = None
        base = f" <- {source.provenance}" if source.provenance else ""
    else:
        num_classes = int(labels.max()) + 1 if labels.size else 2
        num_classes = max(num_classes, 2)
        dim = originals.shape[1]
        refined_true = None
        base = ""
    refined = Dataset(refined_ids, refined_feats, refined_labels, refined_true,
                      num_classes, dim, f"select(tau={tau}){base}")
    return SelectionResult(tau, part1_ids, part2_ids, refined)


@dataclass(frozen=True)
class SweepCurve:
    """Per-threshold retained count and part-1 clean fraction.

    clean fraction is NaN wherever part 1 is empty.
    """

    taus: np.ndarray
    num_part1: np.ndarray
    part1_clean_fraction: np.ndarray

    @property
    def points(self) -> list[tuple[float, int, float]]:
        return [(float(t), int(n), float(f))
                for t, n, f in zip(self.taus, self.num_part1,
                                   self.part1_clean_fraction)]


def default_tau_grid() -> np.ndarray:
    return np.linspace(0.0, 1.0, DEFAULT_GRID_POINTS)


def sweep(pairs: list[ModifiedPair], tau_grid, truth: Dataset) -> SweepCurve:
    """Evaluate the selection rule across a sorted threshold grid."""
    if not pairs:
        raise DataValidationError("cannot sweep an empty pair list")
    if not truth.has_truth:
        raise DataValidationError("sweep needs a dataset with true labels")
    tau_grid = np.asarray(tau_grid, dtype=np.float64)
    if tau_grid.ndim != 1 or len(tau_grid) == 0:
        raise DataValidationError("tau grid must be a nonempty 1-d array")
    if np.any(np.diff(tau_grid) < 0):
        raise DataValidationError("tau grid must be sorted ascending")
    true_by_id = dict(zip(truth.ids.tolist(), truth.true_labels.tolist()))
    try:
        true = np.array([true_by_id[p.id] for p in pairs], dtype=np.int64)
    except KeyError as exc:
        raise DataValidationError(f"pair id {exc} missing from truth dataset")
    sims = np.array([p.similarity for p in pairs])
    clean = np.array([p.noisy_label for p in pairs], dtype=np.int64) == true
    counts = np.empty(len(tau_grid), dtype=np.int64)
    fracs = np.empty(len(tau_grid))
    for i, tau in enumerate(tau_grid):
        mask = sims >= tau
        counts[i] = int(mask.sum())
        fracs[i] = float(clean[mask].mean()) if counts[i] else np.nan
    return SweepCurve(tau_grid.copy(), counts, fracs)


def run_pipeline(tau: float, *, dataset: Dataset | None = None,
                 prototypes: np.ndarray | None = None,
                 modifier_config: ModifierConfig | None = None,
                 original_path=None, modified_path=None,
                 ) -> tuple[SelectionResult, dict]:
    """Modify (or ingest) then select; returns the result and a run record.

    Synthetic mode: pass dataset + modifier_config (+ prototypes, else
    class centroids of the dataset are used). External mode: pass
    original_path + modified_path.
    """
    synthetic = dataset is not None
    external = original_path is not None or modified_path is not None
    if synthetic == external:
        raise DataValidationError(
            "pass either (dataset, modifier_config) or both file paths")
    record: dict[str, object] = {"tau": tau}
    if synthetic:
        if modifier_config is None:
            raise DataValidationError("synthetic mode needs a modifier config")
        if prototypes is None:
            prototypes = class_centroids(dataset)
            record["prototypes"] = "class-centroids"
        else:
            record["prototypes"] = "supplied"
        record.update({"mode": "synthetic",
                       "pull_strength": modifier_config.pull_strength,
                       "residual_std": modifier_config.residual_std,
                       "modifier_seed": modifier_config.seed})
        pairs = modify(dataset, prototypes, modifier_config)
        source = dataset
    else:
        if original_path is None or modified_path is None:
            raise DataValidationError("external mode needs both file paths")
        record.update({"mode": "external",
                       "original_path": str(original_path),
                       "modified_path": str(modified_path)})
        source = read_feature_file(original_path)
        pairs = ingest_external(original_path, modified_path)
    result = select(pairs, tau, source=source)
    record.update({"num_input": len(pairs),
                   "num_part1": result.num_part1,
                   "num_part2": result.num_part2})
    return result, record


# ---------------------------------------------------------------------------
# CSV emission

def write_selection_csv(result: SelectionResult, path) -> None:
    """Rows id,part,label in refined order (part 1 block then part 2)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id,part,label\n")
        k = result.num_part1
        for row in range(len(result.refined)):
            part = 1 if row < k else 2
            fh.write(f"{int(result.refined.ids[row])},{part},"
                     f"{int(result.refined.noisy_labels[row])}\n")


def write_sweep_csv(curve: SweepCurve, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("tau,num_selected,clean_fraction\n")
        for tau, count, frac in curve.points:
            fh.write(f"{tau!r},{count},{frac!r}\n")


def write_similarity_csv(pairs: list[ModifiedPair], truth: Dataset, path) -> None:
    """Raw per-instance similarities tagged clean/noisy, for plotting."""
    if not truth.has_truth:
        raise DataValidationError("similarity export needs true labels")
    true_by_id = dict(zip(truth.ids.tolist(), truth.true_labels.tolist()))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id,similarity,clean\n")
        for p in pairs:
            try:
                clean = int(p.noisy_label == true_by_id[p.id])
            except KeyError:
                raise DataValidationError(f"pair id {p.id} missing from truth")
            fh.write(f"{p.id},{p.similarity!r},{clean}\n")
