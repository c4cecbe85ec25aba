"""Label-corruption processes: symmetric, pairflip, instance-dependent.

Each injector is a pure function of (dataset, spec). Per-instance draws come
from Philox streams keyed by instance id, so corruption of one instance does
not depend on how many others are processed or in what order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from . import rng
from .data import Dataset
from .errors import DataValidationError

SYMMETRIC = "symmetric"
PAIRFLIP = "pairflip"
INSTANCE_DEPENDENT = "instance_dependent"
FAMILIES = (SYMMETRIC, PAIRFLIP, INSTANCE_DEPENDENT)


@dataclass(frozen=True)
class NoiseSpec:
    """A corruption process: family, target flip rate, seed.

    idn_std is the truncated-normal spread of per-instance flip rates and
    only matters for the instance_dependent family.
    """

    family: str
    rate: float
    seed: int
    idn_std: float = 0.1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DataValidationError(
                f"family must be one of {FAMILIES}, not {self.family!r}")
        if not 0.0 <= self.rate < 1.0:
            raise DataValidationError("rate must be in [0, 1)")
        if not self.idn_std > 0:
            raise DataValidationError("idn_std must be > 0")


def _check(dataset: Dataset, spec: NoiseSpec, family: str) -> None:
    if spec.family != family:
        raise DataValidationError(
            f"spec family {spec.family!r} does not match injector {family!r}")
    if not dataset.has_truth:
        raise DataValidationError("noise injection needs true labels")
    if dataset.num_classes < 2:
        raise DataValidationError("need at least 2 classes")


def _with_noisy(dataset: Dataset, noisy: np.ndarray, note: str) -> Dataset:
    provenance = f"{note} <- {dataset.provenance}" if dataset.provenance else note
    return dataset.replaced(noisy_labels=noisy, provenance=provenance)


def inject_symmetric(dataset: Dataset, spec: NoiseSpec) -> Dataset:
    """With probability rate, resample the label uniformly from the C-1
    other classes (a flip never lands on the true label)."""
    _check(dataset, spec, SYMMETRIC)
    c = dataset.num_classes
    true = dataset.true_labels
    noisy = true.copy()
    if len(dataset):
        u = rng.per_element_uniforms(spec.seed, rng.TAG_SYMMETRIC,
                                     dataset.ids, 2)
        flip = u[:, 0] < spec.rate
        offset = 1 + np.floor(u[:, 1] * (c - 1)).astype(np.int64)
        noisy[flip] = (true[flip] + offset[flip]) % c
    return _with_noisy(dataset, noisy,
                       f"symmetric(rate={spec.rate},seed={spec.seed})")


def inject_pairflip(dataset: Dataset, spec: NoiseSpec) -> Dataset:
    """With probability rate, map class c to its cyclic successor (c+1) mod C."""
    _check(dataset, spec, PAIRFLIP)
    c = dataset.num_classes
    true = dataset.true_labels
    noisy = true.copy()
    if len(dataset):
        u = rng.per_element_uniforms(spec.seed, rng.TAG_PAIRFLIP,
                                     dataset.ids, 1)[:, 0]
        flip = u < spec.rate
        noisy[flip] = (true[flip] + 1) % c
    return _with_noisy(dataset, noisy,
                       f"pairflip(rate={spec.rate},seed={spec.seed})")


def _idn_parts(dataset: Dataset, spec: NoiseSpec):
    """Flip distributions plus the categorical uniforms, sharing one pass
    over the per-instance streams (draw 0 = flip rate, draw 1 = category)."""
    c = dataset.num_classes
    n = len(dataset)
    w = rng.stream(spec.seed, rng.TAG_IDN_PROJECTION).normal(
        size=(dataset.dim, c))
    u = rng.per_element_uniforms(spec.seed, rng.TAG_IDN, dataset.ids, 2)
    lo = ndtr((0.0 - spec.rate) / spec.idn_std)
    hi = ndtr((1.0 - spec.rate) / spec.idn_std)
    q = spec.rate + spec.idn_std * ndtri(lo + u[:, 0] * (hi - lo))
    q = np.clip(q, 0.0, 1.0)
    scores = dataset.features @ w
    rows = np.arange(n)
    scores[rows, dataset.true_labels] = -np.inf
    scores -= scores.max(axis=1, keepdims=True)
    p = np.exp(scores)
    p /= p.sum(axis=1, keepdims=True)
    p *= q[:, None]
    p[rows, dataset.true_labels] = 1.0 - q
    return p, u[:, 1]


def idn_flip_distributions(dataset: Dataset, spec: NoiseSpec) -> np.ndarray:
    """Per-instance categorical label distributions for IDN corruption.

    Row i: probability 1-q_i on the true label; the remainder q_i spread
    over the other classes by a softmax of a fixed random projection of the
    features. q_i is a truncated normal (mean rate, std idn_std, support
    [0,1]) drawn by inverse CDF from the instance's stream.
    """
    _check(dataset, spec, INSTANCE_DEPENDENT)
    return _idn_parts(dataset, spec)[0]


def inject_instance_dependent(dataset: Dataset, spec: NoiseSpec) -> Dataset:
    """Feature-dependent corruption: flip rate and flip target both derive
    from the instance's features (see idn_flip_distributions)."""
    _check(dataset, spec, INSTANCE_DEPENDENT)
    noisy = dataset.true_labels.copy()
    if len(dataset):
        p, u = _idn_parts(dataset, spec)
        cum = np.cumsum(p, axis=1)
        cum[:, -1] = 1.0
        noisy = np.argmax(cum >= u[:, None], axis=1).astype(np.int64)
    return _with_noisy(
        dataset, noisy,
        f"idn(rate={spec.rate},std={spec.idn_std},seed={spec.seed})")


_INJECTORS = {
    SYMMETRIC: inject_symmetric,
    PAIRFLIP: inject_pairflip,
    INSTANCE_DEPENDENT: inject_instance_dependent,
}


def inject(dataset: Dataset, spec: NoiseSpec) -> Dataset:
    """Dispatch to the injector named by spec.family."""
    return _INJECTORS[spec.family](dataset, spec)
