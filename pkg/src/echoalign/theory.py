"""Executable checks of the framework's theory claims on synthetic worlds.

Four measurable quantities back the claims, each with an independent
oracle in the test suite:

  alignment          plug-in mutual information between quantized features
                     and the noisy labels, before vs after modification
  error reduction    held-out OLS error on a regression world vs the same
                     world with variance reallocated toward the predictive
                     coordinates
  estimator variance residual-variance-scaled trace of the inverse Gram
                     over the predictive coordinates, cross-checked by a
                     pairs bootstrap
  generalization     Monte-Carlo empirical Rademacher complexity of the
                     bounded linear class, with shared sign draws

plus the two-sample Kolmogorov-Smirnov test used to certify that clean and
noisy instances have distinguishable similarity distributions.

The regression world: X has iid standard-normal columns and
y = X @ beta + eps. The "signal" coordinates are the support of beta. The
modified design shrinks every distractor column by 1/(1+gain) and absorbs
a (gain/(1+gain)) fraction of the label residual into the signal columns
along beta, so that y = X' @ beta + eps/(1+gain) holds exactly. This keeps
y exactly linear in both designs (errors vanish when noise_std = 0) while
concentrating label-relevant variability in the signal coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from . import rng
from .backend import kernels
from .data import SynthWorldSpec, generate_world
from .errors import DataValidationError, SingularMatrixError
from .modify import ModifierConfig, modify
from .noise import NoiseSpec, inject


# ---------------------------------------------------------------------------
# discrete mutual information

def _compact(values: np.ndarray) -> np.ndarray:
    return np.unique(np.asarray(values, dtype=np.int64), return_inverse=True)[1]


def mutual_information_discrete(assignments_a, assignments_b) -> float:
    """Plug-in mutual information (nats) of two discrete assignments."""
    a = _compact(assignments_a)
    b = _compact(assignments_b)
    if len(a) != len(b):
        raise DataValidationError("assignment lengths differ")
    if len(a) == 0:
        raise DataValidationError("assignments must be nonempty")
    joint = np.zeros((a.max() + 1, b.max() + 1))
    np.add.at(joint, (a, b), 1.0)
    joint /= len(a)
    pa = joint.sum(axis=1, keepdims=True)
    pb = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    mi = float(np.sum(joint[mask] * np.log(joint[mask] / (pa @ pb)[mask])))
    return max(mi, 0.0)


def entropy_discrete(assignments) -> float:
    """Plug-in entropy (nats) of a discrete assignment."""
    a = _compact(assignments)
    if len(a) == 0:
        raise DataValidationError("assignments must be nonempty")
    p = np.bincount(a) / len(a)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def verify_alignment(world_spec: SynthWorldSpec, noise_spec: NoiseSpec,
                     modifier_config: ModifierConfig) -> tuple[float, float]:
    """MI(quantized features; noisy labels) before and after modification.

    Features are quantized by nearest-prototype assignment, making the MI
    a plain discrete plug-in estimate.
    """
    dataset, prototypes = generate_world(world_spec)
    noisy = inject(dataset, noise_spec)
    pairs = modify(noisy, prototypes, modifier_config)
    originals = np.stack([p.original for p in pairs])
    modifieds = np.stack([p.modified for p in pairs])
    q_original = kernels().nearest_rows(originals, prototypes)
    q_modified = kernels().nearest_rows(modifieds, prototypes)
    labels = noisy.noisy_labels
    return (mutual_information_discrete(q_original, labels),
            mutual_information_discrete(q_modified, labels))


# ---------------------------------------------------------------------------
# ordinary least squares

def ols_fit(x_matrix: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares coefficients via QR; rank deficiency is an error."""
    x_matrix = np.asarray(x_matrix, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = x_matrix.shape
    if n <= d:
        raise DataValidationError(f"need more samples than dims, got {n} <= {d}")
    q, r = scipy.linalg.qr(x_matrix, mode="economic")
    diag = np.abs(np.diag(r))
    if diag.min() <= np.finfo(np.float64).eps * max(n, d) * diag.max():
        raise SingularMatrixError("design matrix is rank deficient")
    return scipy.linalg.solve_triangular(r, q.T @ y)


def prediction_error(beta: np.ndarray, x_matrix: np.ndarray,
                     y: np.ndarray) -> float:
    """Mean squared prediction error of the coefficients on (X, y)."""
    resid = y - x_matrix @ beta
    return float(np.mean(resid ** 2))


# ---------------------------------------------------------------------------
# the regression world and its modified design

@dataclass(frozen=True)
class LinearWorldSpec:
    """Regression benchmark: y = X @ coefficient_vector + noise."""

    dim: int
    num_samples: int
    coefficient_vector: tuple[float, ...]
    noise_std: float
    alignment_gain: float
    seed: int

    def __post_init__(self):
        beta = np.asarray(self.coefficient_vector, dtype=np.float64)
        if beta.shape != (self.dim,):
            raise DataValidationError("coefficient_vector length must equal dim")
        if not np.any(beta != 0):
            raise DataValidationError("coefficient_vector must have support")
        if self.num_samples <= self.dim:
            raise DataValidationError("num_samples must exceed dim")
        if self.noise_std < 0:
            raise DataValidationError("noise_std must be >= 0")
        if self.alignment_gain < 0:
            raise DataValidationError("alignment_gain must be >= 0")

    @property
    def beta(self) -> np.ndarray:
        return np.asarray(self.coefficient_vector, dtype=np.float64)


@dataclass(frozen=True)
class LinearWorld:
    x_original: np.ndarray
    x_modified: np.ndarray
    y: np.ndarray
    signal_mask: np.ndarray  # True on the support of beta


def make_linear_world(spec: LinearWorldSpec) -> LinearWorld:
    """Draw the world and build the variance-reallocated modified design."""
    gen = rng.stream(spec.seed, rng.TAG_LINEAR_WORLD)
    beta = spec.beta
    x = gen.normal(size=(spec.num_samples, spec.dim))
    eps = gen.normal(size=spec.num_samples) * spec.noise_std
    y = x @ beta + eps
    signal = beta != 0
    x_mod = x.copy()
    gain = spec.alignment_gain
    if gain > 0:
        x_mod[:, ~signal] /= (1.0 + gain)
        x_mod[:, signal] += (gain / (1.0 + gain)) * np.outer(
            eps, beta[signal] / float(beta @ beta))
    return LinearWorld(x, x_mod, y, signal)


def verify_error_reduction(spec: LinearWorldSpec) -> tuple[float, float]:
    """Held-out OLS error on the original vs modified design.

    The first half of the rows (iid, so the split is exchangeable) trains
    each model; the second half is scored.
    """
    world = make_linear_world(spec)
    n_train = spec.num_samples // 2
    errs = []
    for x in (world.x_original, world.x_modified):
        beta_hat = ols_fit(x[:n_train], world.y[:n_train])
        errs.append(prediction_error(beta_hat, x[n_train:], world.y[n_train:]))
    return errs[0], errs[1]


def ols_variance_trace(x_matrix: np.ndarray, noise_variance: float,
                       coords: np.ndarray | None = None) -> float:
    """trace of noise_variance * (X^T X)^-1, optionally over a coord subset."""
    gram = x_matrix.T @ x_matrix
    try:
        inv = scipy.linalg.inv(gram)
    except scipy.linalg.LinAlgError:
        raise SingularMatrixError("Gram matrix is singular")
    if coords is not None:
        inv = inv[np.ix_(coords, coords)]
    return float(noise_variance * np.trace(inv))


class VarianceCheck(NamedTuple):
    var_original: float
    var_modified: float
    bootstrap_original: float
    bootstrap_modified: float


BOOTSTRAP_RESAMPLES = 200


def verify_estimator_variance(spec: LinearWorldSpec) -> VarianceCheck:
    """Coefficient-estimator variance over the signal coordinates.

    Analytic value: fitted residual variance times the signal-block trace
    of the inverse Gram. Each world keeps its own residual variance (the
    modified world's label residual really is smaller; the bootstrap would
    contradict a shared-sigma convention). Cross-check: trace of the
    empirical covariance of pairs-bootstrap coefficient estimates.
    """
    world = make_linear_world(spec)
    n = spec.num_samples
    d = spec.dim
    boot_gen = rng.stream(spec.seed, rng.TAG_BOOTSTRAP)
    draws = boot_gen.integers(0, n, size=(BOOTSTRAP_RESAMPLES, n))
    analytic = []
    bootstrap = []
    for x in (world.x_original, world.x_modified):
        beta_hat = ols_fit(x, world.y)
        resid = world.y - x @ beta_hat
        s2 = float(resid @ resid) / (n - d)
        analytic.append(ols_variance_trace(x, s2, world.signal_mask))
        betas = np.empty((BOOTSTRAP_RESAMPLES, d))
        for r in range(BOOTSTRAP_RESAMPLES):
            idx = draws[r]
            betas[r] = ols_fit(x[idx], world.y[idx])
        cov = np.cov(betas.T)
        bootstrap.append(float(np.trace(
            cov[np.ix_(world.signal_mask, world.signal_mask)])))
    return VarianceCheck(analytic[0], analytic[1], bootstrap[0], bootstrap[1])


# ---------------------------------------------------------------------------
# empirical Rademacher complexity

class RademacherEstimate(NamedTuple):
    value: float
    stderr: float


def rademacher_estimate(x_matrix: np.ndarray, norm_bound: float,
                        num_draws: int, seed: int) -> RademacherEstimate:
    """Monte-Carlo estimate of the bounded linear class's complexity.

    For the class {x -> <w, x> : ||w|| <= B} the supremum has the closed
    form (B/n) * ||sum_i sigma_i x_i||, so the estimate averages that norm
    over num_draws sign vectors. Equal seeds mean equal sign draws, which
    is how paired comparisons share randomness.
    """
    if num_draws < 1:
        raise DataValidationError("num_draws must be >= 1")
    x_matrix = np.asarray(x_matrix, dtype=np.float64)
    n = x_matrix.shape[0]
    gen = rng.stream(seed, rng.TAG_RADEMACHER)
    signs = gen.integers(0, 2, size=(num_draws, n)).astype(np.float64) * 2.0 - 1.0
    sups = (norm_bound / n) * np.linalg.norm(signs @ x_matrix, axis=1)
    value = float(np.mean(sups))
    stderr = float(np.std(sups, ddof=1) / math.sqrt(num_draws)) \
        if num_draws > 1 else 0.0
    return RademacherEstimate(value, stderr)


# ---------------------------------------------------------------------------
# two-sample Kolmogorov-Smirnov

class KSResult(NamedTuple):
    statistic: float
    p_value: float


def kolmogorov_sf(t: float) -> float:
    """Survival function of the Kolmogorov distribution.

    Series form 2*sum (-1)^(k-1) exp(-2 k^2 t^2) for large t; the
    theta-transformed series for small t where the first converges slowly.
    """
    if t <= 0.0:
        return 1.0
    if t < 1.18:  # standard switch point between the two series
        factor = math.sqrt(2.0 * math.pi) / t
        total = 0.0
        for k in range(1, 20):
            term = math.exp(-((2 * k - 1) ** 2) * math.pi ** 2 / (8.0 * t * t))
            total += term
            if term < 1e-17 * total:
                break
        return min(1.0, max(0.0, 1.0 - factor * total))
    total = 0.0
    sign = 1.0
    for k in range(1, 200):
        term = math.exp(-2.0 * k * k * t * t)
        total += sign * term
        if term < 1e-17:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_two_sample(sample_a, sample_b) -> KSResult:
    """Two-sided two-sample KS test.

    The p-value evaluates the asymptotic Kolmogorov distribution at
    sqrt(ne) * D with the effective sample size ne = n*m/(n+m) standing in
    for n; treat it as approximate below ~50 samples.
    """
    a = np.sort(np.asarray(sample_a, dtype=np.float64))
    b = np.sort(np.asarray(sample_b, dtype=np.float64))
    if len(a) == 0 or len(b) == 0:
        raise DataValidationError("both samples must be nonempty")
    d = float(kernels().ks_distance(a, b))
    n_eff = len(a) * len(b) / (len(a) + len(b))
    return KSResult(d, kolmogorov_sf(math.sqrt(n_eff) * d))


# ---------------------------------------------------------------------------
# the combined report

@dataclass(frozen=True)
class TheoryReport:
    """All measurements for one synthetic world, one regression world."""

    mi_original: float
    mi_modified: float
    err_original: float
    err_modified: float
    var_original: float
    var_modified: float
    rad_original: float
    rad_modified: float
    ks_statistic: float
    ks_pvalue: float

    def as_dict(self) -> dict[str, float]:
        return {
            "mi_original": self.mi_original,
            "mi_modified": self.mi_modified,
            "err_original": self.err_original,
            "err_modified": self.err_modified,
            "var_original": self.var_original,
            "var_modified": self.var_modified,
            "rad_original": self.rad_original,
            "rad_modified": self.rad_modified,
            "ks_statistic": self.ks_statistic,
            "ks_pvalue": self.ks_pvalue,
        }


RADEMACHER_DRAWS = 500
RADEMACHER_NORM_BOUND = 1.0


def similarity_split(world_spec: SynthWorldSpec, noise_spec: NoiseSpec,
                     modifier_config: ModifierConfig):
    """Original-vs-modified similarities partitioned into clean and noisy."""
    dataset, prototypes = generate_world(world_spec)
    noisy = inject(dataset, noise_spec)
    pairs = modify(noisy, prototypes, modifier_config)
    sims = np.array([p.similarity for p in pairs])
    is_clean = noisy.noisy_labels == noisy.true_labels
    return sims[is_clean], sims[~is_clean]


def run_theory_suite(world_spec: SynthWorldSpec, noise_spec: NoiseSpec,
                     modifier_config: ModifierConfig,
                     linear_spec: LinearWorldSpec) -> TheoryReport:
    """Compute every TheoryReport field for the given pair of worlds."""
    mi_original, mi_modified = verify_alignment(world_spec, noise_spec,
                                                modifier_config)
    clean, noisy_sims = similarity_split(world_spec, noise_spec,
                                         modifier_config)
    if len(clean) == 0 or len(noisy_sims) == 0:
        raise DataValidationError(
            "similarity KS needs both clean and noisy instances; "
            "use a nonzero noise rate")
    ks = ks_two_sample(clean, noisy_sims)
    err_original, err_modified = verify_error_reduction(linear_spec)
    var = verify_estimator_variance(linear_spec)
    world = make_linear_world(linear_spec)
    rad_original = rademacher_estimate(world.x_original, RADEMACHER_NORM_BOUND,
                                       RADEMACHER_DRAWS, linear_spec.seed)
    rad_modified = rademacher_estimate(world.x_modified, RADEMACHER_NORM_BOUND,
                                       RADEMACHER_DRAWS, linear_spec.seed)
    report = TheoryReport(
        mi_original=mi_original, mi_modified=mi_modified,
        err_original=err_original, err_modified=err_modified,
        var_original=var.var_original, var_modified=var.var_modified,
        rad_original=rad_original.value, rad_modified=rad_modified.value,
        ks_statistic=ks.statistic, ks_pvalue=ks.p_value)
    for key, value in report.as_dict().items():
        if not math.isfinite(value):
            raise DataValidationError(f"non-finite report field {key}")
    return report


def mi_subsample_table(world_spec: SynthWorldSpec, noise_spec: NoiseSpec,
                       modifier_config: ModifierConfig, num_subsamples: int,
                       seed: int) -> list[tuple[int, float, float]]:
    """Half-sample MI replicates for the comparison histogram export."""
    dataset, prototypes = generate_world(world_spec)
    noisy = inject(dataset, noise_spec)
    pairs = modify(noisy, prototypes, modifier_config)
    originals = np.stack([p.original for p in pairs])
    modifieds = np.stack([p.modified for p in pairs])
    q_original = kernels().nearest_rows(originals, prototypes)
    q_modified = kernels().nearest_rows(modifieds, prototypes)
    labels = noisy.noisy_labels
    gen = rng.stream(seed, rng.TAG_BOOTSTRAP)
    half = len(labels) // 2
    rows = []
    for rep in range(num_subsamples):
        idx = gen.permutation(len(labels))[:half]
        rows.append((rep,
                     mutual_information_discrete(q_original[idx], labels[idx]),
                     mutual_information_discrete(q_modified[idx], labels[idx])))
    return rows
