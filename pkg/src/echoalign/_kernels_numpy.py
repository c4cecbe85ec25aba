"""Pure-numpy reference implementations of the hot kernels.

These are the semantics of record; the numba backend must agree with them
to float tolerance (see tests/test_kernels.py). Keep both files in sync.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def row_cosine(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cosine similarity of matching rows of two (n, d) matrices.

    Callers are responsible for rejecting zero-norm rows.
    """
    dots = np.einsum("ij,ij->i", a, b)
    return dots / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))


def ks_distance(a_sorted: np.ndarray, b_sorted: np.ndarray) -> float:
    """Two-sample KS statistic sup |ECDF_a - ECDF_b| for sorted inputs."""
    merged = np.concatenate((a_sorted, b_sorted))
    cdf_a = np.searchsorted(a_sorted, merged, side="right") / len(a_sorted)
    cdf_b = np.searchsorted(b_sorted, merged, side="right") / len(b_sorted)
    return float(np.max(np.abs(cdf_a - cdf_b)))


def nearest_rows(x: np.ndarray, prototypes: np.ndarray) -> np.ndarray:
    """Index of the nearest prototype per row (unit-norm rows assumed,
    so nearest-in-Euclidean equals largest dot product; ties -> lowest index)."""
    return np.argmax(x @ prototypes.T, axis=1).astype(np.int64)


def mean_ce_loss(weights: np.ndarray, bias: np.ndarray,
                 x: np.ndarray, y: np.ndarray) -> float:
    """Mean cross-entropy of a softmax linear classifier over a dataset."""
    z = x @ weights.T + bias
    zmax = z.max(axis=1)
    lse = zmax + np.log(np.sum(np.exp(z - zmax[:, None]), axis=1))
    return float(np.mean(lse - z[np.arange(len(y)), y]))


def sgd_epoch(weights: np.ndarray, bias: np.ndarray,
              vel_w: np.ndarray, vel_b: np.ndarray,
              x: np.ndarray, y: np.ndarray, order: np.ndarray,
              batch_size: int, lr: float, momentum: float,
              weight_decay: float) -> None:
    """One epoch of minibatch SGD with momentum and L2 decay, in place.

    Batches are taken from ``order`` (a permutation of row indices); the
    final short batch is kept. Update rule matches the common momentum
    form: v <- mu*v + (grad + wd*param); param <- param - lr*v.
    """
    n = x.shape[0]
    for start in range(0, n, batch_size):
        idx = order[start:start + batch_size]
        xb = x[idx]
        yb = y[idx]
        m = len(idx)
        z = xb @ weights.T + bias
        z -= z.max(axis=1, keepdims=True)
        p = np.exp(z)
        p /= p.sum(axis=1, keepdims=True)
        p[np.arange(m), yb] -= 1.0
        gw = p.T @ xb / m + weight_decay * weights
        gb = p.sum(axis=0) / m + weight_decay * bias
        vel_w *= momentum
        vel_w += gw
        vel_b *= momentum
        vel_b += gb
        weights -= lr * vel_w
        bias -= lr * vel_b
