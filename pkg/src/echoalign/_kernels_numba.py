"""Numba-jitted hot kernels; must mirror _kernels_numpy semantics."""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"


@njit(cache=True)
def row_cosine(a, b):
    n = a.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        dot = 0.0
        na = 0.0
        nb = 0.0
        for j in range(a.shape[1]):
            dot += a[i, j] * b[i, j]
            na += a[i, j] * a[i, j]
            nb += b[i, j] * b[i, j]
        out[i] = dot / (np.sqrt(na) * np.sqrt(nb))
    return out


@njit(cache=True)
def ks_distance(a_sorted, b_sorted):
    na = len(a_sorted)
    nb = len(b_sorted)
    ia = 0
    ib = 0
    d = 0.0
    while ia < na and ib < nb:
        x = a_sorted[ia] if a_sorted[ia] <= b_sorted[ib] else b_sorted[ib]
        while ia < na and a_sorted[ia] <= x:
            ia += 1
        while ib < nb and b_sorted[ib] <= x:
            ib += 1
        diff = abs(ia / na - ib / nb)
        if diff > d:
            d = diff
    return d


@njit(cache=True)
def nearest_rows(x, prototypes):
    n = x.shape[0]
    c = prototypes.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        best = -1e300
        arg = 0
        for k in range(c):
            dot = 0.0
            for j in range(x.shape[1]):
                dot += x[i, j] * prototypes[k, j]
            if dot > best:
                best = dot
                arg = k
        out[i] = arg
    return out


@njit(cache=True)
def mean_ce_loss(weights, bias, x, y):
    n = x.shape[0]
    c = weights.shape[0]
    d = weights.shape[1]
    total = 0.0
    logits = np.empty(c, dtype=np.float64)
    for i in range(n):
        zmax = -1e300
        for k in range(c):
            s = bias[k]
            for j in range(d):
                s += weights[k, j] * x[i, j]
            logits[k] = s
            if s > zmax:
                zmax = s
        norm = 0.0
        for k in range(c):
            norm += np.exp(logits[k] - zmax)
        total += zmax + np.log(norm) - logits[y[i]]
    return total / n


@njit(cache=True)
def sgd_epoch(weights, bias, vel_w, vel_b, x, y, order,
              batch_size, lr, momentum, weight_decay):
    n = x.shape[0]
    c = weights.shape[0]
    d = weights.shape[1]
    logits = np.empty(c, dtype=np.float64)
    gw = np.empty((c, d), dtype=np.float64)
    gb = np.empty(c, dtype=np.float64)
    start = 0
    while start < n:
        stop = min(start + batch_size, n)
        m = stop - start
        for k in range(c):
            gb[k] = 0.0
            for j in range(d):
                gw[k, j] = 0.0
        for pos in range(start, stop):
            i = order[pos]
            zmax = -1e300
            for k in range(c):
                s = bias[k]
                for j in range(d):
                    s += weights[k, j] * x[i, j]
                logits[k] = s
                if s > zmax:
                    zmax = s
            norm = 0.0
            for k in range(c):
                logits[k] = np.exp(logits[k] - zmax)
                norm += logits[k]
            for k in range(c):
                p = logits[k] / norm
                if k == y[i]:
                    p -= 1.0
                gb[k] += p
                for j in range(d):
                    gw[k, j] += p * x[i, j]
        for k in range(c):
            g = gb[k] / m + weight_decay * bias[k]
            vel_b[k] = momentum * vel_b[k] + g
            bias[k] -= lr * vel_b[k]
            for j in range(d):
                gj = gw[k, j] / m + weight_decay * weights[k, j]
                vel_w[k, j] = momentum * vel_w[k, j] + gj
                weights[k, j] -= lr * vel_w[k, j]
        start = stop
