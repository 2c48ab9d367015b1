"""Pure-Python/numpy split-scoring kernels.

Used when the compiled ``_fast`` extension is not built. Arrays are
``np.intp``; ``rows`` selects the instances of the current node.
"""

from __future__ import annotations

import numpy as np


def entropy_counts(counts) -> float:
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total <= 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            p = float(c) / total
            h -= p * np.log2(p)
    return float(h)


def class_counts(labels: np.ndarray, rows: np.ndarray, n_classes: int) -> np.ndarray:
    return np.bincount(labels[rows], minlength=n_classes).astype(np.int64)


def contingency(
    codes: np.ndarray, labels: np.ndarray, rows: np.ndarray, attr: int, n_values: int, n_classes: int
) -> np.ndarray:
    flat = codes[rows, attr] * n_classes + labels[rows]
    return np.bincount(flat, minlength=n_values * n_classes).reshape(n_values, n_classes).astype(np.int64)


def _entropy_rows(table: np.ndarray) -> np.ndarray:
    sizes = table.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = table / sizes[:, None]
        terms = np.where(table > 0, -p * np.log2(np.where(table > 0, p, 1.0)), 0.0)
    return terms.sum(axis=1)


def split_gains(
    codes: np.ndarray,
    labels: np.ndarray,
    rows: np.ndarray,
    attrs: np.ndarray,
    n_values: np.ndarray,
    n_classes: int,
) -> np.ndarray:
    n = len(rows)
    gains = np.zeros(len(attrs), dtype=np.float64)
    if n == 0:
        return gains
    sub_labels = labels[rows]
    h_parent = entropy_counts(np.bincount(sub_labels, minlength=n_classes))
    for k, a in enumerate(attrs):
        nv = int(n_values[a])
        flat = codes[rows, a] * n_classes + sub_labels
        table = np.bincount(flat, minlength=nv * n_classes).reshape(nv, n_classes)
        sizes = table.sum(axis=1)
        nz = sizes > 0
        cond = float(np.sum(sizes[nz] / n * _entropy_rows(table[nz])))
        gains[k] = h_parent - cond
    return gains
