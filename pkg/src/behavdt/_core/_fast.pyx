# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled split-scoring kernels. Same contract as ``_slow``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log2

cnp.import_array()


cdef double _entropy(const long long[:] counts, Py_ssize_t start, Py_ssize_t n,
                     long long total) nogil:
    cdef double h = 0.0
    cdef double p
    cdef Py_ssize_t c
    if total <= 0:
        return 0.0
    for c in range(n):
        if counts[start + c] > 0:
            p = <double>counts[start + c] / <double>total
            h -= p * log2(p)
    return h


def class_counts(const cnp.intp_t[:] labels, const cnp.intp_t[:] rows,
                 Py_ssize_t n_classes):
    out = np.zeros(n_classes, dtype=np.int64)
    cdef long long[:] view = out
    cdef Py_ssize_t i
    for i in range(rows.shape[0]):
        view[labels[rows[i]]] += 1
    return out


def entropy_counts(counts):
    arr = np.ascontiguousarray(counts, dtype=np.int64)
    cdef long long[:] view = arr
    return _entropy(view, 0, arr.shape[0], arr.sum())


def contingency(const cnp.intp_t[:, :] codes, const cnp.intp_t[:] labels,
                const cnp.intp_t[:] rows, Py_ssize_t attr,
                Py_ssize_t n_values, Py_ssize_t n_classes):
    out = np.zeros((n_values, n_classes), dtype=np.int64)
    cdef long long[:, :] view = out
    cdef Py_ssize_t i, r
    for i in range(rows.shape[0]):
        r = rows[i]
        view[codes[r, attr], labels[r]] += 1
    return out


def split_gains(const cnp.intp_t[:, :] codes, const cnp.intp_t[:] labels,
                const cnp.intp_t[:] rows, const cnp.intp_t[:] attrs,
                const cnp.intp_t[:] n_values, Py_ssize_t n_classes):
    cdef Py_ssize_t n = rows.shape[0]
    cdef Py_ssize_t n_attrs = attrs.shape[0]
    gains = np.zeros(n_attrs, dtype=np.float64)
    cdef double[:] gview = gains
    if n == 0:
        return gains

    cdef Py_ssize_t max_values = 0
    cdef Py_ssize_t k
    for k in range(n_attrs):
        if n_values[attrs[k]] > max_values:
            max_values = n_values[attrs[k]]

    parent_arr = np.zeros(n_classes, dtype=np.int64)
    table_arr = np.zeros(max_values * n_classes, dtype=np.int64)
    size_arr = np.zeros(max_values, dtype=np.int64)
    cdef long long[:] parent = parent_arr
    cdef long long[:] table = table_arr
    cdef long long[:] sizes = size_arr

    cdef Py_ssize_t i, r, a, v, nv
    cdef double h_parent, cond
    with nogil:
        for i in range(n):
            parent[labels[rows[i]]] += 1
        h_parent = _entropy(parent, 0, n_classes, n)
        for k in range(n_attrs):
            a = attrs[k]
            nv = n_values[a]
            for v in range(nv * n_classes):
                table[v] = 0
            for v in range(nv):
                sizes[v] = 0
            for i in range(n):
                r = rows[i]
                table[codes[r, a] * n_classes + labels[r]] += 1
                sizes[codes[r, a]] += 1
            cond = 0.0
            for v in range(nv):
                if sizes[v] > 0:
                    cond += (<double>sizes[v] / <double>n) * _entropy(
                        table, v * n_classes, n_classes, sizes[v])
            gview[k] = h_parent - cond
    return gains
