# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``; same signatures, same output."""

import numpy as np

from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t


cdef int _rank_buf(int64_t* m, int rows, int cols, int64_t p, int64_t* inv) nogil:
    cdef int r = 0, j, i, k, piv
    cdef int64_t t, f
    for j in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if m[i * cols + j] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(cols):
                t = m[r * cols + k]
                m[r * cols + k] = m[piv * cols + k]
                m[piv * cols + k] = t
        f = inv[m[r * cols + j]]
        for k in range(j, cols):
            m[r * cols + k] = (m[r * cols + k] * f) % p
        for i in range(r + 1, rows):
            f = m[i * cols + j]
            if f != 0:
                for k in range(j, cols):
                    m[i * cols + k] = (m[i * cols + k] - f * m[r * cols + k]) % p
                    if m[i * cols + k] < 0:
                        m[i * cols + k] += p
        r += 1
    return r


cdef int64_t* _inverse_table(int64_t p):
    cdef int64_t* inv = <int64_t*> malloc(p * sizeof(int64_t))
    cdef int64_t c
    inv[0] = 0
    for c in range(1, p):
        inv[c] = pow(c, p - 2, p)
    return inv


def rank_mod_p(a, long p):
    arr = np.ascontiguousarray(np.asarray(a, dtype=np.int64) % p)
    cdef int rows = arr.shape[0], cols = arr.shape[1]
    if rows == 0 or cols == 0:
        return 0
    cdef int64_t[:, ::1] view = arr
    cdef int64_t* inv = _inverse_table(p)
    cdef int r
    try:
        r = _rank_buf(&view[0, 0], rows, cols, p, inv)
    finally:
        free(inv)
    return r


def rank_table(a, long p):
    arr = np.ascontiguousarray(np.asarray(a, dtype=np.int64) % p)
    cdef int rows = arr.shape[0], cols = arr.shape[1]
    cdef int64_t total = (<int64_t> 1) << cols
    out = np.zeros(total, dtype=np.int64)
    if rows == 0 or cols == 0:
        return out
    cdef int64_t[:, ::1] src = arr
    cdef int64_t[::1] res = out
    cdef int64_t* inv = _inverse_table(p)
    cdef int64_t* buf = <int64_t*> malloc(rows * cols * sizeof(int64_t))
    cdef int64_t mask
    cdef int i, j, w, width
    try:
        with nogil:
            for mask in range(1, total):
                width = 0
                for j in range(cols):
                    if (mask >> j) & 1:
                        width += 1
                for i in range(rows):
                    w = 0
                    for j in range(cols):
                        if (mask >> j) & 1:
                            buf[i * width + w] = src[i, j]
                            w += 1
                res[mask] = _rank_buf(buf, rows, width, p, inv)
    finally:
        free(inv)
        free(buf)
    return out


def first_conflict(keys, vals):
    k = np.ascontiguousarray(np.asarray(keys, dtype=np.int64))
    v = np.ascontiguousarray(np.asarray(vals, dtype=np.int64))
    cdef Py_ssize_t n = k.shape[0]
    if n == 0:
        return None
    cdef int64_t lo = k.min(), hi = k.max()
    cdef int64_t[::1] kv
    if hi - lo >= 4 * n + 1024:
        # sparse key range: compact first
        _, inverse = np.unique(k, return_inverse=True)
        k = np.ascontiguousarray(inverse.reshape(-1).astype(np.int64))
        lo = 0
        hi = k.max()
    kv = k
    cdef int64_t[::1] vv = v
    first_arr = np.full(hi - lo + 1, -1, dtype=np.int64)
    cdef int64_t[::1] first = first_arr
    cdef Py_ssize_t j, f, hit_i = -1, hit_j = -1
    with nogil:
        for j in range(n):
            f = first[kv[j] - lo]
            if f < 0:
                first[kv[j] - lo] = j
            elif vv[f] != vv[j]:
                hit_i = f
                hit_j = j
                break
    if hit_j < 0:
        return None
    return int(hit_i), int(hit_j)


def rank_axiom_violations(r, int n, long limit):
    arr = np.ascontiguousarray(np.asarray(r, dtype=np.int64))
    cdef int64_t[::1] rv = arr
    cdef int64_t total = (<int64_t> 1) << n
    cdef int64_t a, b, size
    out = []
    for a in range(total):
        size = 0
        b = a
        while b:
            size += b & 1
            b >>= 1
        if rv[a] < 0 or rv[a] > size:
            out.append(("R1", a, -1))
            if len(out) >= limit:
                return out
        for b in range(a, total):
            if (b & a) == a and rv[a] > rv[b]:
                out.append(("R2", a, b))
                if len(out) >= limit:
                    return out
            if rv[a | b] + rv[a & b] > rv[a] + rv[b]:
                out.append(("R3", a, b))
                if len(out) >= limit:
                    return out
    return out
