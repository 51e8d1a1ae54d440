# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: composite-distance neighbourhood queries and LCS length."""

import numpy as np

from libc.math cimport fabs
from libc.stdlib cimport llabs

cdef double WEIGHT = 0.2


cdef class CompositeIndex:
    """Packed profiles supporting fast composite-distance queries.

    ``feats`` holds scaled features (n x 4). Pattern counts are CSR encoded:
    row ``i`` owns ``ids[indptr[i]:indptr[i+1]]`` (sorted) with matching
    ``counts``.
    """

    cdef double[:, ::1] feats
    cdef long long[::1] indptr
    cdef long long[::1] ids
    cdef long long[::1] counts
    cdef long long[::1] totals
    cdef readonly Py_ssize_t n
    cdef Py_ssize_t vocab

    def __init__(self, feats, indptr, ids, counts):
        cdef Py_ssize_t i, k
        cdef long long[::1] t
        self.feats = np.ascontiguousarray(feats, dtype=np.float64)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.ids = np.ascontiguousarray(ids, dtype=np.int64)
        self.counts = np.ascontiguousarray(counts, dtype=np.int64)
        self.n = self.feats.shape[0]
        if self.feats.shape[1] != 4:
            raise ValueError("expected 4 feature columns")
        if self.indptr.shape[0] != self.n + 1:
            raise ValueError("indptr must have n + 1 entries")
        totals = np.zeros(self.n, dtype=np.int64)
        t = totals
        for i in range(self.n):
            for k in range(self.indptr[i], self.indptr[i + 1]):
                t[i] += self.counts[k]
        self.totals = totals
        self.vocab = int(np.asarray(self.ids).max()) + 1 if self.ids.shape[0] else 0

    cdef inline double _dist(self, Py_ssize_t i, Py_ssize_t j) nogil:
        cdef long long ta = self.totals[i]
        cdef long long tb = self.totals[j]
        cdef long long twice = 0
        cdef Py_ssize_t p = self.indptr[i], pe = self.indptr[i + 1]
        cdef Py_ssize_t q = self.indptr[j], qe = self.indptr[j + 1]
        cdef double d1 = 0.0
        cdef double s
        if ta + tb > 0:
            while p < pe and q < qe:
                if self.ids[p] == self.ids[q]:
                    twice += llabs(self.counts[p] - self.counts[q])
                    p += 1
                    q += 1
                elif self.ids[p] < self.ids[q]:
                    twice += 2 * self.counts[p]
                    p += 1
                else:
                    twice += 2 * self.counts[q]
                    q += 1
            while p < pe:
                twice += 2 * self.counts[p]
                p += 1
            while q < qe:
                twice += 2 * self.counts[q]
                q += 1
            d1 = (<double>twice / 2.0) / <double>(ta + tb)
        s = d1 + fabs(self.feats[i, 0] - self.feats[j, 0])
        s = s + fabs(self.feats[i, 1] - self.feats[j, 1])
        s = s + fabs(self.feats[i, 2] - self.feats[j, 2])
        s = s + fabs(self.feats[i, 3] - self.feats[j, 3])
        return WEIGHT * s

    def distance(self, Py_ssize_t i, Py_ssize_t j):
        return self._dist(i, j)

    def row(self, Py_ssize_t i):
        out = np.empty(self.n, dtype=np.float64)
        cdef double[::1] o = out
        cdef Py_ssize_t j
        with nogil:
            for j in range(self.n):
                o[j] = self._dist(i, j)
        return out

    def neighbors(self, Py_ssize_t i, double eps):
        """Indices ``j`` (ascending, including ``i``) with distance <= eps."""
        buf = np.empty(self.n, dtype=np.int64)
        cdef long long[::1] b = buf
        cdef Py_ssize_t j, k, m = 0
        cdef long long ta = self.totals[i], tb, twice, ci, cj
        cdef double lb, d1
        dense_arr = np.zeros(self.vocab, dtype=np.int64)
        cdef long long[::1] dense = dense_arr
        for k in range(self.indptr[i], self.indptr[i + 1]):
            dense[self.ids[k]] = self.counts[k]
        with nogil:
            for j in range(self.n):
                # the pattern term is non-negative and float addition is
                # monotone, so the feature terms alone bound the distance
                lb = 0.0 + fabs(self.feats[i, 0] - self.feats[j, 0])
                lb = lb + fabs(self.feats[i, 1] - self.feats[j, 1])
                lb = lb + fabs(self.feats[i, 2] - self.feats[j, 2])
                lb = lb + fabs(self.feats[i, 3] - self.feats[j, 3])
                if WEIGHT * lb > eps:
                    continue
                tb = self.totals[j]
                d1 = 0.0
                if ta + tb > 0:
                    twice = 2 * (ta + tb)
                    for k in range(self.indptr[j], self.indptr[j + 1]):
                        ci = dense[self.ids[k]]
                        if ci:
                            cj = self.counts[k]
                            twice -= 2 * (ci + cj) - llabs(ci - cj)
                    d1 = (<double>twice / 2.0) / <double>(ta + tb)
                lb = d1 + fabs(self.feats[i, 0] - self.feats[j, 0])
                lb = lb + fabs(self.feats[i, 1] - self.feats[j, 1])
                lb = lb + fabs(self.feats[i, 2] - self.feats[j, 2])
                lb = lb + fabs(self.feats[i, 3] - self.feats[j, 3])
                if WEIGHT * lb <= eps:
                    b[m] = j
                    m += 1
        return buf[:m].copy()

    def matrix(self):
        out = np.zeros((self.n, self.n), dtype=np.float64)
        cdef double[:, ::1] o = out
        cdef Py_ssize_t i, j
        cdef double d
        with nogil:
            for i in range(self.n):
                for j in range(i + 1, self.n):
                    d = self._dist(i, j)
                    o[i, j] = d
                    o[j, i] = d
        return out


def lcs_length(a, b):
    """Length of the longest common contiguous run of two integer sequences."""
    cdef long long[::1] x = np.ascontiguousarray(a, dtype=np.int64)
    cdef long long[::1] y = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t n = x.shape[0], m = y.shape[0], i, j
    if n == 0 or m == 0:
        return 0
    row = np.zeros(m + 1, dtype=np.int64)
    cdef long long[::1] r = row
    cdef long long best = 0, diag, tmp
    with nogil:
        for i in range(n):
            diag = 0
            for j in range(m):
                tmp = r[j + 1]
                if x[i] == y[j]:
                    r[j + 1] = diag + 1
                    if r[j + 1] > best:
                        best = r[j + 1]
                else:
                    r[j + 1] = 0
                diag = tmp
    return best
