"""Pure-Python (numpy) versions of the compiled kernels, same API and results."""

from __future__ import annotations

import numpy as np

WEIGHT = 0.2


class CompositeIndex:
    """Packed profiles supporting composite-distance queries.

    ``feats`` holds scaled features (n x 4). Pattern counts are CSR encoded:
    row ``i`` owns ``ids[indptr[i]:indptr[i+1]]`` (sorted) with matching
    ``counts``. Internally the counts are expanded to a dense n x vocabulary
    matrix.
    """

    def __init__(self, feats, indptr, ids, counts):
        self.feats = np.ascontiguousarray(feats, dtype=np.float64)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.ids = np.ascontiguousarray(ids, dtype=np.int64)
        self.counts = np.ascontiguousarray(counts, dtype=np.int64)
        self.n = self.feats.shape[0]
        if self.feats.ndim != 2 or self.feats.shape[1] != 4:
            raise ValueError("expected 4 feature columns")
        if self.indptr.shape[0] != self.n + 1:
            raise ValueError("indptr must have n + 1 entries")
        vocab = int(self.ids.max()) + 1 if self.ids.size else 0
        self._dense = np.zeros((self.n, vocab), dtype=np.int64)
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        self._dense[rows, self.ids] = self.counts
        self._totals = self._dense.sum(axis=1)

    def _rows(self, i: int, js) -> np.ndarray:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        cols, ci = self.ids[lo:hi], self.counts[lo:hi]
        sub = self._dense[:, cols][js]
        shared = sub > 0
        ta, tb = self._totals[i], self._totals[js]
        # twice the raw pattern distance, in exact integer arithmetic
        twice = 2 * (ta + tb) - 2 * np.where(shared, sub + ci, 0).sum(axis=1)
        twice += np.where(shared, np.abs(sub - ci), 0).sum(axis=1)
        denom = ta + tb
        d1 = np.zeros(len(tb), dtype=np.float64)
        nz = denom > 0
        d1[nz] = (twice[nz].astype(np.float64) / 2.0) / denom[nz].astype(np.float64)
        diff = np.abs(self.feats[i] - self.feats[js])
        s = d1 + diff[:, 0]
        s = s + diff[:, 1]
        s = s + diff[:, 2]
        s = s + diff[:, 3]
        return WEIGHT * s

    def distance(self, i: int, j: int) -> float:
        return float(self._rows(i, np.array([j]))[0])

    def row(self, i: int) -> np.ndarray:
        return self._rows(i, np.arange(self.n))

    def neighbors(self, i: int, eps: float) -> np.ndarray:
        return np.flatnonzero(self.row(i) <= eps).astype(np.int64)

    def matrix(self) -> np.ndarray:
        out = np.vstack([self.row(i) for i in range(self.n)]) if self.n else np.zeros((0, 0))
        # mirror the upper triangle so the result is exactly symmetric
        upper = np.triu(out, 1)
        return upper + upper.T


def lcs_length(a, b) -> int:
    """Length of the longest common contiguous run of two sequences.

    Only matching positions are visited, so the cost is proportional to the
    number of equal element pairs rather than ``len(a) * len(b)``.
    """
    positions: dict = {}
    for j, y in enumerate(b):
        positions.setdefault(y, []).append(j)
    best = 0
    prev: dict[int, int] = {}
    for x in a:
        cur = {}
        for j in positions.get(x, ()):
            run = prev.get(j - 1, 0) + 1
            cur[j] = run
            if run > best:
                best = run
        prev = cur
    return best
