"""Pattern distance and the five-component composite distance."""

from __future__ import annotations

import numpy as np

from . import kernels
from .features import ScalerParams, scale

WEIGHT = 0.2

# order of the scaled-feature terms in the composite sum
METRIC_FEATURES = (
    "journey_frequency",
    "locations_per_journey",
    "avg_journey_duration",
    "journeys_per_orl",
)


def pattern_distance_raw(a, b) -> float:
    """Unshared pattern counts plus half the count difference of each shared pattern."""
    total = 0.0
    for pattern, ca in a.items():
        cb = b.get(pattern, 0)
        total += abs(ca - cb) / 2 if cb else ca
    for pattern, cb in b.items():
        if pattern not in a:
            total += cb
    return total


def pattern_distance_scaled(a, b) -> float:
    """Raw pattern distance divided by the combined journey count, in [0, 1]."""
    denom = sum(a.values()) + sum(b.values())
    if denom == 0:
        return 0.0
    twice = 0
    for pattern, ca in a.items():
        cb = b.get(pattern, 0)
        twice += abs(ca - cb) if cb else 2 * ca
    for pattern, cb in b.items():
        if pattern not in a:
            twice += 2 * cb
    return (twice / 2.0) / denom


def _metric_tuple(features, scaler):
    v = scale(features, scaler)
    return tuple(getattr(v, name) for name in METRIC_FEATURES)


def composite_distance(a, b, scaler: ScalerParams) -> float:
    """Equal-weight (0.2) sum of the scaled pattern distance and four scaled feature differences.

    ``a`` and ``b`` need ``pattern_counts`` and ``features`` attributes.
    """
    fa = _metric_tuple(a.features, scaler)
    fb = _metric_tuple(b.features, scaler)
    s = pattern_distance_scaled(a.pattern_counts, b.pattern_counts)
    for x, y in zip(fa, fb):
        s = s + abs(x - y)
    return WEIGHT * s


class PackedProfiles:
    """Profiles packed into arrays for the distance kernels.

    Patterns are interned into a vocabulary sorted by pattern string, so ids
    are stable for a given population.
    """

    def __init__(self, profiles, scaler: ScalerParams, backend=None):
        profiles = list(profiles)
        vocab = sorted({p for prof in profiles for p in prof.pattern_counts})
        self.vocabulary = {p: i for i, p in enumerate(vocab)}
        indptr = [0]
        ids: list[int] = []
        counts: list[int] = []
        for prof in profiles:
            row = sorted((self.vocabulary[p], c) for p, c in prof.pattern_counts.items())
            ids.extend(i for i, _ in row)
            counts.extend(c for _, c in row)
            indptr.append(len(ids))
        self.feats = np.array(
            [_metric_tuple(prof.features, scaler) for prof in profiles], dtype=np.float64
        ).reshape(-1, 4)
        self.indptr = np.array(indptr, dtype=np.int64)
        self.ids = np.array(ids, dtype=np.int64)
        self.counts = np.array(counts, dtype=np.int64)
        index_cls = backend.CompositeIndex if backend is not None else kernels.CompositeIndex
        self.index = index_cls(self.feats, self.indptr, self.ids, self.counts)

    def __len__(self) -> int:
        return self.feats.shape[0]

    def distance(self, i: int, j: int) -> float:
        return self.index.distance(i, j)

    def neighbors(self, i: int, eps: float) -> np.ndarray:
        return self.index.neighbors(i, eps)

    def matrix(self) -> np.ndarray:
        return self.index.matrix()
