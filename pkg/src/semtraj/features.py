"""Numeric clustering features and population min-max scaling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DAY_MS, FEATURE_NAMES, FeatureVector


def compute_features(journeys, orls) -> FeatureVector:
    """Average journey duration (ms), journeys per day, locations per journey, journeys per ORL.

    The day span is floored at one day so very short trajectories stay finite.
    """
    if not journeys:
        return FeatureVector(0.0, 0.0, 0.0, 0.0)
    n = len(journeys)
    first = min(j.start for j in journeys)
    last = max(j.end for j in journeys)
    span_days = max((last - first) / DAY_MS, 1.0)
    return FeatureVector(
        avg_journey_duration=sum(j.duration for j in journeys) / n,
        journey_frequency=n / span_days,
        locations_per_journey=sum(len(j.location_sequence) for j in journeys) / n,
        journeys_per_orl=n / max(1, len(orls)),
    )


@dataclass(frozen=True)
class ScalerParams:
    mins: tuple[float, ...]
    maxs: tuple[float, ...]

    def __post_init__(self):
        if len(self.mins) != len(self.maxs):
            raise ValueError("mins and maxs differ in length")
        for lo, hi in zip(self.mins, self.maxs):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
                raise ValueError(f"invalid range ({lo}, {hi})")

    def to_dict(self) -> dict:
        return {name: {"min": lo, "max": hi} for name, lo, hi in zip(FEATURE_NAMES, self.mins, self.maxs)}

    @classmethod
    def from_dict(cls, d) -> ScalerParams:
        return cls(
            tuple(float(d[name]["min"]) for name in FEATURE_NAMES),
            tuple(float(d[name]["max"]) for name in FEATURE_NAMES),
        )


def fit_scaler(vectors) -> ScalerParams:
    vectors = list(vectors)
    if not vectors:
        raise ValueError("cannot fit a scaler on an empty population")
    arr = np.array([v.as_tuple() for v in vectors], dtype=float)
    return ScalerParams(tuple(arr.min(axis=0).tolist()), tuple(arr.max(axis=0).tolist()))


def _scale_value(x: float, lo: float, hi: float) -> float:
    if hi == lo:
        return 0.0
    return min(1.0, max(0.0, (x - lo) / (hi - lo)))


def scale(v: FeatureVector, p: ScalerParams) -> FeatureVector:
    """Map each feature to [0, 1]; values outside the fitted range are clamped."""
    return FeatureVector(*(_scale_value(x, lo, hi) for x, lo, hi in zip(v.as_tuple(), p.mins, p.maxs)))


def scale_matrix(vectors, p: ScalerParams) -> np.ndarray:
    """Row-wise :func:`scale` returning an ``n x 4`` array."""
    return np.array([scale(v, p).as_tuple() for v in vectors], dtype=float).reshape(-1, len(FEATURE_NAMES))
