"""Run configuration keyed by the published parameter names."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from zoneinfo import ZoneInfo

from .cluster import DbscanParams
from .model import EARLIEST_VALID_TIMESTAMP_MS
from .preprocess import PreprocessConfig
from .semantics import ScoringConfig

KEYS = (
    "MAX_TIME_BETWEEN_POINTS_IN_JOURNEY",
    "MIN_TIME_FOR_ORL",
    "MIN_TRAJECTORY_LENGTH",
    "MAX_NUM_TRAJECTORIES",
    "EARLIEST_VALID_TIMESTAMP",
    "MIN_NUM_DAYS_DATA_FOR_VALID_TRAJ",
    "MinPts",
    "Eps",
    "TIME_ZONE",
    "SEED",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    MAX_TIME_BETWEEN_POINTS_IN_JOURNEY: int = 1000 * 60 * 80
    MIN_TIME_FOR_ORL: int = 1000 * 60 * 30
    MIN_TRAJECTORY_LENGTH: int = 10
    MAX_NUM_TRAJECTORIES: int = 10_000
    EARLIEST_VALID_TIMESTAMP: int = EARLIEST_VALID_TIMESTAMP_MS
    MIN_NUM_DAYS_DATA_FOR_VALID_TRAJ: float = 1
    MinPts: int = 10
    Eps: float = 0.04
    TIME_ZONE: str = "Europe/London"
    SEED: int = 0

    def __post_init__(self):
        try:
            self.preprocess()
            self.dbscan()
            ZoneInfo(self.TIME_ZONE)
        except Exception as exc:
            raise ConfigError(str(exc)) from exc
        if self.MAX_NUM_TRAJECTORIES < 1:
            raise ConfigError("MAX_NUM_TRAJECTORIES must be positive")

    def preprocess(self) -> PreprocessConfig:
        return PreprocessConfig(
            max_gap_in_journey=self.MAX_TIME_BETWEEN_POINTS_IN_JOURNEY,
            min_rest_for_orl=self.MIN_TIME_FOR_ORL,
            min_trajectory_length=self.MIN_TRAJECTORY_LENGTH,
            min_days_data=self.MIN_NUM_DAYS_DATA_FOR_VALID_TRAJ,
            earliest_valid_timestamp=self.EARLIEST_VALID_TIMESTAMP,
        )

    def scoring(self) -> ScoringConfig:
        return ScoringConfig(timezone=self.TIME_ZONE)

    def dbscan(self) -> DbscanParams:
        return DbscanParams(eps=self.Eps, min_pts=self.MinPts)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in KEYS}


_PRODUCT = re.compile(r"^\s*\d+(\s*[x*]\s*\d+)*\s*$")


def _integer(key, value) -> int:
    # accepts 4800000 or the "1000 x 60 x 80" product notation
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str) and _PRODUCT.match(value):
        out = 1
        for part in re.split(r"[x*]", value):
            out *= int(part)
        return out
    raise ConfigError(f"{key}: expected an integer, got {value!r}")


def parse_config(doc: dict) -> RunConfig:
    """Build a :class:`RunConfig`; unknown keys are an error."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = sorted(set(doc) - set(KEYS))
    if unknown:
        raise ConfigError(f"unknown configuration keys: {unknown}")
    values = {}
    for key, value in doc.items():
        if key in ("Eps", "MIN_NUM_DAYS_DATA_FOR_VALID_TRAJ"):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{key}: expected a number")
            values[key] = value
        elif key == "TIME_ZONE":
            if not isinstance(value, str):
                raise ConfigError("TIME_ZONE: expected an IANA zone name")
            values[key] = value
        else:
            values[key] = _integer(key, value)
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(doc)

