"""Domain types shared by every pipeline stage.

All values are frozen dataclasses. Timestamps are epoch milliseconds (UTC),
durations are milliseconds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

MINUTE_MS = 60 * 1000
HOUR_MS = 60 * MINUTE_MS
DAY_MS = 24 * HOUR_MS

# 2000-01-01T00:00Z. The published parameter table lists 946684800 with a
# millisecond unit; that number is the cutoff in seconds.
EARLIEST_VALID_TIMESTAMP_MS = 946_684_800_000
MAX_GAP_IN_JOURNEY_MS = 80 * MINUTE_MS

PATTERN_ALPHABET = frozenset("HWOU")


class BeaconKind(str, enum.Enum):
    WAP = "WAP"
    BLE = "BLE"


class EventKind(str, enum.Enum):
    ENTRY = "Entry"
    EXIT = "Exit"


class LocationLabel(str, enum.Enum):
    HOME = "H"
    WORK = "W"
    OTHER_ORL = "O"
    UNKNOWN = "U"

    @property
    def token(self) -> str:
        return self.value


# validation reasons
ENTRY_AFTER_EXIT = "entry_after_exit"
EMPTY_LOCATION = "empty_location"
BEFORE_EARLIEST_TIMESTAMP = "before_earliest_timestamp"


@dataclass(frozen=True, slots=True)
class WirelessObservation:
    """One raw entry/exit record for a device at one beacon.

    Construction is permissive so malformed rows can be represented and
    rejected by :func:`validate_observation`.
    """

    device_id: str
    observation_id: str
    beacon_id: str
    beacon_kind: BeaconKind
    region_id: str
    location: str
    entry_time: int
    exit_time: int
    phone_model: str = ""

    def to_dict(self) -> dict:
        return {
            "device_id": self.device_id,
            "observation_id": self.observation_id,
            "beacon_id": self.beacon_id,
            "beacon_kind": self.beacon_kind.value,
            "region_id": self.region_id,
            "location": self.location,
            "entry_time": self.entry_time,
            "exit_time": self.exit_time,
            "phone_model": self.phone_model,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> WirelessObservation:
        return cls(
            device_id=d["device_id"],
            observation_id=d["observation_id"],
            beacon_id=d["beacon_id"],
            beacon_kind=BeaconKind(d["beacon_kind"]),
            region_id=d["region_id"],
            location=d["location"],
            entry_time=int(d["entry_time"]),
            exit_time=int(d["exit_time"]),
            phone_model=d.get("phone_model", ""),
        )


def validate_observation(
    obs: WirelessObservation,
    earliest_valid_timestamp: int | None = EARLIEST_VALID_TIMESTAMP_MS,
) -> str | None:
    """Return ``None`` for a well-formed record, otherwise a reason code.

    Pass ``earliest_valid_timestamp=None`` to skip the timestamp cutoff.
    """
    if obs.entry_time > obs.exit_time:
        return ENTRY_AFTER_EXIT
    if not obs.location:
        return EMPTY_LOCATION
    if earliest_valid_timestamp is not None and obs.entry_time < earliest_valid_timestamp:
        return BEFORE_EARLIEST_TIMESTAMP
    return None


@dataclass(frozen=True, slots=True)
class TrajectoryEvent:
    source_observation_id: str
    kind: EventKind
    location: str
    timestamp: int

    def sort_key(self) -> tuple:
        # simultaneous events: Entry before Exit, then observation id
        return (self.timestamp, self.kind is EventKind.EXIT, self.source_observation_id)

    def to_dict(self) -> dict:
        return {
            "source_observation_id": self.source_observation_id,
            "kind": self.kind.value,
            "location": self.location,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> TrajectoryEvent:
        return cls(d["source_observation_id"], EventKind(d["kind"]), d["location"], int(d["timestamp"]))


def merge_repeats(locations) -> tuple[str, ...]:
    """Collapse runs of the same location into one entry."""
    out: list[str] = []
    for loc in locations:
        if not out or out[-1] != loc:
            out.append(loc)
    return tuple(out)


@dataclass(frozen=True, slots=True)
class Journey:
    """A chronological run of events whose consecutive gaps never exceed ``max_gap``."""

    events: tuple[TrajectoryEvent, ...]
    max_gap: int = MAX_GAP_IN_JOURNEY_MS
    location_sequence: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        events = tuple(self.events)
        if not events:
            raise ValueError("a journey needs at least one event")
        for prev, cur in zip(events, events[1:]):
            if cur.timestamp < prev.timestamp:
                raise ValueError("journey events are not chronological")
            if cur.timestamp - prev.timestamp > self.max_gap:
                raise ValueError(
                    f"gap of {cur.timestamp - prev.timestamp} ms exceeds max_gap {self.max_gap} ms"
                )
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "location_sequence", merge_repeats(e.location for e in events))

    @property
    def start(self) -> int:
        return self.events[0].timestamp

    @property
    def end(self) -> int:
        return self.events[-1].timestamp

    @property
    def duration(self) -> int:
        return self.end - self.start

    def to_dict(self) -> dict:
        return {"max_gap": self.max_gap, "events": [e.to_dict() for e in self.events]}

    @classmethod
    def from_dict(cls, d: Mapping) -> Journey:
        return cls(tuple(TrajectoryEvent.from_dict(e) for e in d["events"]), int(d["max_gap"]))


@dataclass(frozen=True, slots=True)
class OfflineRestLocation:
    location: str
    rest_durations: tuple[int, ...]
    home_score: int = 0
    work_score: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rest_durations", tuple(self.rest_durations))
        if self.home_score < 0 or self.work_score < 0:
            raise ValueError("scores must be non-negative")

    @property
    def total_rest(self) -> int:
        return sum(self.rest_durations)

    def durations_hours(self) -> list[float]:
        return [round(d / HOUR_MS, 2) for d in self.rest_durations]

    def to_dict(self) -> dict:
        return {
            "location": self.location,
            "rest_durations": list(self.rest_durations),
            "home_score": self.home_score,
            "work_score": self.work_score,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> OfflineRestLocation:
        return cls(d["location"], tuple(d["rest_durations"]), d["home_score"], d["work_score"])


FEATURE_NAMES = (
    "avg_journey_duration",
    "journey_frequency",
    "locations_per_journey",
    "journeys_per_orl",
)


@dataclass(frozen=True, slots=True)
class FeatureVector:
    avg_journey_duration: float
    journey_frequency: float
    locations_per_journey: float
    journeys_per_orl: float

    def __post_init__(self):
        for name in FEATURE_NAMES:
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (
            self.avg_journey_duration,
            self.journey_frequency,
            self.locations_per_journey,
            self.journeys_per_orl,
        )

    def to_dict(self) -> dict:
        return dict(zip(FEATURE_NAMES, self.as_tuple()))

    @classmethod
    def from_dict(cls, d: Mapping) -> FeatureVector:
        return cls(*(float(d[name]) for name in FEATURE_NAMES))


@dataclass(frozen=True, slots=True)
class ConsumerProfile:
    device_id: str
    journeys: tuple[Journey, ...]
    orls: tuple[OfflineRestLocation, ...]
    labels: Mapping[str, LocationLabel]
    pattern_counts: Mapping[str, int]
    features: FeatureVector

    def __post_init__(self):
        object.__setattr__(self, "journeys", tuple(self.journeys))
        object.__setattr__(self, "orls", tuple(self.orls))
        object.__setattr__(self, "labels", dict(self.labels))
        object.__setattr__(self, "pattern_counts", dict(self.pattern_counts))
        if sum(self.pattern_counts.values()) != len(self.journeys):
            raise ValueError("pattern counts must sum to the number of journeys")
        for pattern, count in self.pattern_counts.items():
            if count < 1 or not pattern or not set(pattern) <= PATTERN_ALPHABET:
                raise ValueError(f"bad pattern entry {pattern!r}: {count}")
        homes = [loc for loc, lab in self.labels.items() if lab is LocationLabel.HOME]
        works = [loc for loc, lab in self.labels.items() if lab is LocationLabel.WORK]
        if len(homes) > 1 or len(works) > 1:
            raise ValueError("at most one home and one work location")

    @property
    def home(self) -> str | None:
        return next((loc for loc, lab in self.labels.items() if lab is LocationLabel.HOME), None)

    @property
    def work(self) -> str | None:
        return next((loc for loc, lab in self.labels.items() if lab is LocationLabel.WORK), None)

    def location_sequence(self) -> tuple[str, ...]:
        """Whole-trajectory location sequence; journey boundaries are ignored."""
        return tuple(loc for j in self.journeys for loc in j.location_sequence)

    def to_dict(self) -> dict:
        return {
            "device_id": self.device_id,
            "journeys": [j.to_dict() for j in self.journeys],
            "orls": [o.to_dict() for o in self.orls],
            "labels": {loc: lab.value for loc, lab in self.labels.items()},
            "pattern_counts": dict(self.pattern_counts),
            "features": self.features.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> ConsumerProfile:
        return cls(
            device_id=d["device_id"],
            journeys=tuple(Journey.from_dict(j) for j in d["journeys"]),
            orls=tuple(OfflineRestLocation.from_dict(o) for o in d["orls"]),
            labels={loc: LocationLabel(v) for loc, v in d["labels"].items()},
            pattern_counts={k: int(v) for k, v in d["pattern_counts"].items()},
            features=FeatureVector.from_dict(d["features"]),
        )
