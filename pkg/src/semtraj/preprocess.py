"""Observation filtering, entry/exit splitting and journey segmentation."""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    DAY_MS,
    EARLIEST_VALID_TIMESTAMP_MS,
    MAX_GAP_IN_JOURNEY_MS,
    MINUTE_MS,
    EventKind,
    Journey,
    TrajectoryEvent,
    WirelessObservation,
)

# discard reasons
IMPOSSIBLE_OVERLAP = "impossible_overlap"
BEFORE_EPOCH_CUTOFF = "before_epoch_cutoff"
TOO_FEW_POINTS = "too_few_points"
TOO_SHORT_SPAN = "too_short_span"


@dataclass(frozen=True)
class PreprocessConfig:
    max_gap_in_journey: int = MAX_GAP_IN_JOURNEY_MS
    min_rest_for_orl: int = 30 * MINUTE_MS
    min_trajectory_length: int = 10
    min_days_data: float = 1
    earliest_valid_timestamp: int = EARLIEST_VALID_TIMESTAMP_MS

    def __post_init__(self):
        for name in (
            "max_gap_in_journey",
            "min_rest_for_orl",
            "min_trajectory_length",
            "min_days_data",
            "earliest_valid_timestamp",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def sort_observations(observations) -> list[WirelessObservation]:
    return sorted(observations, key=lambda o: (o.entry_time, o.exit_time, o.observation_id))


def filter_impossible(observations):
    """Drop observations that would place the device in two locations at once.

    ``observations`` must be sorted by entry time. Each observation is compared
    with the last kept one; an overlap at a different location discards the
    later observation. Overlaps at the same location are kept.

    Returns ``(kept, discarded)`` where ``discarded`` holds
    ``(observation, reason)`` pairs.
    """
    kept: list[WirelessObservation] = []
    discarded: list[tuple[WirelessObservation, str]] = []
    for obs in observations:
        if kept:
            anchor = kept[-1]
            if anchor.exit_time > obs.entry_time and anchor.location != obs.location:
                discarded.append((obs, IMPOSSIBLE_OVERLAP))
                continue
        kept.append(obs)
    return kept, discarded


def split_events(observations) -> list[TrajectoryEvent]:
    """Split each observation into an Entry and an Exit event, chronologically sorted."""
    events = []
    for obs in observations:
        events.append(TrajectoryEvent(obs.observation_id, EventKind.ENTRY, obs.location, obs.entry_time))
        events.append(TrajectoryEvent(obs.observation_id, EventKind.EXIT, obs.location, obs.exit_time))
    events.sort(key=TrajectoryEvent.sort_key)
    return events


def extract_journeys(events, max_gap: int = MAX_GAP_IN_JOURNEY_MS) -> list[Journey]:
    """Greedy segmentation: a gap strictly greater than ``max_gap`` starts a new journey."""
    journeys = []
    current: list[TrajectoryEvent] = []
    for ev in events:
        if current and ev.timestamp - current[-1].timestamp > max_gap:
            journeys.append(Journey(tuple(current), max_gap))
            current = []
        current.append(ev)
    if current:
        journeys.append(Journey(tuple(current), max_gap))
    return journeys


def apply_trajectory_filters(events, config: PreprocessConfig = PreprocessConfig()) -> str | None:
    """Return ``None`` if the trajectory is kept, otherwise the first failing reason.

    Checks run in the order: timestamp cutoff, point count, time span.
    """
    if any(e.timestamp < config.earliest_valid_timestamp for e in events):
        return BEFORE_EPOCH_CUTOFF
    if len(events) < config.min_trajectory_length:
        return TOO_FEW_POINTS
    span = max(e.timestamp for e in events) - min(e.timestamp for e in events)
    if span < config.min_days_data * DAY_MS:
        return TOO_SHORT_SPAN
    return None


@dataclass(frozen=True)
class Trajectory:
    device_id: str
    events: tuple[TrajectoryEvent, ...]
    journeys: tuple[Journey, ...]
    discarded_observations: tuple[tuple[WirelessObservation, str], ...] = ()


def preprocess_device(device_id: str, observations, config: PreprocessConfig = PreprocessConfig()):
    """Run the per-device preprocessing chain.

    Returns ``(trajectory, reason)``; ``reason`` is ``None`` when the
    trajectory passes every filter.
    """
    kept, dropped = filter_impossible(sort_observations(observations))
    events = split_events(kept)
    reason = apply_trajectory_filters(events, config)
    journeys = extract_journeys(events, config.max_gap_in_journey) if reason is None else []
    return Trajectory(device_id, tuple(events), tuple(journeys), tuple(dropped)), reason
