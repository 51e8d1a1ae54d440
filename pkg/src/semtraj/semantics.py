"""Offline rest locations, home/work labelling and journey pattern rendering."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from datetime import datetime
from functools import lru_cache
from zoneinfo import ZoneInfo

from .model import (
    MINUTE_MS,
    EventKind,
    LocationLabel,
    OfflineRestLocation,
)

DEFAULT_TIMEZONE = "Europe/London"


@dataclass(frozen=True)
class ScoringConfig:
    """Hour windows are half-open ``[start, end)`` in local time."""

    evening_window: tuple[int, int] = (17, 21)
    morning_window: tuple[int, int] = (5, 10)
    window_score: int = 3
    duration_score: int = 2
    frequency_score: int = 2
    timezone: str = DEFAULT_TIMEZONE

    def __post_init__(self):
        (e0, e1), (m0, m1) = self.evening_window, self.morning_window
        if not (0 <= e0 < e1 <= 24 and 0 <= m0 < m1 <= 24):
            raise ValueError("windows must be valid hour ranges")
        if e0 < m1 and m0 < e1:
            raise ValueError("evening and morning windows overlap")
        if min(self.window_score, self.duration_score, self.frequency_score) <= 0:
            raise ValueError("scores must be positive")
        ZoneInfo(self.timezone)


@dataclass(frozen=True)
class CondensedJourneyEntry:
    route: tuple[str, ...]
    am_count: int
    pm_count: int

    @property
    def total(self) -> int:
        return self.am_count + self.pm_count

    def to_dict(self) -> dict:
        return {"route": list(self.route), "am": self.am_count, "pm": self.pm_count}


@lru_cache(maxsize=None)
def _zone(name: str) -> ZoneInfo:
    return ZoneInfo(name)


def local_hour(timestamp_ms: int, timezone: str = DEFAULT_TIMEZONE) -> int:
    return datetime.fromtimestamp(timestamp_ms / 1000, _zone(timezone)).hour


def detect_orls(events, min_rest: int = 30 * MINUTE_MS) -> list[OfflineRestLocation]:
    """Find locations where an Exit is followed by an Entry at the same place after ``min_rest``.

    ORLs are returned in order of first appearance in the trajectory.
    """
    by_location: dict[str, list] = defaultdict(list)
    for ev in events:
        by_location[ev.location].append(ev)
    orls = []
    for location, evs in by_location.items():
        rests = [
            cur.timestamp - prev.timestamp
            for prev, cur in zip(evs, evs[1:])
            if prev.kind is EventKind.EXIT
            and cur.kind is EventKind.ENTRY
            and cur.timestamp - prev.timestamp > min_rest
        ]
        if rests:
            orls.append(OfflineRestLocation(location, tuple(rests)))
    return orls


def _run_bounds(journey):
    """Departure and arrival events of a multi-location journey.

    Departure is the last Exit of the opening location run, arrival the first
    Entry of the closing run (falling back to the run's boundary event when
    the wanted kind was not recorded).
    """
    events = journey.events
    first_loc, last_loc = journey.location_sequence[0], journey.location_sequence[-1]
    i = 0
    while i < len(events) and events[i].location == first_loc:
        i += 1
    head = events[:i]
    j = len(events)
    while j > 0 and events[j - 1].location == last_loc:
        j -= 1
    tail = events[j:]
    depart = next((e for e in reversed(head) if e.kind is EventKind.EXIT), head[-1])
    arrive = next((e for e in tail if e.kind is EventKind.ENTRY), tail[0])
    return depart, arrive


def modal_hour(hours) -> int | None:
    """Most frequent hour; ties go to the earliest hour."""
    counts = Counter(hours)
    if not counts:
        return None
    return min(counts, key=lambda h: (-counts[h], h))


def _in(hour, window) -> bool:
    return hour is not None and window[0] <= hour < window[1]


def score_orls(orls, events, journeys, cfg: ScoringConfig = ScoringConfig()) -> list[OfflineRestLocation]:
    """Populate home and work scores.

    Departure hours come from journeys that start at the ORL, arrival hours
    from journeys that end there; single-location journeys carry no direction
    and are ignored for the time windows.
    """
    departures: dict[str, list[int]] = defaultdict(list)
    arrivals: dict[str, list[int]] = defaultdict(list)
    for journey in journeys:
        if len(journey.location_sequence) < 2:
            continue
        depart, arrive = _run_bounds(journey)
        departures[depart.location].append(local_hour(depart.timestamp, cfg.timezone))
        arrivals[arrive.location].append(local_hour(arrive.timestamp, cfg.timezone))

    event_counts = Counter(ev.location for ev in events)
    scored = []
    for orl in orls:
        home = work = 0
        dep = modal_hour(departures[orl.location])
        arr = modal_hour(arrivals[orl.location])
        if _in(dep, cfg.evening_window):
            work += cfg.window_score
        if _in(arr, cfg.morning_window):
            work += cfg.window_score
        if _in(arr, cfg.evening_window):
            home += cfg.window_score
        if _in(dep, cfg.morning_window):
            home += cfg.window_score
        scored.append(replace(orl, home_score=home, work_score=work))

    by_rest = sorted(scored, key=lambda o: (-o.total_rest, o.location))[:2]
    by_use = sorted(scored, key=lambda o: (-event_counts[o.location], -o.total_rest, o.location))[:2]
    bonus: Counter = Counter()
    for o in by_rest:
        bonus[o.location] += cfg.duration_score
    for o in by_use:
        bonus[o.location] += cfg.frequency_score
    return [
        replace(o, home_score=o.home_score + bonus[o.location], work_score=o.work_score + bonus[o.location])
        for o in scored
    ]


def label_home_work(orls, locations=()) -> dict[str, LocationLabel]:
    """Label every location H, W, O or U from scored ORLs.

    Ties on score go to the larger total rest duration, then the
    lexicographically smaller location name.
    """
    labels = {loc: LocationLabel.UNKNOWN for loc in locations}
    if not orls:
        return labels
    for o in orls:
        labels[o.location] = LocationLabel.OTHER_ORL
    home = min(orls, key=lambda o: (-o.home_score, -o.total_rest, o.location))
    labels[home.location] = LocationLabel.HOME
    rest = [o for o in orls if o.location != home.location]
    if rest:
        work = min(rest, key=lambda o: (-o.work_score, -o.total_rest, o.location))
        labels[work.location] = LocationLabel.WORK
    return labels


def journey_pattern(journey, labels) -> str:
    return "".join(labels.get(loc, LocationLabel.UNKNOWN).value for loc in journey.location_sequence)


def pattern_counts(journeys, labels) -> dict[str, int]:
    return dict(Counter(journey_pattern(j, labels) for j in journeys))


def build_journey_string(journeys, labels) -> str:
    """``"H|HW|WUH"`` style rendering: one token per location, ``|`` between journeys."""
    return "|".join(journey_pattern(j, labels) for j in journeys)


def condense_journeys(journeys, timezone: str = DEFAULT_TIMEZONE) -> list[CondensedJourneyEntry]:
    """Group journeys by route and count AM (local hour < 12) and PM starts."""
    counts: dict[tuple[str, ...], list[int]] = {}
    for journey in journeys:
        slot = counts.setdefault(journey.location_sequence, [0, 0])
        slot[0 if local_hour(journey.start, timezone) < 12 else 1] += 1
    order = {route: i for i, route in enumerate(counts)}
    entries = [CondensedJourneyEntry(route, am, pm) for route, (am, pm) in counts.items()]
    entries.sort(key=lambda e: (-e.total, order[e.route]))
    return entries
