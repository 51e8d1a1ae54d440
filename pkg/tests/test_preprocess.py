from hypothesis import given
from hypothesis import strategies as st

from semtraj.model import HOUR_MS, MINUTE_MS, EventKind, TrajectoryEvent
from semtraj.preprocess import (
    BEFORE_EPOCH_CUTOFF,
    TOO_FEW_POINTS,
    TOO_SHORT_SPAN,
    apply_trajectory_filters,
    extract_journeys,
    filter_impossible,
    preprocess_device,
    split_events,
)

from conftest import T0, at, obs

GAP = 80 * MINUTE_MS


def test_split_overlapping_wap_and_ble():
    wap = obs("A", T0, T0 + 100, oid="wap")
    ble = obs("A", T0 + 10, T0 + 90, oid="ble")
    events = split_events([wap, ble])
    assert [(e.kind, e.timestamp - T0, e.source_observation_id) for e in events] == [
        (EventKind.ENTRY, 0, "wap"),
        (EventKind.ENTRY, 10, "ble"),
        (EventKind.EXIT, 90, "ble"),
        (EventKind.EXIT, 100, "wap"),
    ]


def test_split_empty():
    assert split_events([]) == []


def test_split_zero_length_observation_entry_first():
    events = split_events([obs("A", T0 + 5, T0 + 5)])
    assert [e.kind for e in events] == [EventKind.ENTRY, EventKind.EXIT]


def test_filter_discards_other_location_overlap():
    p1, p2 = obs("A", 0, 100), obs("B", 50, 150)
    kept, dropped = filter_impossible([p1, p2])
    assert kept == [p1] and [d[0] for d in dropped] == [p2]


def test_filter_keeps_same_location_overlap():
    p1, p2 = obs("A", 0, 100), obs("A", 50, 150)
    assert filter_impossible([p1, p2]) == ([p1, p2], [])


def test_filter_touching_boundary_is_kept():
    p1, p2 = obs("A", 0, 100), obs("B", 100, 150)
    assert filter_impossible([p1, p2]) == ([p1, p2], [])


def test_filter_compares_against_last_survivor():
    p1, p2, p3 = obs("A", 0, 100), obs("B", 50, 60), obs("C", 80, 120)
    kept, dropped = filter_impossible([p1, p2, p3])
    assert kept == [p1] and len(dropped) == 2


def events_at(minutes):
    return [TrajectoryEvent(f"o{i}", EventKind.ENTRY, "A", T0 + int(m * MINUTE_MS)) for i, m in enumerate(minutes)]


def test_journeys_split_on_gap_above_threshold():
    journeys = extract_journeys(events_at([0, 30, 120]), GAP)
    assert [[e.timestamp for e in j.events] for j in journeys] == [
        [T0, T0 + 30 * MINUTE_MS],
        [T0 + 120 * MINUTE_MS],
    ]


def test_gap_equal_to_threshold_does_not_split():
    assert len(extract_journeys(events_at([0, 80]), GAP)) == 1


def test_gap_one_ms_over_threshold_splits():
    evs = [TrajectoryEvent("a", EventKind.ENTRY, "A", T0), TrajectoryEvent("b", EventKind.ENTRY, "A", T0 + GAP + 1)]
    assert len(extract_journeys(evs, GAP)) == 2


def test_single_event_journey():
    (j,) = extract_journeys(events_at([0]), GAP)
    assert len(j.events) == 1


gaps = st.lists(st.integers(0, 3 * GAP), min_size=1, max_size=40)


def _chain(steps):
    t, out = T0, []
    for i, s in enumerate(steps):
        t += s
        out.append(TrajectoryEvent(f"o{i}", EventKind.ENTRY, "ABC"[i % 3], t))
    return out


@given(gaps)
def test_journey_partition_property(steps):
    events = _chain(steps)
    journeys = extract_journeys(events, GAP)
    assert [e for j in journeys for e in j.events] == events
    for j in journeys:
        assert all(b.timestamp - a.timestamp <= GAP for a, b in zip(j.events, j.events[1:]))
    for a, b in zip(journeys, journeys[1:]):
        assert b.start - a.end > GAP


@given(gaps)
def test_journey_segmentation_idempotent(steps):
    for j in extract_journeys(_chain(steps), GAP):
        assert extract_journeys(list(j.events), GAP) == [j]


@given(st.lists(st.tuples(st.sampled_from("AB"), st.integers(0, 500), st.integers(0, 300)), max_size=30))
def test_split_conserves_events_and_same_location_never_discarded(raw):
    observations = sorted(
        (obs(loc, s, s + d) for loc, s, d in raw), key=lambda o: (o.entry_time, o.exit_time, o.observation_id)
    )
    kept, dropped = filter_impossible(observations)
    assert len(split_events(kept)) == 2 * len(kept)
    assert len(kept) + len(dropped) == len(observations)
    for o, _ in dropped:
        i = observations.index(o)
        # the survivor it clashed with sits earlier in the list at another location
        prior = [k for k in kept if observations.index(k) < i]
        assert prior and prior[-1].location != o.location


def trajectory(n_events, span_ms, start=None):
    start = T0 if start is None else start
    step = span_ms // max(1, n_events - 1)
    return [
        TrajectoryEvent(f"o{i}", EventKind.ENTRY, "A", start + (span_ms if i == n_events - 1 else i * step))
        for i in range(n_events)
    ]


def test_filter_point_count():
    assert apply_trajectory_filters(trajectory(9, 48 * HOUR_MS)) == TOO_FEW_POINTS
    assert apply_trajectory_filters(trajectory(10, 48 * HOUR_MS)) is None


def test_filter_span():
    assert apply_trajectory_filters(trajectory(50, int(23.9 * HOUR_MS))) == TOO_SHORT_SPAN
    assert apply_trajectory_filters(trajectory(50, int(24.1 * HOUR_MS))) is None


def test_filter_epoch_cutoff_first():
    evs = trajectory(5, HOUR_MS, start=0)  # 1970, also too few and too short
    assert apply_trajectory_filters(evs) == BEFORE_EPOCH_CUTOFF


def test_preprocess_device_end_to_end():
    observations = [obs("A", at(d, 8), at(d, 8, 5)) for d in range(3)] + [
        obs("B", at(d, 8, 30), at(d, 8, 35)) for d in range(3)
    ]
    traj, reason = preprocess_device("d1", observations)
    assert reason is None
    assert [j.location_sequence for j in traj.journeys] == [("A", "B")] * 3
