from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from semtraj.model import HOUR_MS, MINUTE_MS, EventKind, Journey, LocationLabel, OfflineRestLocation, TrajectoryEvent
from semtraj.preprocess import extract_journeys, split_events
from semtraj.semantics import (
    ScoringConfig,
    build_journey_string,
    condense_journeys,
    detect_orls,
    label_home_work,
    local_hour,
    modal_hour,
    pattern_counts,
    score_orls,
)

from conftest import T0, at, obs

H, W, O, U = LocationLabel.HOME, LocationLabel.WORK, LocationLabel.OTHER_ORL, LocationLabel.UNKNOWN
GAP = 80 * MINUTE_MS


def E(loc, t, kind=EventKind.ENTRY, oid="o"):
    return TrajectoryEvent(oid, kind, loc, t)


def X(loc, t):
    return E(loc, t, EventKind.EXIT)


def test_orl_long_rest_with_other_locations_between():
    events = [X("A", T0), E("B", T0 + HOUR_MS), X("B", T0 + 2 * HOUR_MS), E("A", T0 + int(8.4 * HOUR_MS))]
    (orl,) = detect_orls(events)
    assert orl.location == "A"
    assert orl.durations_hours() == [8.4]


def test_orl_short_rest_is_black_spot():
    assert detect_orls([X("A", T0), E("A", T0 + 20 * MINUTE_MS)]) == []


def test_orl_exit_followed_by_exit_records_nothing():
    assert detect_orls([X("A", T0), X("A", T0 + 5 * HOUR_MS)]) == []


def test_orl_threshold_is_strict():
    assert detect_orls([X("A", T0), E("A", T0 + 30 * MINUTE_MS)]) == []
    assert len(detect_orls([X("A", T0), E("A", T0 + 30 * MINUTE_MS + 1)])) == 1


def commute(days, home="A", work="B", dep=8, ret=18):
    observations = []
    for d in range(days):
        observations += [
            obs(home, at(d, dep - 0.25), at(d, dep)),
            obs(work, at(d, dep, 30), at(d, dep, 40)),
            obs(work, at(d, ret), at(d, ret, 10)),
            obs(home, at(d, ret, 40), at(d, ret, 50)),
        ]
    events = split_events(observations)
    return events, extract_journeys(events, GAP)


def test_scoring_home_window_gain():
    events, journeys = commute(5)
    orls = score_orls(detect_orls(events), events, journeys)
    scores = {o.location: (o.home_score, o.work_score) for o in orls}
    # departs at 8 and arrives at 18: +6 home from windows, +2 +2 bonuses
    assert scores["A"] == (10, 4)
    assert scores["B"] == (4, 10)


def test_scoring_single_orl_gets_both_bonuses():
    events = [X("A", T0), E("A", T0 + 2 * HOUR_MS)]
    (orl,) = score_orls(detect_orls(events), events, [])
    assert (orl.home_score, orl.work_score) == (4, 4)


def test_modal_hour_tie_goes_early():
    assert modal_hour([9, 7, 9, 7]) == 7
    assert modal_hour([]) is None


def test_label_commuter():
    events, journeys = commute(5)
    labels = label_home_work(score_orls(detect_orls(events), events, journeys), ["A", "B", "C"])
    assert labels == {"A": H, "B": W, "C": U}


def test_label_mirror_night_shift():
    events, journeys = commute(5, dep=18, ret=8)
    labels = label_home_work(score_orls(detect_orls(events), events, journeys))
    # leaving at 18 and coming back at 8 looks like work: the reversed label
    assert labels == {"A": W, "B": H}


def test_label_no_orls():
    assert label_home_work([], ["A"]) == {"A": U}


def test_label_single_orl_home_only():
    labels = label_home_work([OfflineRestLocation("A", (HOUR_MS,), 1, 1)], ["A", "B"])
    assert labels == {"A": H, "B": U}


def test_label_tie_broken_by_rest_then_name():
    a = OfflineRestLocation("A", (HOUR_MS,), 4, 4)
    b = OfflineRestLocation("B", (2 * HOUR_MS,), 4, 4)
    c = OfflineRestLocation("C", (HOUR_MS,), 4, 4)
    labels = label_home_work([a, b, c])
    assert labels == {"B": H, "A": W, "C": O}


@given(st.lists(st.tuples(st.integers(0, 10), st.integers(0, 10), st.integers(1, 10)), min_size=1, max_size=8),
       st.integers(2, 50))
def test_labels_invariant_to_rest_scaling(raw, factor):
    orls = [OfflineRestLocation(f"L{i}", (r * HOUR_MS,), h, w) for i, (h, w, r) in enumerate(raw)]
    scaled = [replace(o, rest_durations=tuple(d * factor for d in o.rest_durations)) for o in orls]
    labels = label_home_work(orls)
    assert labels == label_home_work(scaled)
    assert list(labels.values()).count(H) == 1
    assert list(labels.values()).count(W) == (1 if len(orls) > 1 else 0)


def J(*locs, start=T0):
    return Journey(tuple(E(loc, start + i * MINUTE_MS) for i, loc in enumerate(locs)))


def test_journey_string_tokens():
    labels = {"A": H, "X": U, "B": W}
    assert build_journey_string([J("A", "X", "B")], labels) == "HUW"
    assert build_journey_string([], labels) == ""
    assert build_journey_string([J("A"), J("A", "B")], labels) == "H|HW"


def test_pattern_counts_match_journeys():
    labels = {"A": H, "B": W}
    journeys = [J("A", "B"), J("B", "A"), J("A", "B"), J("C")]
    assert pattern_counts(journeys, labels) == {"HW": 2, "WH": 1, "U": 1}


def test_condense_am_pm():
    journeys = [J("A", "B", start=at(0, 8)), J("A", "B", start=at(1, 8)), J("A", "B", start=at(2, 18))]
    (entry,) = condense_journeys(journeys)
    assert entry.to_dict() == {"route": ["A", "B"], "am": 2, "pm": 1}


def test_condense_noon_is_pm():
    (entry,) = condense_journeys([J("A", start=at(0, 12))])
    assert (entry.am_count, entry.pm_count) == (0, 1)
    assert condense_journeys([]) == []


def test_condense_order_total_then_first_seen():
    journeys = [J("C", start=at(0, 7)), J("B", start=at(0, 9)), J("B", start=at(1, 9)), J("A", start=at(2, 9))]
    assert [e.route for e in condense_journeys(journeys)] == [("B",), ("C",), ("A",)]


def test_local_hour_follows_british_summer_time():
    july = T0 + 180 * 24 * HOUR_MS
    assert local_hour(july + 7 * HOUR_MS) == 8
    assert local_hour(T0 + 7 * HOUR_MS) == 7


def test_scoring_config_validation():
    with pytest.raises(ValueError):
        ScoringConfig(evening_window=(8, 12))
    with pytest.raises(ValueError):
        ScoringConfig(window_score=0)
