"""Seeded synthetic wireless observations with a ground-truth manifest.

Each agent draws from its own generator seeded with ``(seed, agent_index)``,
so agents are independent of one another and of generation order.

Archetypes
----------
regular_commuter
    Weekday home -> work mornings and work -> home evenings over a direct
    route, plus the odd weekend leisure trip.
multi_leg_commuter
    Like the regular commuter but passing one or two intermediate stations,
    which become offline rest locations of their own.
shift_worker
    Afternoon shift: leaves home around midday and returns late at night,
    outside both scoring windows.
sporadic_traveller
    A few random trips a week between random stations at random hours.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from datetime import date, datetime, timedelta
from zoneinfo import ZoneInfo

import numpy as np

from .model import MINUTE_MS, BeaconKind, WirelessObservation

ARCHETYPES = ("regular_commuter", "multi_leg_commuter", "shift_worker", "sporadic_traveller")


def default_stations(n: int = 50) -> tuple[str, ...]:
    return tuple(f"S{i:03d}" for i in range(1, n + 1))


@dataclass(frozen=True)
class SynthConfig:
    stations: tuple[str, ...] = field(default_factory=default_stations)
    agents: dict = field(default_factory=lambda: {"regular_commuter": 10})
    days: int = 28
    event_dropout_prob: float = 0.0
    missing_exit_prob: float = 0.0
    blackspot_gap_prob: float = 0.0
    blackspot_max_gap_minutes: float = 20.0
    leisure_prob: float = 0.3
    seed: int = 0
    timezone: str = "Europe/London"
    start_date: str = "2018-01-08"

    def __post_init__(self):
        for name in ("event_dropout_prob", "missing_exit_prob", "blackspot_gap_prob", "leisure_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability, got {p}")
        if self.days < 1:
            raise ValueError("days must be at least 1")
        if not 0 < self.blackspot_max_gap_minutes < 30:
            raise ValueError("black-spot gaps must stay below 30 minutes")
        unknown = set(self.agents) - set(ARCHETYPES)
        if unknown:
            raise ValueError(f"unknown archetypes: {sorted(unknown)}")
        if any(c < 0 for c in self.agents.values()):
            raise ValueError("agent counts must be non-negative")
        if len(set(self.stations)) < 4:
            raise ValueError("need at least four distinct stations")


@dataclass(frozen=True)
class AgentTruth:
    device_id: str
    archetype: str
    home: str | None
    work: str | None
    route: tuple[str, ...]


@dataclass
class _Visit:
    location: str
    entry: int
    exit: int
    kind: BeaconKind = BeaconKind.WAP
    beacon: int = 1


class _Agent:
    """Builds one device's visits day by day."""

    def __init__(self, rng: np.random.Generator, cfg: SynthConfig):
        self.rng = rng
        self.cfg = cfg
        self.zone = ZoneInfo(cfg.timezone)
        self.start = date.fromisoformat(cfg.start_date)
        self.visits: list[_Visit] = []

    def at(self, day: int, minutes: float) -> int:
        d = self.start + timedelta(days=day)
        local = datetime(d.year, d.month, d.day, tzinfo=self.zone) + timedelta(minutes=float(minutes))
        return int(round(local.timestamp() * 1000))

    def weekday(self, day: int) -> int:
        return (self.start + timedelta(days=day)).weekday()

    def uniform(self, lo: float, hi: float) -> float:
        return float(self.rng.uniform(lo, hi))

    def trip(self, route, depart: int) -> None:
        """Visit every station of ``route``; the device leaves the first at ``depart``."""
        rng = self.rng
        entry = depart - int(self.uniform(2, 6) * MINUTE_MS)
        exit_ = depart
        for k, loc in enumerate(route):
            if k > 0:
                entry = exit_ + int(self.uniform(4, 12) * MINUTE_MS)
                exit_ = entry + int(self.uniform(1, 4) * MINUTE_MS)
            self.visits.append(_Visit(loc, entry, exit_, beacon=int(rng.integers(1, 4))))
            if exit_ - entry > 40_000 and rng.random() < 0.2:
                # overlapping BLE detection inside the WAP window
                self.visits.append(_Visit(loc, entry + 10_000, exit_ - 10_000, BeaconKind.BLE, 1))

    def pick(self, pool, k: int = 1, exclude=()):
        choices = [s for s in pool if s not in exclude]
        idx = self.rng.choice(len(choices), size=k, replace=False)
        return [choices[int(i)] for i in idx]


def _commuter(agent: _Agent, route, morning=(6.75, 8.75), evening=(17.0, 19.0)) -> None:
    cfg = agent.cfg
    home, work = route[0], route[-1]
    for day in range(cfg.days):
        if agent.weekday(day) < 5:
            agent.trip(route, agent.at(day, 60 * agent.uniform(*morning)))
            agent.trip(route[::-1], agent.at(day, 60 * agent.uniform(*evening)))
        elif agent.rng.random() < cfg.leisure_prob:
            dest = agent.pick(cfg.stations, exclude=(home, work))[0]
            agent.trip([home, dest], agent.at(day, 60 * agent.uniform(10, 13)))
            agent.trip([dest, home], agent.at(day, 60 * agent.uniform(14.5, 16.5)))


def _sporadic(agent: _Agent) -> None:
    cfg = agent.cfg
    for day in range(cfg.days):
        if agent.rng.random() < 0.3:
            length = int(agent.rng.integers(1, 5))
            route = agent.pick(cfg.stations, k=length)
            agent.trip(route, agent.at(day, 60 * agent.uniform(6, 23)))


def _generate_agent(archetype: str, agent: _Agent):
    stations = agent.cfg.stations
    if archetype == "regular_commuter":
        home, work = agent.pick(stations, k=2)
        route = (home, work)
        _commuter(agent, route)
    elif archetype == "multi_leg_commuter":
        legs = int(agent.rng.integers(1, 3))
        route = tuple(agent.pick(stations, k=2 + legs))
        _commuter(agent, route)
    elif archetype == "shift_worker":
        route = tuple(agent.pick(stations, k=2))
        _commuter(agent, route, morning=(12.0, 14.0), evening=(21.0, 23.0))
    elif archetype == "sporadic_traveller":
        _sporadic(agent)
        return None, None, ()
    else:
        raise ValueError(f"unknown archetype {archetype!r}")
    return route[0], route[-1], route


def _apply_noise(agent: _Agent) -> list[_Visit]:
    cfg, rng = agent.cfg, agent.rng
    visits = sorted(agent.visits, key=lambda v: (v.entry, v.exit, v.location, v.kind.value))
    kept = [v for v in visits if rng.random() >= cfg.event_dropout_prob]

    if cfg.missing_exit_prob > 0:
        merged: list[_Visit] = []
        consumed: set[int] = set()
        for i, v in enumerate(kept):
            if i in consumed:
                continue
            if rng.random() < cfg.missing_exit_prob:
                # exit lost: the next exit at this location gets paired with this entry
                later = next(
                    (j for j in range(i + 1, len(kept)) if j not in consumed and kept[j].location == v.location),
                    None,
                )
                if later is not None:
                    consumed.add(later)
                    v = _Visit(v.location, v.entry, kept[later].exit, v.kind, v.beacon)
            merged.append(v)
        kept = merged

    if cfg.blackspot_gap_prob > 0:
        out = []
        for i, v in enumerate(kept):
            nxt = kept[i + 1].entry if i + 1 < len(kept) else None
            gap = int(rng.uniform(1, cfg.blackspot_max_gap_minutes) * MINUTE_MS)
            tail = v.exit + gap + 2 * MINUTE_MS
            if rng.random() < cfg.blackspot_gap_prob and (nxt is None or tail < nxt):
                # signal lost briefly, then picked up again at the same place
                out.append(v)
                out.append(_Visit(v.location, v.exit + gap, tail, v.kind, v.beacon))
            else:
                out.append(v)
        kept = out
    return kept


def _observations(device_id: str, visits) -> list[WirelessObservation]:
    visits = sorted(visits, key=lambda v: (v.entry, v.exit, v.location, v.kind.value))
    return [
        WirelessObservation(
            device_id=device_id,
            observation_id=f"{device_id}-{k:05d}",
            beacon_id=f"{v.location}-{v.kind.value}-{v.beacon}",
            beacon_kind=v.kind,
            region_id=f"{v.location}-R{v.beacon}",
            location=v.location,
            entry_time=v.entry,
            exit_time=v.exit,
        )
        for k, v in enumerate(visits)
    ]


def agent_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def generate(cfg: SynthConfig):
    """Return ``(observations_by_device, truths)``; deterministic for a given config."""
    by_device: dict[str, list[WirelessObservation]] = {}
    truths: list[AgentTruth] = []
    index = 0
    for archetype in ARCHETYPES:
        for _ in range(cfg.agents.get(archetype, 0)):
            device_id = f"dev{index:05d}"
            agent = _Agent(agent_rng(cfg.seed, index), cfg)
            home, work, route = _generate_agent(archetype, agent)
            by_device[device_id] = _observations(device_id, _apply_noise(agent))
            truths.append(AgentTruth(device_id, archetype, home, work, tuple(route)))
            index += 1
    return by_device, truths


OBSERVATION_HEADER = (
    "device_id",
    "observation_id",
    "beacon_id",
    "beacon_kind",
    "region_id",
    "location",
    "entry_ms",
    "exit_ms",
)


def observations_csv(by_device) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(OBSERVATION_HEADER)
    for device in sorted(by_device):
        for o in by_device[device]:
            w.writerow(
                [o.device_id, o.observation_id, o.beacon_id, o.beacon_kind.value,
                 o.region_id, o.location, o.entry_time, o.exit_time]
            )
    return buf.getvalue()


def manifest_json(cfg: SynthConfig, truths) -> str:
    doc = {
        "config": {**asdict(cfg), "stations": list(cfg.stations)},
        "agents": [
            {**asdict(t), "route": list(t.route)} for t in truths
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# hand-built fixtures mirroring manually inspected trajectory shapes


@dataclass(frozen=True)
class Fixture:
    name: str
    observations: tuple[WirelessObservation, ...]
    truth_home: str | None
    truth_work: str | None
    expected_home: str | None
    expected_work: str | None


def _fixture(name, seed, build, cfg_kwargs, expected=None):
    cfg = SynthConfig(seed=seed, **cfg_kwargs)
    agent = _Agent(agent_rng(seed, 0), cfg)
    home, work = build(agent)
    obs = tuple(_observations(name, _apply_noise(agent)))
    exp_home, exp_work = expected if expected is not None else (home, work)
    return Fixture(name, obs, home, work, exp_home, exp_work)


def _direct(route, **kw):
    def build(agent):
        _commuter(agent, route, **kw)
        return route[0], route[-1]

    return build


def _partial_route(agent):
    # intermediates are seen only some of the time
    route = ("Ravenscourt", "Turnham", "Hammersmith", "Earls Court")
    cfg = agent.cfg
    for day in range(cfg.days):
        if agent.weekday(day) >= 5:
            continue
        seen = [route[0]] + [s for s in route[1:-1] if agent.rng.random() < 0.4] + [route[-1]]
        agent.trip(seen, agent.at(day, 60 * agent.uniform(7, 8.5)))
        agent.trip(seen[::-1], agent.at(day, 60 * agent.uniform(17.5, 19)))
    return route[0], route[-1]


def _ambiguous(agent):
    # few repeated multi-location journeys, many unknown stops, irregular days
    home, work = "Stepney Green", "Plaistow"
    middle = ["Mile End", "Bow Road", "Bromley", "West Ham"]
    for day in range(agent.cfg.days):
        if agent.weekday(day) >= 5 or agent.rng.random() < 0.3:
            continue
        k = int(agent.rng.integers(1, 4))
        stops = [middle[int(i)] for i in sorted(agent.rng.choice(4, size=k, replace=False))]
        agent.trip([home, *stops, work], agent.at(day, 60 * agent.uniform(6.5, 9)))
        agent.trip([work, *stops[::-1], home], agent.at(day, 60 * agent.uniform(17, 20)))
    return home, work


def _odd_hours(agent):
    # night shift: out in the evening, back in the morning
    route = ("Canada Water", "Canary Wharf")
    _commuter(agent, route, morning=(17.5, 19.0), evening=(5.5, 7.0))
    return route


def _insufficient(agent):
    # three journeys through stations that never repeat
    names = iter(f"Once-{i:02d}" for i in range(1, 20))
    for day, length in ((0, 1), (1, 4), (2, 5)):
        route = [next(names) for _ in range(length)]
        agent.trip(route, agent.at(day, 60 * agent.uniform(8, 18)))
    return None, None


def _never_rests(agent):
    # many journeys, every station seen on one visit only
    names = iter(f"Pass-{i:03d}" for i in range(1, 400))
    for day in range(21):
        length = int(agent.rng.integers(1, 10))
        agent.trip([next(names) for _ in range(length)], agent.at(day, 60 * agent.uniform(7, 20)))
    return None, None


def fixture_suite(seed: int = 2018) -> list[Fixture]:
    """Fourteen labelled trajectories: ten recoverable commuters and four problem shapes.

    ``expected_*`` is what a careful manual reading would label. The
    odd-hours fixture is expected to come out reversed.
    """
    quiet = dict(days=28, leisure_prob=0.3)
    return [
        _fixture("commuter_1_direct", seed, _direct(("London Bridge", "Canning Town")), dict(quiet, event_dropout_prob=0.1)),
        _fixture("commuter_2_sparse", seed + 1, _direct(("Bank", "Aldgate East")), dict(quiet, event_dropout_prob=0.3)),
        _fixture("commuter_3_intermediate_orl", seed + 2, _direct(("Highbury", "Holloway Road", "Victoria")), quiet),
        _fixture("commuter_4_partial_route", seed + 3, _partial_route, quiet),
        _fixture(
            "commuter_5_noisy_exits",
            seed + 4,
            _direct(("Brixton", "Stockwell Jn", "Oxford Circus")),
            dict(quiet, missing_exit_prob=0.03, blackspot_gap_prob=0.2),
        ),
        _fixture("problematic_1_ambiguous", seed + 5, _ambiguous, dict(quiet, leisure_prob=0.0)),
        _fixture("problematic_3_odd_hours", seed + 6, _odd_hours, dict(quiet, leisure_prob=0.0)),
        _fixture("problematic_4_insufficient", seed + 7, _insufficient, dict(days=3)),
        _fixture("problematic_5_never_rests", seed + 8, _never_rests, dict(days=21)),
        _fixture("commuter_6_direct", seed + 9, _direct(("Walthamstow", "Green Park")), quiet),
        _fixture("commuter_7_early", seed + 10, _direct(("Epping", "Bank"), morning=(5.5, 6.5)), quiet),
        _fixture("commuter_8_late", seed + 11, _direct(("Ealing", "Holborn"), evening=(19.0, 20.5)), quiet),
        _fixture("commuter_9_two_legs", seed + 12, _direct(("Morden", "Balham", "Stockwell", "Euston")), quiet),
        _fixture(
            "commuter_10_dropout",
            seed + 13,
            _direct(("Stratford", "Liverpool Street")),
            dict(quiet, event_dropout_prob=0.2),
        ),
    ]


def interchange_fixture(seed: int = 2018) -> Fixture:
    """Home station rarely detected; the interchange one stop away is seen every day.

    The pipeline labels the interchange as home, a known weakness of
    ORL-only labelling.
    """

    def build(agent):
        home, hub, work = "Clapham North", "Stockwell", "Green Park"
        for day in range(agent.cfg.days):
            if agent.weekday(day) >= 5:
                continue
            for route, hours in (((home, hub, work), (7, 8.5)), ((work, hub, home), (17.5, 19))):
                before = len(agent.visits)
                agent.trip(route, agent.at(day, 60 * agent.uniform(*hours)))
                # the home platform is almost never picked up
                agent.visits[before:] = [
                    v for v in agent.visits[before:] if v.location != home or agent.rng.random() < 0.1
                ]
        return home, work

    fx = _fixture("problematic_2_interchange", seed + 20, build, dict(days=28))
    return Fixture(fx.name, fx.observations, fx.truth_home, fx.truth_work, "Stockwell", "Green Park")
