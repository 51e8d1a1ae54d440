from datetime import datetime, timezone

import pytest

from semtraj import _pykernels, kernels
from semtraj.model import HOUR_MS, MINUTE_MS, BeaconKind, WirelessObservation

# Monday 2018-01-08 00:00 UTC; London is on GMT in January, so local hour == UTC hour
T0 = int(datetime(2018, 1, 8, tzinfo=timezone.utc).timestamp() * 1000)

BACKENDS = [_pykernels]
try:
    from semtraj import _ckernels

    BACKENDS.append(_ckernels)
except ImportError:  # extension not built
    pass


def at(day=0, hour=0.0, minute=0.0) -> int:
    return T0 + day * 24 * HOUR_MS + int(hour * HOUR_MS) + int(minute * MINUTE_MS)


def obs(location, entry, exit_, oid=None, device="d1", kind=BeaconKind.WAP):
    obs.counter += 1
    return WirelessObservation(
        device_id=device,
        observation_id=oid or f"o{obs.counter:06d}",
        beacon_id=f"{location}-b",
        beacon_kind=kind,
        region_id=f"{location}-r",
        location=location,
        entry_time=entry,
        exit_time=exit_,
    )


obs.counter = 0


@pytest.fixture(scope="module", params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def backend(request):
    return request.param


@pytest.fixture
def active_backend():
    return kernels.BACKEND


# acceptance outcomes, one line each, shown in the terminal summary
ACCEPTANCE: dict[int, str] = {}


def record_acceptance(number: int, ok: bool, title: str, detail: str) -> None:
    ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}  ({detail})"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
