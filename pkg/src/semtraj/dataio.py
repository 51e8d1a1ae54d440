"""Observation ingestion (CSV or JSON) and small writers."""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .model import BeaconKind, WirelessObservation, validate_observation

HEADER = (
    "device_id",
    "observation_id",
    "beacon_id",
    "beacon_kind",
    "region_id",
    "location",
    "entry_ms",
    "exit_ms",
)
OPTIONAL = ("phone_model",)


class IngestError(Exception):
    pass


@dataclass
class IngestResult:
    by_device: dict[str, list[WirelessObservation]] = field(default_factory=dict)
    rejects: list[tuple[int, dict, str]] = field(default_factory=list)

    @property
    def n_observations(self) -> int:
        return sum(len(v) for v in self.by_device.values())


def _parse_row(row: dict) -> WirelessObservation:
    return WirelessObservation(
        device_id=row["device_id"],
        observation_id=row["observation_id"],
        beacon_id=row["beacon_id"],
        beacon_kind=BeaconKind(row["beacon_kind"]),
        region_id=row["region_id"],
        location=row["location"],
        entry_time=int(row["entry_ms"]),
        exit_time=int(row["exit_ms"]),
        phone_model=row.get("phone_model") or "",
    )


def _rows_csv(path: Path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return
        missing = [c for c in HEADER if c not in reader.fieldnames]
        if missing:
            raise IngestError(f"{path}: missing columns {missing}")
        for line, row in enumerate(reader, start=2):
            yield line, row


def _rows_json(path: Path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise IngestError(f"{path}: expected a JSON array of observation objects")
    for i, row in enumerate(doc, start=1):
        yield i, row if isinstance(row, dict) else {}


def ingest(path, fmt: str = "csv") -> IngestResult:
    """Parse observations and group the valid ones by device.

    Malformed rows are collected with a reason instead of raising. The
    timestamp cutoff is not applied here; it removes whole trajectories later.
    """
    path = Path(path)
    if fmt not in ("csv", "json"):
        raise IngestError(f"unknown format {fmt!r}")
    try:
        rows = list(_rows_csv(path) if fmt == "csv" else _rows_json(path))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc

    result = IngestResult()
    grouped: dict[str, list[WirelessObservation]] = defaultdict(list)
    for line, row in rows:
        if any(row.get(c) is None for c in HEADER) or None in row:
            result.rejects.append((line, row, "wrong_field_count"))
            continue
        try:
            obs = _parse_row({k: (str(v) if k != "phone_model" else v) for k, v in row.items()})
        except ValueError as exc:
            reason = "bad_beacon_kind" if "BeaconKind" in str(exc) else "bad_integer"
            result.rejects.append((line, row, reason))
            continue
        reason = validate_observation(obs, earliest_valid_timestamp=None)
        if reason is not None:
            result.rejects.append((line, row, reason))
            continue
        grouped[obs.device_id].append(obs)
    result.by_device = {d: grouped[d] for d in sorted(grouped)}
    return result


def write_rejects(path, rejects) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["line", "reason", *HEADER])
        for line, row, reason in rejects:
            w.writerow([line, reason, *(row.get(c, "") for c in HEADER)])


def write_json(path, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
