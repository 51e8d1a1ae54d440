"""Per-consumer processing and the end-to-end run.

A run directory contains::

    manifest.json     parameters, seed, input path and digest
    rejects.csv       malformed input rows
    discarded.csv     trajectories removed by the validity filters
    reports.json      per-consumer labels, ORLs, journey string, condensed list
    features.csv      raw feature values (scatter data)
    scaler.json       min/max used for scaling
    assignment.csv    DBSCAN cluster and role per consumer
    chart.csv         first two principal components with cluster id
    chart.svg         the same as a scatter plot
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import dbscan_packed
from .config import RunConfig, parse_config
from .dataio import ingest, write_csv, write_json, write_rejects
from .features import compute_features, fit_scaler
from .metric import PackedProfiles
from .model import FEATURE_NAMES, ConsumerProfile
from .preprocess import PreprocessConfig, Trajectory, preprocess_device
from .reduce import pca_fit, project, render_chart_svg, write_chart_csv, zscore_normalize
from .semantics import (
    ScoringConfig,
    build_journey_string,
    condense_journeys,
    detect_orls,
    label_home_work,
    pattern_counts,
    score_orls,
)

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage


def _stage(name):
    def wrap(fn):
        def run(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except PipelineError:
                raise
            except Exception as exc:
                raise PipelineError(name, exc) from exc

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def build_profile(trajectory: Trajectory, pre: PreprocessConfig, scoring: ScoringConfig) -> ConsumerProfile:
    events, journeys = trajectory.events, trajectory.journeys
    orls = score_orls(detect_orls(events, pre.min_rest_for_orl), events, journeys, scoring)
    locations = dict.fromkeys(e.location for e in events)
    labels = label_home_work(orls, locations)
    return ConsumerProfile(
        device_id=trajectory.device_id,
        journeys=journeys,
        orls=tuple(orls),
        labels=labels,
        pattern_counts=pattern_counts(journeys, labels),
        features=compute_features(journeys, orls),
    )


def profile_from_observations(device_id, observations, cfg: RunConfig = RunConfig()):
    """Preprocess and label one device; returns ``(profile or None, discard reason)``."""
    trajectory, reason = preprocess_device(device_id, observations, cfg.preprocess())
    if reason is not None:
        return None, reason
    return build_profile(trajectory, cfg.preprocess(), cfg.scoring()), None


def consumer_report(profile: ConsumerProfile, timezone: str) -> dict:
    return {
        "device_id": profile.device_id,
        "home": profile.home,
        "work": profile.work,
        "orls": [
            {
                "location": o.location,
                "durations_hours": o.durations_hours(),
                "home_score": o.home_score,
                "work_score": o.work_score,
            }
            for o in profile.orls
        ],
        "journey_string": build_journey_string(profile.journeys, profile.labels),
        "pattern_counts": dict(sorted(profile.pattern_counts.items())),
        "condensed": [e.to_dict() for e in condense_journeys(profile.journeys, timezone)],
    }


def render_report(report: dict) -> str:
    """Human-readable report in the condensed-journey table style."""
    home = report["home"] or "unlabelled"
    work = report["work"] or "unlabelled"
    lines = [f"device: {report['device_id']}", f"home: {home}, work: {work}"]
    if report["orls"]:
        lines.append("offline rest locations (hours):")
        for o in report["orls"]:
            lines.append(f"  {o['location']}: " + "; ".join(_fmt_hours(h) for h in o["durations_hours"]))
    else:
        lines.append("offline rest locations: none")
    lines.append(f"journey string: {report['journey_string']}")
    lines.append("condensed journeys:")
    for e in report["condensed"]:
        lines.append(f"{' → '.join(e['route'])}  AM ({e['am']}), PM ({e['pm']})")
    return "\n".join(lines) + "\n"


def _fmt_hours(h: float) -> str:
    return f"{h:g}" if h == int(h) else f"{h:.2f}".rstrip("0")


@_stage("preprocess")
def process_devices(by_device, cfg: RunConfig):
    """Returns ``(kept trajectories, [(device_id, reason), ...])``."""
    pre = cfg.preprocess()
    trajectories = []
    discarded = []
    for device_id in sorted(by_device):
        trajectory, reason = preprocess_device(device_id, by_device[device_id], pre)
        if reason is None:
            trajectories.append(trajectory)
        else:
            discarded.append((device_id, reason))
    return trajectories, discarded


def sample_ids(ids, max_n: int, seed: int) -> list:
    """Seeded uniform sample without replacement, returned in input order."""
    ids = list(ids)
    if len(ids) <= max_n:
        return ids
    picked = np.random.default_rng(seed).choice(len(ids), size=max_n, replace=False)
    return [ids[i] for i in sorted(picked.tolist())]


@_stage("semantics")
def _label_all(trajectories, cfg: RunConfig):
    pre, scoring = cfg.preprocess(), cfg.scoring()
    return [build_profile(t, pre, scoring) for t in trajectories]


@_stage("cluster")
def cluster_profiles(profiles, cfg: RunConfig):
    scaler = fit_scaler(p.features for p in profiles)
    packed = PackedProfiles(profiles, scaler)
    return scaler, dbscan_packed(packed, cfg.dbscan())


@_stage("reduce")
def project_profiles(profiles):
    matrix = np.array([p.features.as_tuple() for p in profiles], dtype=float)
    z, _, _ = zscore_normalize(matrix)
    return project(z, pca_fit(z), k=2)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def run_pipeline(cfg: RunConfig, input_path, out_dir, fmt: str = "csv") -> Path:
    """Run every stage and write the run directory; returns its path."""
    input_path = Path(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        digest = _sha256(input_path)
        ingested = ingest(input_path, fmt)
    except Exception as exc:
        raise PipelineError("ingest", exc) from exc
    manifest = {
        "config": cfg.to_dict(),
        "input": str(input_path),
        "input_format": fmt,
        "input_sha256": digest,
        "version": __version__,
    }
    write_json(out / "manifest.json", manifest)
    write_rejects(out / "rejects.csv", ingested.rejects)
    log.info("ingested %d observations, %d rejected", ingested.n_observations, len(ingested.rejects))

    trajectories, discarded = process_devices(ingested.by_device, cfg)
    keep = set(sample_ids([t.device_id for t in trajectories], cfg.MAX_NUM_TRAJECTORIES, cfg.SEED))
    trajectories = [t for t in trajectories if t.device_id in keep]
    write_csv(out / "discarded.csv", ["device_id", "reason"], discarded)

    profiles = _label_all(trajectories, cfg)
    write_json(out / "reports.json", [consumer_report(p, cfg.TIME_ZONE) for p in profiles])
    ids = [p.device_id for p in profiles]
    write_csv(
        out / "features.csv",
        ["device_id", *FEATURE_NAMES],
        [[p.device_id, *(repr(float(x)) for x in p.features.as_tuple())] for p in profiles],
    )
    if not profiles:
        log.warning("no trajectories passed the filters; skipping clustering")
        return out

    scaler, assignment = cluster_profiles(profiles, cfg)
    write_json(out / "scaler.json", scaler.to_dict())
    assignment.write_csv(out / "assignment.csv", ids)
    if len(profiles) >= 2:
        coords = project_profiles(profiles)
        write_chart_csv(out / "chart.csv", ids, coords, assignment.labels)
        (out / "chart.svg").write_text(render_chart_svg(coords, assignment.labels), encoding="utf-8")
    log.info(
        "%d consumers, %d clusters, %d noise", len(profiles), assignment.n_clusters, assignment.n_noise
    )
    return out


def rerun_from_manifest(manifest: dict, out_dir) -> Path:
    return run_pipeline(parse_config(manifest["config"]), manifest["input"], out_dir, manifest.get("input_format", "csv"))


def load_reports(run_dir) -> dict[str, dict]:
    reports = json.loads((Path(run_dir) / "reports.json").read_text(encoding="utf-8"))
    return {r["device_id"]: r for r in reports}


def report_consumer(run_dir, device_id: str) -> str:
    reports = load_reports(run_dir)
    if device_id not in reports:
        raise KeyError(f"unknown device {device_id!r}")
    return render_report(reports[device_id])

