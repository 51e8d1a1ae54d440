"""Command line interface: ``semtraj <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .cluster import dbscan_packed
from .config import ConfigError, RunConfig, load_config
from .dataio import IngestError, ingest, write_csv, write_json, write_rejects
from .features import fit_scaler
from .metric import PackedProfiles
from .model import FEATURE_NAMES
from .pipeline import (
    PipelineError,
    build_profile,
    consumer_report,
    process_devices,
    project_profiles,
    report_consumer,
    rerun_from_manifest,
    run_pipeline,
)
from .reduce import render_chart_svg, write_chart_csv
from .routesim import top_k_similar, write_ranked_csv
from .synth import SynthConfig, generate, manifest_json, observations_csv

log = logging.getLogger("semtraj")


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, SEED=args.seed)
    if getattr(args, "sample", None) is not None:
        cfg = replace(cfg, MAX_NUM_TRAJECTORIES=args.sample)
    return cfg


def _profiles(args, cfg):
    data = ingest(args.input, args.format)
    trajectories, discarded = process_devices(data.by_device, cfg)
    pre, scoring = cfg.preprocess(), cfg.scoring()
    return data, [build_profile(t, pre, scoring) for t in trajectories], discarded


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_synth(args):
    agents = {}
    for part in args.agents.split(","):
        name, _, count = part.partition("=")
        agents[name.strip()] = int(count)
    cfg = SynthConfig(
        agents=agents,
        days=args.days,
        event_dropout_prob=args.dropout,
        missing_exit_prob=args.missing_exit,
        blackspot_gap_prob=args.blackspot,
        seed=args.seed if args.seed is not None else 0,
    )
    by_device, truths = generate(cfg)
    out = _out(args)
    (out / "observations.csv").write_text(observations_csv(by_device), encoding="utf-8")
    (out / "manifest.json").write_text(manifest_json(cfg, truths), encoding="utf-8")
    print(f"{sum(map(len, by_device.values()))} observations for {len(by_device)} devices -> {out}")


def cmd_ingest(args):
    data = ingest(args.input, args.format)
    out = _out(args)
    write_rejects(out / "rejects.csv", data.rejects)
    write_csv(out / "devices.csv", ["device_id", "observations"], [[d, len(o)] for d, o in data.by_device.items()])
    print(f"{data.n_observations} observations, {len(data.by_device)} devices, {len(data.rejects)} rejected")


def cmd_preprocess(args):
    cfg = _config(args)
    data = ingest(args.input, args.format)
    trajectories, discarded = process_devices(data.by_device, cfg)
    out = _out(args)
    write_json(
        out / "journeys.json",
        {t.device_id: [j.to_dict() for j in t.journeys] for t in trajectories},
    )
    write_csv(out / "discarded.csv", ["device_id", "reason"], discarded)
    print(f"{len(trajectories)} trajectories kept, {len(discarded)} discarded")


def cmd_label(args):
    cfg = _config(args)
    _, profiles, _ = _profiles(args, cfg)
    write_json(_out(args) / "reports.json", [consumer_report(p, cfg.TIME_ZONE) for p in profiles])
    print(f"{len(profiles)} consumers labelled")


def cmd_features(args):
    cfg = _config(args)
    _, profiles, _ = _profiles(args, cfg)
    write_csv(
        _out(args) / "features.csv",
        ["device_id", *FEATURE_NAMES],
        [[p.device_id, *(repr(float(x)) for x in p.features.as_tuple())] for p in profiles],
    )


def cmd_cluster(args):
    cfg = _config(args)
    _, profiles, _ = _profiles(args, cfg)
    scaler = fit_scaler(p.features for p in profiles)
    assignment = dbscan_packed(PackedProfiles(profiles, scaler), cfg.dbscan())
    out = _out(args)
    write_json(out / "scaler.json", scaler.to_dict())
    assignment.write_csv(out / "assignment.csv", [p.device_id for p in profiles])
    print(f"{assignment.n_clusters} clusters, {assignment.n_noise} noise of {len(profiles)}")


def cmd_project(args):
    cfg = _config(args)
    _, profiles, _ = _profiles(args, cfg)
    scaler = fit_scaler(p.features for p in profiles)
    assignment = dbscan_packed(PackedProfiles(profiles, scaler), cfg.dbscan())
    coords = project_profiles(profiles)
    out = _out(args)
    write_chart_csv(out / "chart.csv", [p.device_id for p in profiles], coords, assignment.labels)
    (out / "chart.svg").write_text(render_chart_svg(coords, assignment.labels), encoding="utf-8")


def cmd_report(args):
    sys.stdout.write(report_consumer(args.run, args.device))


def cmd_similar(args):
    cfg = _config(args)
    _, profiles, _ = _profiles(args, cfg)
    target = next((p for p in profiles if p.device_id == args.device), None)
    if target is None:
        raise KeyError(f"unknown or filtered device {args.device!r}")
    ranked = top_k_similar(target, profiles, args.k)
    if args.out:
        write_ranked_csv(_out(args) / "similar.csv", ranked)
    else:
        print("rank,device_id,score")
        for rank, (device, score) in enumerate(ranked, start=1):
            print(f"{rank},{device},{score}")


def cmd_pipeline(args):
    if args.manifest:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        out = rerun_from_manifest(manifest, args.out)
    else:
        if not args.input:
            raise ConfigError("--input or --manifest is required")
        out = run_pipeline(_config(args), args.input, args.out, args.format)
    print(f"run written to {out}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semtraj", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True, out_required=True):
        if needs_input:
            sp.add_argument("--input", required=True, help="observation file")
            sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--config", help="JSON file keyed by parameter names")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--sample", type=int, help="override MAX_NUM_TRAJECTORIES")
        sp.add_argument("--out", required=out_required)

    sp = sub.add_parser("synth", help="generate a synthetic observation corpus")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--agents", default="regular_commuter=100", help="e.g. regular_commuter=90,sporadic_traveller=10")
    sp.add_argument("--days", type=int, default=28)
    sp.add_argument("--dropout", type=float, default=0.0)
    sp.add_argument("--missing-exit", type=float, default=0.0)
    sp.add_argument("--blackspot", type=float, default=0.0)
    sp.set_defaults(func=cmd_synth)

    for name, fn, helptext in (
        ("ingest", cmd_ingest, "parse and validate observations"),
        ("preprocess", cmd_preprocess, "split, filter and segment into journeys"),
        ("label", cmd_label, "detect ORLs and label home/work"),
        ("features", cmd_features, "compute clustering features"),
        ("cluster", cmd_cluster, "DBSCAN on the composite distance"),
        ("project", cmd_project, "PCA chart data"),
    ):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("report", help="print one consumer's report from a run")
    sp.add_argument("--run", required=True)
    sp.add_argument("--device", required=True)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("similar", help="rank trajectories by longest common substring")
    common(sp, out_required=False)
    sp.add_argument("--device", required=True)
    sp.add_argument("--k", type=int, default=5)
    sp.set_defaults(func=cmd_similar)

    sp = sub.add_parser("pipeline", help="run every stage into a run directory")
    sp.add_argument("--input")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--manifest", help="rerun from a previous run's manifest.json")
    common(sp, needs_input=False)
    sp.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (ConfigError, IngestError, PipelineError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
