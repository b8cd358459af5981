"""Command line entry point: ``degcpd {detect,simulate,evaluate,experiment,replay}``."""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from ._accel import BACKEND
from .detector import DetectorConfig, load_report, scan
from .evaluation import format_table, match_detections, run_experiment
from .ingest import IngestConfig, bucket_snapshots, parse_edges_with_report, read_allow_list
from .presets import SCENARIOS, preset
from .synthgen import (
    GroundTruth,
    format_snapshot,
    format_stream,
    generate_scenario,
    load_scenario,
)

log = logging.getLogger("degcpd")


class Outputs:
    """Stage output files and publish them only when the run succeeds.

    Files are written under a temporary name and renamed into place on
    ``commit``; on failure every staged file is removed.
    """

    def __init__(self, directory):
        self.directory = directory
        self.staged = {}

    def path(self, name):
        final = os.path.join(self.directory, name)
        tmp = final + ".partial"
        os.makedirs(os.path.dirname(final) or ".", exist_ok=True)
        self.staged[tmp] = final
        return tmp

    def write(self, name, text):
        with open(self.path(name), "w") as fh:
            fh.write(text)

    def commit(self):
        for tmp, final in self.staged.items():
            os.replace(tmp, final)
        return sorted(os.path.relpath(f, self.directory) for f in self.staged.values())

    def discard(self):
        for tmp in self.staged:
            if os.path.exists(tmp):
                os.remove(tmp)


def _ints(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _formats(args):
    return ("json", "csv") if args.format == "both" else (args.format,)


def _detector_config(args, seed):
    return DetectorConfig(
        window_lengths=tuple(args.window_lengths),
        alpha=args.alpha,
        bootstrap_replicates=args.bootstrap,
        min_nodes=args.min_nodes,
        subsample_nodes=args.subsample or None,
        rng_seed=seed,
        null_reference=args.null,
    )


def cmd_detect(args, out):
    origin = "first-event" if args.origin == "first-event" else int(args.origin)
    delimiter = None if args.delimiter in ("ws", "whitespace") else args.delimiter
    allow = read_allow_list(args.allow_list) if args.allow_list else None
    icfg = IngestConfig(
        bucket_seconds=args.bucket_seconds, origin=origin, delimiter=delimiter,
        columns=tuple(args.columns), calendar_months=args.calendar_months, allow_list=allow,
    )
    edges, skips = parse_edges_with_report(args.edge_file, icfg)
    snapshots = bucket_snapshots(edges, icfg)
    report = scan(snapshots, _detector_config(args, args.seed), threads=args.threads)
    if "json" in _formats(args):
        out.write("report.json", report.to_json())
    if "csv" in _formats(args):
        out.write("report.csv", report.to_csv())
    n_empty = sum(s.empty for s in snapshots)
    print(f"{len(snapshots)} snapshots ({n_empty} empty), {len(report.change_points)} change points")
    for c in report.change_points:
        print(f"  boundary {c.boundary_index}: p={c.p_value:.4f} scales={list(c.scales)} ({c.classification})")
    return {
        "inputs": {args.edge_file: _sha256(args.edge_file)},
        "skip_report": {k: v for k, v in vars(skips).items() if k != "first_bad_lines"},
        "detector": report.config.to_dict(),
    }


def cmd_simulate(args, out):
    if args.config:
        spec = load_scenario(args.config)
    else:
        spec = preset(args.preset)[0]
    spec = replace(spec, rng_seed=args.seed)
    snapshots, truth = generate_scenario(spec, threads=args.threads)
    if args.export in ("stream", "both"):
        out.write("stream.csv", format_stream(snapshots, bucket_seconds=args.bucket_seconds))
    if args.export in ("snapshots", "both"):
        for s in snapshots:
            out.write(os.path.join("snapshots", f"snapshot_{s.index:05d}.csv"), format_snapshot(s))
    out.write("ground_truth.json", _dump({"change_indices": list(truth.change_indices)}))
    out.write("scenario.json", _dump(spec.to_dict()))
    print(f"{len(snapshots)} snapshots, {len(truth)} planted changes")
    return {"scenario": spec.to_dict(), "inputs": {args.config: _sha256(args.config)} if args.config else {}}


def cmd_evaluate(args, out):
    report = load_report(args.report)
    with open(args.ground_truth) as fh:
        truth = GroundTruth(tuple(json.load(fh)["change_indices"]))
    res = match_detections(report.detected, truth, args.tolerance)
    if "json" in _formats(args):
        out.write("eval.json", _dump(res.to_dict()))
    if "csv" in _formats(args):
        d = res.to_dict()
        cols = ["true_positives", "false_positives", "false_negatives", "precision", "recall"]
        out.write("eval.csv", ",".join(cols) + "\n" + ",".join(str(d[c]) for c in cols) + "\n")
    d = res.to_dict()
    print(f"precision={d['precision']} recall={d['recall']} "
          f"(TP={res.true_positives} FP={res.false_positives} FN={res.false_negatives})")
    return {"inputs": {args.report: _sha256(args.report), args.ground_truth: _sha256(args.ground_truth)}}


def cmd_experiment(args, out):
    rows = []
    configs = {}
    for name in args.presets:
        spec, dcfg = preset(name)
        dcfg = replace(dcfg, alpha=args.alpha, bootstrap_replicates=args.bootstrap,
                       null_reference=args.null)
        if args.window_lengths:
            dcfg = replace(dcfg, window_lengths=tuple(args.window_lengths))
        res = run_experiment(spec, dcfg, repeats=args.repeats, tolerance=args.tolerance,
                             threads=args.threads, seed=args.seed)
        if "json" in _formats(args):
            out.write(f"experiment_{name}.json", res.to_json())
        if "csv" in _formats(args):
            out.write(f"experiment_{name}.csv", res.to_csv())
        rows.append((name, res))
        configs[name] = dcfg.to_dict()
    table = format_table(rows)
    out.write("table.txt", table + "\n")
    print(table)
    return {"detector": configs}


def build_parser():
    p = argparse.ArgumentParser(prog="degcpd", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default="degcpd-out", help="output directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="master seed (default: fresh entropy, recorded in the manifest)")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--format", choices=("json", "csv", "both"), default="both")
        sp.add_argument("-v", "--verbose", action="store_true")

    def detector_flags(sp, windows_default):
        sp.add_argument("--window-lengths", type=_ints, default=windows_default,
                        help="comma-separated window lengths in snapshots")
        sp.add_argument("--alpha", type=float, default=0.90, help="flag boundaries with p > alpha")
        sp.add_argument("--bootstrap", type=int, default=1000, help="bootstrap replicates")
        sp.add_argument("--null", choices=("two-sample", "to-base"), default="two-sample",
                        help="bootstrap reference distribution")

    d = sub.add_parser("detect", help="scan a timestamped edge list for change points")
    d.add_argument("edge_file")
    d.add_argument("--bucket-seconds", type=int, default=604800)
    d.add_argument("--calendar-months", action="store_true")
    d.add_argument("--origin", default="first-event", help="'first-event' or an epoch timestamp")
    d.add_argument("--delimiter", default=",", help="single character, or 'ws' for whitespace")
    d.add_argument("--columns", type=_ints, default=[0, 1, 2],
                   help="time,source,target column indices")
    d.add_argument("--allow-list", help="file with one permitted node id per line")
    detector_flags(d, [1, 2, 4])
    d.add_argument("--min-nodes", type=int, default=50)
    d.add_argument("--subsample", type=int, default=0, help="node subsample size (0 = off)")
    common(d)

    s = sub.add_parser("simulate", help="generate a synthetic scenario")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", choices=sorted(SCENARIOS))
    g.add_argument("--config", help="scenario JSON file")
    s.add_argument("--export", choices=("stream", "snapshots", "both"), default="stream")
    s.add_argument("--bucket-seconds", type=int, default=604800,
                   help="synthetic timestamp spacing between snapshots")
    common(s)

    e = sub.add_parser("evaluate", help="score a report against ground truth")
    e.add_argument("report")
    e.add_argument("ground_truth")
    e.add_argument("--tolerance", type=int, default=1)
    common(e)

    x = sub.add_parser("experiment", help="repeat a preset and aggregate precision/recall")
    x.add_argument("presets", nargs="+", choices=sorted(SCENARIOS))
    x.add_argument("--repeats", type=int, default=10)
    x.add_argument("--tolerance", type=int, default=1)
    detector_flags(x, None)
    common(x)

    r = sub.add_parser("replay", help="rerun the command recorded in a manifest")
    r.add_argument("manifest")
    r.add_argument("--out", required=True)
    return p


COMMANDS = {
    "detect": cmd_detect,
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
    "experiment": cmd_experiment,
}


def _resolved_argv(argv, seed):
    """argv with the seed made explicit and the output directory removed."""
    out = []
    skip = False
    for i, a in enumerate(argv):
        if skip:
            skip = False
            continue
        if a in ("--out", "--seed"):
            skip = True
            continue
        if a.startswith("--out=") or a.startswith("--seed="):
            continue
        out.append(a)
    return out + ["--seed", str(seed)]


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "replay":
        with open(args.manifest) as fh:
            recorded = json.load(fh)["argv"]
        return main(recorded + ["--out", args.out])

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.seed is None:
        args.seed = int(np.random.SeedSequence().entropy)
    out = Outputs(args.out)
    try:
        extra = COMMANDS[args.command](args, out)
        manifest = {
            "subcommand": args.command,
            "argv": _resolved_argv(argv, args.seed),
            "rng_seed": args.seed,
            "tool_version": __version__,
            "backend": BACKEND,
            "output_dir": os.path.abspath(args.out),
            **extra,
        }
        manifest["outputs"] = sorted(os.path.relpath(f, args.out) for f in out.staged.values()) + [
            "manifest.json"
        ]
        out.write("manifest.json", _dump(manifest))
        out.commit()
    except (ValueError, KeyError, OSError, IndexError) as exc:
        out.discard()
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"degcpd {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
