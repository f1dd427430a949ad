"""Command-line entry point.

Subcommands: enumerate, simulate, gen-dataset, eval, synthesize.  Exit
codes: 0 success, 1 usage, 2 validation, 3 runtime failure; failures also
emit one machine-readable JSON line on stderr.  All outputs are
deterministic given identical flags and seed; existing outputs are only
overwritten with --force.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import (backend, graphs, kinematics, metrics, png, raster, sampling,
               synthesis)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


class ValidationError(Exception):
    pass


def _error(kind, message):
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _default_seed():
    env = os.environ.get("LINKFORGE_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ValidationError(f"LINKFORGE_SEED must be an integer, got {env!r}")


def _check_output_file(path, force):
    if os.path.exists(path) and not force:
        raise ValidationError(f"{path} exists; pass --force to overwrite")


def _check_output_dir(path, force):
    if os.path.isdir(path) and os.listdir(path) and not force:
        raise ValidationError(f"{path} is not empty; pass --force to overwrite")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="linkforge",
        description="Planar linkage catalogs, simulation, paired-image "
                    "datasets, evaluation and curve-driven synthesis")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for parallel stages")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("enumerate", help="build the mechanism catalog")
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--seed-kind", choices=graphs.SEED_KINDS, default="revolute")
    p.add_argument("--out", help="catalog output path (JSONL)")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("simulate", help="trace one instance over a cycle")
    p.add_argument("--catalog", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--steps", type=int, default=kinematics.DEFAULT_STEPS)
    p.add_argument("--out", required=True, help="trajectory output path (JSON)")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("gen-dataset", help="generate a paired-image dataset")
    p.add_argument("--catalog", required=True)
    p.add_argument("--graphs", required=True,
                   help="comma-separated graph ids, or a prefix like T2")
    p.add_argument("--per-graph", type=int, required=True)
    p.add_argument("--img", type=int, default=raster.DEFAULT_SIZE)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--steps", type=int, default=kinematics.DEFAULT_STEPS)
    p.add_argument("--split-ratio", type=float, default=0.95)
    p.add_argument("--grayscale-curves", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("eval", help="PSNR report between two image directories")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--manifest", help="restrict ids to a manifest's test split")
    p.add_argument("--task", default="baseline",
                   choices=["synthesis", "analysis", "c2m2c", "baseline"])
    p.add_argument("--out", help="write per-sample records (JSONL)")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("synthesize", help="fit a mechanism to a target curve")
    p.add_argument("--target", required=True, help="curve PNG or trajectory JSON")
    p.add_argument("--dataset", required=True, help="dataset directory")
    p.add_argument("--topk", type=int, default=5)
    p.add_argument("--max-evals", type=int, default=500)
    p.add_argument("--out-prefix", default="synthesized",
                   help="prefix for {prefix}.png/.instance.json/.result.json")
    p.add_argument("--force", action="store_true")
    return parser


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    handler = {
        "enumerate": _cmd_enumerate,
        "simulate": _cmd_simulate,
        "gen-dataset": _cmd_gen_dataset,
        "eval": _cmd_eval,
        "synthesize": _cmd_synthesize,
    }[args.command]
    try:
        return handler(args)
    except ValidationError as exc:
        _error("validation", str(exc))
        return EXIT_VALIDATION
    except (sampling.RejectionCapExceeded, kinematics.InfeasibleCycle,
            metrics.MissingSample, synthesis.EmptyDataset, OSError) as exc:
        _error("runtime", str(exc))
        return EXIT_RUNTIME


def main():
    sys.exit(run(sys.argv[1:]))


def _cmd_enumerate(args):
    if not (0 <= args.layers <= 5):
        raise ValidationError("--layers must be in 0..5")
    if args.out:
        _check_output_file(args.out, args.force)
    catalog = graphs.build_catalog(args.layers, args.seed_kind)
    print(graphs.format_count_report(catalog))
    print(f"total retained graphs: {catalog.total}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(graphs.catalog_to_jsonl(catalog))
        print(f"catalog written to {args.out}")
    return EXIT_OK


def _load_catalog(path):
    if not os.path.exists(path):
        raise ValidationError(f"catalog not found: {path}")
    with open(path, encoding="utf-8") as f:
        return graphs.catalog_from_jsonl(f.read())


def _cmd_simulate(args):
    catalog = _load_catalog(args.catalog)
    try:
        entry = catalog.by_id(args.id)
    except KeyError as exc:
        raise ValidationError(str(exc))
    if not os.path.exists(args.instance):
        raise ValidationError(f"instance file not found: {args.instance}")
    if args.steps < 8:
        raise ValidationError("--steps must be >= 8")
    _check_output_file(args.out, args.force)
    with open(args.instance, encoding="utf-8") as f:
        instance = kinematics.instance_from_dict(json.load(f))
    if instance.graph.layers != entry.graph.layers or \
            instance.graph.seed_kind != entry.graph.seed_kind:
        raise ValidationError(
            f"instance graph does not match catalog entry {args.id}")
    traj = kinematics.trace(instance, args.steps)
    record = {
        "graph_id": args.id,
        "steps": args.steps,
        "points": traj.points.tolist(),
        "speeds": traj.speeds.tolist(),
    }
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(record, f)
    print(f"trajectory written to {args.out}")
    return EXIT_OK


def _select_graph_ids(catalog, spec):
    ids = [e.id for e in catalog.entries]
    chosen = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if token in ids:
            chosen.append(token)
        else:
            matches = [i for i in ids if i.startswith(token + "-")]
            if not matches:
                raise ValidationError(f"no catalog graphs match {token!r}")
            chosen.extend(matches)
    return chosen


def _cmd_gen_dataset(args):
    catalog = _load_catalog(args.catalog)
    graph_ids = _select_graph_ids(catalog, args.graphs)
    if args.per_graph <= 0:
        raise ValidationError("--per-graph must be positive")
    if not (raster.MIN_SIZE <= args.img <= raster.MAX_SIZE):
        raise ValidationError(
            f"--img must be in {raster.MIN_SIZE}..{raster.MAX_SIZE}")
    _check_output_dir(args.out, args.force)
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        config = sampling.SampleConfig(
            per_graph=args.per_graph, image_size=args.img, seed=seed,
            trace_steps=args.steps, split_ratio=args.split_ratio,
            grayscale_curves=args.grayscale_curves)
    except ValueError as exc:
        raise ValidationError(str(exc))
    rows, report = sampling.generate_dataset(
        catalog, graph_ids, config, args.out, workers=max(1, args.workers))
    for graph_id, stats in report.items():
        rate = stats["accepted"] / max(1, stats["attempts"])
        print(f"{graph_id}: accepted {stats['accepted']}/{stats['attempts']} "
              f"attempts ({rate:.1%}); rejections {stats['rejections']}")
    print(f"dataset written to {args.out} ({len(rows)} pairs)")
    return EXIT_OK


def _cmd_eval(args):
    for path in (args.pred, args.gt):
        if not os.path.isdir(path):
            raise ValidationError(f"not a directory: {path}")
    ids = None
    if args.manifest:
        if not os.path.exists(args.manifest):
            raise ValidationError(f"manifest not found: {args.manifest}")
        rows = sampling.load_manifest(args.manifest)
        ids = sorted(r["id"] for r in rows if r["split"] == "test")
    if args.out:
        _check_output_file(args.out, args.force)
    report = metrics.evaluate_pairs(args.pred, args.gt, args.task, ids=ids)
    print(report.summary())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(report.to_records())
    return EXIT_OK


def _cmd_synthesize(args):
    if not os.path.exists(args.target):
        raise ValidationError(f"target not found: {args.target}")
    manifest = os.path.join(args.dataset, "manifest.jsonl")
    if not os.path.exists(manifest):
        raise ValidationError(f"no manifest.jsonl under {args.dataset}")
    for suffix in (".png", ".instance.json", ".result.json"):
        _check_output_file(args.out_prefix + suffix, args.force)
    rows = sampling.load_manifest(manifest)
    index = synthesis.build_index(rows)
    if args.target.endswith(".png"):
        target = png.read(args.target)
    else:
        with open(args.target, encoding="utf-8") as f:
            rec = json.load(f)
        target = (np.asarray(rec["points"]), np.asarray(rec["speeds"]))
    img, instance, result, transform = synthesis.synthesize(
        target, index, topk=args.topk, max_evals=args.max_evals)
    png.write(args.out_prefix + ".png", img)
    with open(args.out_prefix + ".instance.json", "w", encoding="utf-8") as f:
        json.dump(kinematics.instance_to_dict(instance), f)
    with open(args.out_prefix + ".result.json", "w", encoding="utf-8") as f:
        json.dump({
            "initial_chamfer": result.initial_chamfer,
            "final_chamfer": result.final_chamfer,
            "evaluations": result.evaluations,
            "converged": result.converged,
            "transform": transform.to_dict(),
            "backend": backend.NAME,
        }, f, indent=2)
    print(f"final chamfer {result.final_chamfer:.6f} "
          f"(initial {result.initial_chamfer:.6f}, "
          f"{result.evaluations} evaluations)")
    return EXIT_OK
