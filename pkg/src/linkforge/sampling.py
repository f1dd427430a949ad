"""Random instance sampling and paired-image dataset generation.

Every attempt is seeded by hash(global seed, graph id, attempt index), so
results do not depend on evaluation order or worker count: the dataset is
the first `per_graph` accepted attempts in attempt order, whichever process
evaluated them.  An attempt is accepted when the full cycle assembles, the
curve's bounding box is not degenerate, and no node leaves 3x the canvas.
"""

import hashlib
import json
import math
import multiprocessing
import os
from collections import Counter
from dataclasses import asdict, dataclass

import numpy as np

from . import kinematics, png, raster
from .graphs import MechanismGraph
from .kinematics import DyadParams, InfeasibleCycle, LinkageInstance

CANVAS_HALF = 1.0  # nominal canvas is [-1, 1]^2


class Rejected(Exception):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class RejectionCapExceeded(Exception):
    def __init__(self, graph_id, accepted, attempts):
        super().__init__(
            f"graph {graph_id}: only {accepted} accepted in {attempts} attempts")
        self.graph_id = graph_id
        self.accepted = accepted
        self.attempts = attempts


@dataclass(frozen=True)
class SampleConfig:
    per_graph: int = 100
    length_range: tuple = (0.1, 0.9)
    pivot_half_extent: float = 0.5  # pivots drawn in [-e, e]^2
    trace_steps: int = 360
    image_size: int = 128
    margin: float = 0.05
    seed: int = 0
    rejection_cap: int = 1000  # max attempts = per_graph * rejection_cap
    split_ratio: float = 0.95
    grayscale_curves: bool = False
    bbox_min_fraction: float = 0.05  # of canvas side
    bounds_factor: float = 3.0

    def __post_init__(self):
        if not (0.0 < self.length_range[0] < self.length_range[1]):
            raise ValueError("length range must be positive and ordered")
        if not (0.0 <= self.margin <= 0.25):
            raise ValueError("margin must be in [0, 0.25]")
        if not (0.0 < self.split_ratio < 1.0):
            raise ValueError("split ratio must be in (0, 1)")


def _attempt_rng(seed, graph_id, index):
    digest = hashlib.sha256(f"{seed}|{graph_id}|{index}".encode()).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest[:16], "big")))


def draw_instance(graph, seed, graph_id, index, config):
    """Deterministic parameter draw for one attempt (no validity checks)."""
    rng = _attempt_rng(seed, graph_id, index)
    e = config.pivot_half_extent
    lo, hi = config.length_range
    ax, ay = rng.uniform(-e, e), rng.uniform(-e, e)
    if graph.seed_kind == "slider":
        fixed_b = None
        rail_o = (rng.uniform(-e, e), rng.uniform(-e, e))
        ang = rng.uniform(0.0, math.pi)
        rail = (rail_o, (math.cos(ang), math.sin(ang)))
        rod_length = rng.uniform(lo, hi)
        rod_sign = float(rng.integers(0, 2) * 2 - 1)
    else:
        fixed_b = (rng.uniform(-e, e), rng.uniform(-e, e))
        rail, rod_length, rod_sign = None, None, 1.0
    crank_length = rng.uniform(lo, hi)
    crank_phase = rng.uniform(0.0, math.tau)
    params = tuple(
        DyadParams(rng.uniform(lo, hi), rng.uniform(lo, hi),
                   float(rng.integers(0, 2) * 2 - 1))
        for _ in range(graph.k))
    return LinkageInstance(
        graph=graph, fixed_a=(ax, ay), fixed_b=fixed_b,
        crank_length=crank_length, crank_phase=crank_phase,
        node_params=params, rail=rail, rod_length=rod_length, rod_sign=rod_sign)


def sample_instance(graph, seed, graph_id, index, config):
    """One validated attempt.

    Returns (instance, sweep positions, trajectory); raises Rejected with a
    reason when the draw is unusable.
    """
    instance = draw_instance(graph, seed, graph_id, index, config)
    try:
        positions = kinematics.sweep(instance, config.trace_steps)
    except InfeasibleCycle:
        raise Rejected("infeasible cycle") from None
    bound = config.bounds_factor * CANVAS_HALF
    if float(np.abs(positions).max()) > bound:
        raise Rejected("out of bounds")
    traj = kinematics.trajectory_from_sweep(graph, positions)
    w = float(traj.points[:, 0].max() - traj.points[:, 0].min())
    h = float(traj.points[:, 1].max() - traj.points[:, 1].min())
    if min(w, h) < config.bbox_min_fraction * 2.0 * CANVAS_HALF:
        raise Rejected("degenerate curve")
    return instance, positions, traj


def split_tag(sample_id, ratio, seed):
    digest = hashlib.sha256(f"split|{seed}|{sample_id}".encode()).digest()
    frac = int.from_bytes(digest[:8], "big") / 2.0 ** 64
    return "train" if frac < ratio else "test"


def split(rows, ratio, seed):
    """Stable hash partition of manifest rows into (train, test)."""
    if not (0.0 < ratio < 1.0):
        raise ValueError("ratio must be in (0, 1)")
    train = [r for r in rows if split_tag(r["id"], ratio, seed) == "train"]
    test = [r for r in rows if split_tag(r["id"], ratio, seed) == "test"]
    return train, test


def _evaluate_attempt(args):
    """Worker body: draw, validate and render one attempt."""
    seed_kind, layers, graph_id, index, config = args
    graph = MechanismGraph(seed_kind, layers)
    try:
        instance, positions, traj = sample_instance(
            graph, config.seed, graph_id, index, config)
    except Rejected as exc:
        return index, None, exc.reason
    transform = raster.fit_transform(raster.sweep_bbox(positions),
                                     config.image_size, config.margin)
    curve_img = raster.render_curve(traj, transform, config.image_size,
                                    grayscale=config.grayscale_curves)
    mech_img = raster.render_mechanism(instance, 0.0, transform, config.image_size)
    payload = {
        "instance": kinematics.instance_to_dict(instance),
        "points": traj.points.tolist(),
        "speeds": traj.speeds.tolist(),
        "transform": transform.to_dict(),
        "speed_min": float(traj.speeds.min()),
        "speed_max": float(traj.speeds.max()),
        "curve_png": png.encode(curve_img),
        "mech_png": png.encode(mech_img),
    }
    return index, payload, None


def generate_dataset(catalog, graph_ids, config, out_dir, workers=1):
    """Generate per_graph accepted pairs per graph and write the dataset.

    Layout: out_dir/curves/{id}.png, out_dir/mechs/{id}.png,
    out_dir/manifest.jsonl (one sample per line), out_dir/meta.json
    (config echo, split counts, per-graph acceptance report).
    Returns (manifest rows, acceptance report).
    """
    os.makedirs(os.path.join(out_dir, "curves"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "mechs"), exist_ok=True)
    pool = multiprocessing.Pool(workers) if workers > 1 else None
    rows = []
    report = {}
    try:
        for graph_id in graph_ids:
            entry = catalog.by_id(graph_id)
            accepted, reasons = _generate_for_graph(
                entry, config, out_dir, pool, workers)
            rows.extend(accepted)
            report[graph_id] = {
                "accepted": len(accepted),
                "attempts": reasons["__attempts__"],
                "rejections": {k: v for k, v in reasons.items()
                               if k != "__attempts__"},
            }
        manifest_path = os.path.join(out_dir, "manifest.jsonl")
        with open(manifest_path, "w", encoding="utf-8") as f:
            for row in rows:
                f.write(json.dumps(row, separators=(",", ":")) + "\n")
        meta = {
            "config": asdict(config),
            "graphs": list(graph_ids),
            "split_counts": dict(Counter(r["split"] for r in rows)),
            "acceptance": report,
        }
        with open(os.path.join(out_dir, "meta.json"), "w", encoding="utf-8") as f:
            json.dump(meta, f, indent=2, sort_keys=True)
    except BaseException:
        # never leave a partial manifest behind
        partial = os.path.join(out_dir, "manifest.jsonl")
        if os.path.exists(partial):
            os.remove(partial)
        raise
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return rows, report


def _generate_for_graph(entry, config, out_dir, pool, workers):
    graph_id = entry.id
    layers = entry.graph.layers
    seed_kind = entry.graph.seed_kind
    max_attempts = config.per_graph * config.rejection_cap
    chunk = max(64, workers * 32)
    accepted = []
    reasons = Counter()
    attempt = 0
    consumed = 0  # attempts actually needed: index of last acceptance + 1
    while len(accepted) < config.per_graph and attempt < max_attempts:
        hi = min(attempt + chunk, max_attempts)
        args = [(seed_kind, layers, graph_id, i, config) for i in range(attempt, hi)]
        results = pool.map(_evaluate_attempt, args) if pool is not None \
            else [_evaluate_attempt(a) for a in args]
        results.sort(key=lambda r: r[0])
        for index, payload, reason in results:
            if len(accepted) >= config.per_graph:
                break
            if payload is None:
                reasons[reason] += 1
                continue
            rank = len(accepted)
            accepted.append(_finalize_sample(
                graph_id, rank, index, payload, config, out_dir))
            consumed = index + 1
        attempt = hi
    if len(accepted) < config.per_graph:
        reasons["__attempts__"] = attempt
        raise RejectionCapExceeded(graph_id, len(accepted), attempt)
    reasons["__attempts__"] = consumed
    return accepted, reasons


def _finalize_sample(graph_id, rank, attempt_index, payload, config, out_dir):
    sample_id = f"{graph_id}-{rank:05d}"
    curve_rel = f"curves/{sample_id}.png"
    mech_rel = f"mechs/{sample_id}.png"
    with open(os.path.join(out_dir, curve_rel), "wb") as f:
        f.write(payload["curve_png"])
    with open(os.path.join(out_dir, mech_rel), "wb") as f:
        f.write(payload["mech_png"])
    return {
        "id": sample_id,
        "graph_id": graph_id,
        "attempt": attempt_index,
        "split": split_tag(sample_id, config.split_ratio, config.seed),
        "instance": payload["instance"],
        "trajectory": {"points": payload["points"], "speeds": payload["speeds"]},
        "transform": payload["transform"],
        "speed_min": payload["speed_min"],
        "speed_max": payload["speed_max"],
        "curve_image": curve_rel,
        "mech_image": mech_rel,
        "joints_file": None,  # reserved
        "video_file": None,  # reserved
    }


def load_manifest(path):
    rows = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                rows.append(json.loads(line))
    return rows
