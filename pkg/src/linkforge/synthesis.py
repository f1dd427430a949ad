"""Curve-to-mechanism baseline: descriptor retrieval plus simplex refinement.

The descriptor is 64 arc-length-resampled curve points (centroid-subtracted,
RMS-radius-normalized, so translation and scale drop out) concatenated with
an 8-bin histogram of min-max-normalized drawing speeds; retrieval is an
exact linear scan over the dataset.  Refinement runs Nelder-Mead over the
retrieved instance's continuous parameters against a Chamfer objective,
with infeasible cycles mapped to a large finite penalty.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import kinematics, metrics, raster
from .kinematics import DyadParams, InfeasibleCycle, LinkageInstance

DESCRIPTOR_POINTS = 64
SPEED_BINS = 8
INFEASIBLE_PENALTY = 1.0e6
MIN_LENGTH = 1.0e-3
WHITE = 255


class EmptyDataset(Exception):
    pass


def resample_closed(points, m=DESCRIPTOR_POINTS):
    """m points equally spaced by arc length along the closed polyline."""
    pts = np.asarray(points, dtype=np.float64)
    closed = np.vstack([pts, pts[:1]])
    seg = np.sqrt(np.sum(np.diff(closed, axis=0) ** 2, axis=1))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total <= 0.0:
        return np.repeat(pts[:1], m, axis=0)
    targets = np.arange(m) * total / m
    idx = np.searchsorted(cum, targets, side="right") - 1
    idx = np.clip(idx, 0, len(seg) - 1)
    frac = (targets - cum[idx]) / np.where(seg[idx] > 0, seg[idx], 1.0)
    return closed[idx] + frac[:, None] * (closed[idx + 1] - closed[idx])


def curve_descriptor(points, speeds=None):
    """Fixed-length descriptor of a closed curve (plus optional speeds).

    Resampled points are centered and RMS-normalized (translation and scale
    invariance), then canonicalized to a fixed traversal: counter-clockwise,
    starting at the point farthest from the centroid.  That makes the
    descriptor independent of where a traced or pixel-recovered traversal
    happened to begin.
    """
    resampled = resample_closed(points)
    centered = resampled - resampled.mean(axis=0)
    rms = math.sqrt(float(np.mean(np.sum(centered ** 2, axis=1))))
    if rms > 0:
        centered = centered / rms
    x, y = centered[:, 0], centered[:, 1]
    area2 = float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    if area2 < 0:
        centered = centered[::-1]
    # start-point alignment via the phase of the dominant contour harmonic;
    # unlike argmax-radius this is stable when the radius profile is flat
    z = centered[:, 0] + 1j * centered[:, 1]
    c1 = np.fft.fft(z)[1]
    if abs(c1) > 1e-9:
        n = len(z)
        shift = int(round(-np.angle(c1) * n / math.tau)) % n
        centered = np.roll(centered, -shift, axis=0)
    if speeds is None or len(speeds) == 0:
        u = np.full(8, 0.5)
    else:
        u = raster.normalize_speeds(np.asarray(speeds, dtype=np.float64))
    hist, _ = np.histogram(u, bins=SPEED_BINS, range=(0.0, 1.0))
    hist = hist / max(1, len(u))
    return np.concatenate([centered.ravel(), hist])


def points_from_image(img):
    """Recover trajectory points and speed proxies from a curve render.

    Non-background pixels are chained by nearest neighbour, consuming a
    stroke-width ball around each step so the chain marches along the band
    instead of zig-zagging across its width; the red channel of the speed
    colormap serves as the speed proxy.
    """
    img = np.asarray(img)
    mask = np.any(img != WHITE, axis=2)
    ys, xs = np.nonzero(mask)
    if len(xs) == 0:
        raise EmptyDataset("image contains no curve pixels")
    pts = np.stack([xs.astype(np.float64), -ys.astype(np.float64)], axis=1)
    reds = img[ys, xs, 0].astype(np.float64) / 255.0
    order = _chain_nearest(pts, consume_radius=float(raster.STROKE_WIDTH))
    return pts[order], reds[order]


def _chain_nearest(pts, consume_radius=3.0):
    n = len(pts)
    r2 = consume_radius * consume_radius
    alive = np.ones(n, dtype=bool)
    current = int(np.lexsort((pts[:, 1], pts[:, 0]))[0])
    order = []
    while True:
        order.append(current)
        d2 = np.sum((pts - pts[current]) ** 2, axis=1)
        alive &= d2 > r2
        if not alive.any():
            break
        current = int(np.nonzero(alive)[0][np.argmin(d2[alive])])
    return np.array(order)


@dataclass
class DatasetIndex:
    rows: list
    descriptors: np.ndarray

    def __len__(self):
        return len(self.rows)


def build_index(rows):
    """Descriptor matrix over manifest rows (trajectories are stored)."""
    if not rows:
        raise EmptyDataset("no manifest rows to index")
    descs = np.stack([
        curve_descriptor(np.asarray(r["trajectory"]["points"]),
                         np.asarray(r["trajectory"]["speeds"]))
        for r in rows])
    return DatasetIndex(rows=rows, descriptors=descs)


def retrieve(target, index, k=5):
    """k nearest manifest rows by descriptor distance (exact linear scan).

    Target may be a Trajectory, an (points, speeds) tuple, or a curve image.
    """
    if len(index) == 0:
        raise EmptyDataset("empty dataset index")
    if isinstance(target, kinematics.Trajectory):
        desc = curve_descriptor(target.points, target.speeds)
    elif isinstance(target, tuple):
        desc = curve_descriptor(*target)
    else:
        desc = curve_descriptor(*points_from_image(target))
    dists = np.sqrt(np.sum((index.descriptors - desc) ** 2, axis=1))
    top = np.argsort(dists, kind="stable")[:k]
    return [(index.rows[i], float(dists[i])) for i in top]


# --- refinement ----------------------------------------------------------

def _pack(instance):
    x = [instance.fixed_a[0], instance.fixed_a[1]]
    if instance.graph.seed_kind == "slider":
        (ox, oy), (dx, dy) = instance.rail
        x += [ox, oy, math.atan2(dy, dx), instance.rod_length]
    else:
        x += [instance.fixed_b[0], instance.fixed_b[1]]
    x += [instance.crank_length, instance.crank_phase]
    for p in instance.node_params:
        x += [p.len_p, p.len_q]
    return np.array(x, dtype=np.float64)


def _unpack(x, template):
    i = 2
    fixed_a = (x[0], x[1])
    if template.graph.seed_kind == "slider":
        rail = ((x[2], x[3]), (math.cos(x[4]), math.sin(x[4])))
        rod_length = max(MIN_LENGTH, abs(x[5]))
        fixed_b = None
        i = 6
    else:
        rail, rod_length = None, None
        fixed_b = (x[2], x[3])
        i = 4
    crank_length = max(MIN_LENGTH, abs(x[i]))
    crank_phase = x[i + 1]
    i += 2
    params = []
    for p in template.node_params:
        params.append(DyadParams(max(MIN_LENGTH, abs(x[i])),
                                 max(MIN_LENGTH, abs(x[i + 1])), p.sign))
        i += 2
    return LinkageInstance(
        graph=template.graph, fixed_a=fixed_a, fixed_b=fixed_b,
        crank_length=crank_length, crank_phase=crank_phase,
        node_params=tuple(params), rail=rail, rod_length=rod_length,
        rod_sign=template.rod_sign)


@dataclass
class RefinementResult:
    initial: LinkageInstance
    optimized: LinkageInstance
    initial_chamfer: float
    final_chamfer: float
    evaluations: int
    converged: bool


def refine(instance, target_points, max_evals=500, trace_steps=None):
    """Nelder-Mead over the instance's continuous parameters.

    Objective: Chamfer(trace(instance).points, target_points); infeasible
    trials cost a finite penalty.  Returns the best point seen, so the final
    objective never exceeds the initial one.
    """
    target = np.asarray(target_points, dtype=np.float64)
    steps = trace_steps or kinematics.DEFAULT_STEPS
    best = {"x": _pack(instance), "f": None}

    def objective(x):
        try:
            inst = _unpack(x, instance)
            traj = kinematics.trace(inst, steps)
            f = metrics.chamfer(traj.points, target)
        except InfeasibleCycle:
            return INFEASIBLE_PENALTY
        if best["f"] is None or f < best["f"]:
            best["x"], best["f"] = np.array(x), f
        return f

    x0 = _pack(instance)
    f0 = objective(x0)
    if best["f"] is None:  # start infeasible: nothing to anchor to
        best["x"], best["f"] = x0, f0
    result = minimize(objective, x0, method="Nelder-Mead",
                      options={"maxfev": max_evals, "xatol": 1e-6,
                               "fatol": 1e-9, "disp": False})
    optimized = _unpack(best["x"], instance)
    return RefinementResult(
        initial=instance, optimized=optimized, initial_chamfer=f0,
        final_chamfer=best["f"], evaluations=result.nfev + 1,
        converged=bool(result.success))


def synthesize(target, index, topk=5, max_evals=500, image_size=None,
               trace_steps=None):
    """Retrieve topk candidates, refine each, return the best.

    Returns (mechanism image, instance, RefinementResult, transform).
    """
    candidates = retrieve(target, index, k=topk)
    if isinstance(target, kinematics.Trajectory):
        target_points = target.points
    elif isinstance(target, tuple):
        target_points = np.asarray(target[0], dtype=np.float64)
    else:
        target_points, _ = points_from_image(target)
        # image pixels live in pixel units; rescale to the candidate's world
        # frame using its stored transform
        t = raster.Transform.from_dict(candidates[0][0]["transform"])
        target_points = np.stack(
            [(target_points[:, 0] - t.tx) / t.scale,
             (target_points[:, 1] + t.ty) / t.scale], axis=1)
    steps = trace_steps or kinematics.DEFAULT_STEPS
    best_result = None
    for row, _dist in candidates:
        inst = kinematics.instance_from_dict(row["instance"])
        res = refine(inst, target_points, max_evals=max_evals, trace_steps=steps)
        if best_result is None or res.final_chamfer < best_result.final_chamfer:
            best_result = res
    inst = best_result.optimized
    size = image_size or raster.DEFAULT_SIZE
    positions = kinematics.sweep(inst, steps)
    transform = raster.fit_transform(raster.sweep_bbox(positions), size)
    img = raster.render_mechanism(inst, 0.0, transform, size)
    return img, inst, best_result, transform
