"""Linkage instances, full-cycle assembly and trajectory tracing.

An instance binds a catalog graph to numbers: pivot positions, crank
length/phase, two link lengths plus a branch sign per added node, and a
rail + connecting rod for slider seeds.  Assembly solves nodes in
construction order with the stored branch signs; a branch sign is fixed for
the whole cycle, and any pose within the branch tolerance of collinearity
fails rather than risking a silent configuration flip.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import backend, solvers
from .graphs import MechanismGraph
from .solvers import Infeasible, InfeasibleCycle, NearSingular  # noqa: F401  (re-export)

DEFAULT_STEPS = 360


@dataclass(frozen=True)
class DyadParams:
    """Lengths to the two parents and the intersection branch choice."""

    len_p: float
    len_q: float
    sign: float  # +1.0 or -1.0


@dataclass(frozen=True)
class LinkageInstance:
    graph: MechanismGraph
    fixed_a: tuple
    crank_length: float
    crank_phase: float
    node_params: tuple  # DyadParams per added node, construction order
    fixed_b: tuple = None  # revolute seeds only
    rail: tuple = None  # ((ox, oy), (dx, dy)) with |direction| = 1, slider only
    rod_length: float = None  # crank tip to slider, slider only
    rod_sign: float = 1.0

    def __post_init__(self):
        if len(self.node_params) != self.graph.k:
            raise ValueError("node_params must match the graph's layer count")
        if self.graph.seed_kind == "slider":
            if self.rail is None or self.rod_length is None:
                raise ValueError("slider instances need a rail and rod length")
        elif self.fixed_b is None:
            raise ValueError("revolute instances need fixed_b")


@dataclass(frozen=True)
class Trajectory:
    """Drawing-node positions and speeds over one crank cycle.

    Speeds are chord length per radian of crank travel, so they do not
    depend on how fast the input is driven.
    """

    points: np.ndarray  # (n, 2)
    speeds: np.ndarray  # (n,)

    @property
    def n(self):
        return len(self.points)


def assemble(instance, theta):
    """Node positions at crank angle theta (reference scalar path).

    Returns {node_id: (x, y)}.  Raises Infeasible/NearSingular tagged with
    the failing node and angle.
    """
    g = instance.graph
    ax, ay = instance.fixed_a
    pos = {0: (ax, ay)}
    pos[2] = solvers.crank_point(ax, ay, instance.crank_length,
                                 instance.crank_phase, theta)
    if g.seed_kind == "slider":
        try:
            pos[1] = solvers.solve_slider(pos[2], instance.rail,
                                          instance.rod_length, instance.rod_sign)
        except solvers.SolveError as exc:
            exc.node, exc.theta = 1, theta
            raise
    else:
        pos[1] = instance.fixed_b
    for i, (p, q) in enumerate(g.layers):
        par = instance.node_params[i]
        try:
            pos[3 + i] = solvers.solve_dyad(pos[p], pos[q],
                                            par.len_p, par.len_q, par.sign)
        except solvers.SolveError as exc:
            exc.node, exc.theta = 3 + i, theta
            raise
    return pos


def sweep(instance, n_steps=DEFAULT_STEPS):
    """Positions of every node at n_steps uniform crank angles.

    Returns a (n_steps, n_nodes, 2) array; raises InfeasibleCycle if any
    step cannot be assembled.
    """
    if n_steps < 8:
        raise ValueError("n_steps must be >= 8")
    g = instance.graph
    k = g.k
    pidx = np.empty(k, dtype=np.int64)
    qidx = np.empty(k, dtype=np.int64)
    len_p = np.empty(k, dtype=np.float64)
    len_q = np.empty(k, dtype=np.float64)
    signs = np.empty(k, dtype=np.float64)
    for i, (p, q) in enumerate(g.layers):
        pidx[i] = p
        qidx[i] = q
        len_p[i] = instance.node_params[i].len_p
        len_q[i] = instance.node_params[i].len_q
        signs[i] = instance.node_params[i].sign
    is_slider = g.seed_kind == "slider"
    if is_slider:
        (rox, roy), (rdx, rdy) = instance.rail
        bx = by = 0.0
        rod = instance.rod_length
    else:
        bx, by = instance.fixed_b
        rox = roy = rdx = rdy = 0.0
        rod = 0.0
    out = np.empty((n_steps, 3 + k, 2), dtype=np.float64)
    status, step, node = backend.kernels.trace_cycle(
        instance.fixed_a[0], instance.fixed_a[1], bx, by,
        instance.crank_length, instance.crank_phase,
        is_slider, rox, roy, rdx, rdy, rod, instance.rod_sign,
        pidx, qidx, len_p, len_q, signs,
        n_steps, solvers.EPS_BRANCH, out)
    if status != backend.STATUS_OK:
        kind = "infeasible" if status == backend.STATUS_INFEASIBLE else "near-singular"
        theta = math.tau * step / n_steps
        raise InfeasibleCycle(
            f"cycle fails at step {step}/{n_steps} (node {node}, {kind})",
            node=node, step=step, theta=theta, kind=kind)
    return out


def trajectory_from_sweep(graph, positions):
    """Extract the drawing node's closed trajectory from a sweep array."""
    points = np.ascontiguousarray(positions[:, graph.drawing_node, :])
    n = len(points)
    diffs = np.roll(points, -1, axis=0) - points
    dtheta = math.tau / n
    speeds = np.sqrt(diffs[:, 0] ** 2 + diffs[:, 1] ** 2) / dtheta
    return Trajectory(points=points, speeds=speeds)


def trace(instance, n_steps=DEFAULT_STEPS):
    """Full-cycle trajectory of the drawing node.

    Raises InfeasibleCycle when the mechanism cannot complete a rotation.
    """
    return trajectory_from_sweep(instance.graph, sweep(instance, n_steps))


def grashof_class(lengths):
    """Classify a four-bar by (ground, crank, coupler, rocker) lengths."""
    ground, crank, coupler, rocker = lengths
    if min(lengths) <= 0:
        raise ValueError("lengths must be positive")
    s = min(lengths)
    lo = s + max(lengths)
    hi = sum(lengths) - s - max(lengths)
    if lo == hi:
        return "change-point"
    if lo > hi:
        return "non-Grashof"
    if s == ground:
        return "double-crank"
    if s == crank:
        return "crank-rocker"
    return "double-rocker"


# --- serialization ------------------------------------------------------

def instance_to_dict(instance):
    """JSON-ready dict; floats keep their shortest round-trip repr, so a
    dump/load cycle is bit-stable."""
    g = instance.graph
    d = {
        "seed_kind": g.seed_kind,
        "parent_pairs": [list(p) for p in g.layers],
        "fixed_a": list(instance.fixed_a),
        "fixed_b": list(instance.fixed_b) if instance.fixed_b is not None else None,
        "crank_length": instance.crank_length,
        "crank_phase": instance.crank_phase,
        "node_params": [[p.len_p, p.len_q, p.sign] for p in instance.node_params],
        "rail": [list(instance.rail[0]), list(instance.rail[1])]
        if instance.rail is not None else None,
        "rod_length": instance.rod_length,
        "rod_sign": instance.rod_sign,
    }
    return d


def instance_from_dict(d):
    graph = MechanismGraph(d["seed_kind"], tuple(tuple(p) for p in d["parent_pairs"]))
    return LinkageInstance(
        graph=graph,
        fixed_a=tuple(d["fixed_a"]),
        fixed_b=tuple(d["fixed_b"]) if d.get("fixed_b") is not None else None,
        crank_length=d["crank_length"],
        crank_phase=d["crank_phase"],
        node_params=tuple(DyadParams(*p) for p in d["node_params"]),
        rail=(tuple(d["rail"][0]), tuple(d["rail"][1]))
        if d.get("rail") is not None else None,
        rod_length=d.get("rod_length"),
        rod_sign=d.get("rod_sign", 1.0),
    )
