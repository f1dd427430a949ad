"""Scalar constraint solvers: circle-circle and circle-line intersections.

These are the reference implementations of the two triangle solves every
mechanism is built from.  The compiled kernels in ``_kernels.pyx`` mirror the
exact operation sequence used here (same temporaries, same order), which is
what makes the compiled and pure-Python backends bit-identical; do not
"simplify" the arithmetic in one place without changing the other.
"""

import math

# Discriminant threshold below which a dyad pose is treated as branch-ambiguous.
EPS_BRANCH = 1e-6


class SolveError(Exception):
    """Base for assembly failures; carries the failing node/angle when known."""

    def __init__(self, message, node=None, theta=None):
        super().__init__(message)
        self.node = node
        self.theta = theta


class Infeasible(SolveError):
    """The two constraint loci do not intersect (circles disjoint/nested)."""


class NearSingular(SolveError):
    """Intersection exists but lies within EPS_BRANCH of the branch boundary."""


class InfeasibleCycle(Exception):
    """A full-rotation trace failed at some crank angle."""

    def __init__(self, message, node=None, step=None, theta=None, kind=None):
        super().__init__(message)
        self.node = node
        self.step = step
        self.theta = theta
        self.kind = kind


def solve_dyad(p, q, len_p, len_q, sign, eps=EPS_BRANCH):
    """Intersect circle(p, len_p) with circle(q, len_q).

    Of the two intersections, returns the one on the side of the directed
    line p->q selected by ``sign``: sign = sign of cross(q - p, r - p).
    """
    px, py = p
    qx, qy = q
    dx = qx - px
    dy = qy - py
    d2 = dx * dx + dy * dy
    if d2 <= 0.0:
        raise Infeasible("coincident circle centers")
    d = math.sqrt(d2)
    a = (len_p * len_p - len_q * len_q + d2) / (2.0 * d)
    h2 = len_p * len_p - a * a
    if h2 < 0.0:
        raise Infeasible("circles do not intersect")
    if h2 < eps:
        raise NearSingular("intersection within branch tolerance")
    h = math.sqrt(h2)
    ux = dx / d
    uy = dy / d
    bx = px + a * ux
    by = py + a * uy
    return (bx - sign * h * uy, by + sign * h * ux)


def solve_slider(p, rail, length, sign, eps=EPS_BRANCH):
    """Intersect circle(p, length) with the rail line (point, unit direction).

    ``sign`` selects the root with the larger (+1) or smaller (-1) rail
    parameter.
    """
    px, py = p
    (ox, oy), (rx, ry) = rail
    relx = px - ox
    rely = py - oy
    t0 = relx * rx + rely * ry
    fx = ox + t0 * rx
    fy = oy + t0 * ry
    ddx = px - fx
    ddy = py - fy
    dist2 = ddx * ddx + ddy * ddy
    h2 = length * length - dist2
    if h2 < 0.0:
        raise Infeasible("circle does not reach the rail")
    if h2 < eps:
        raise NearSingular("rail intersection within branch tolerance")
    h = math.sqrt(h2)
    t = t0 + sign * h
    return (ox + t * rx, oy + t * ry)


def crank_point(ax, ay, length, phase, theta):
    """Crank-tip position; the angle is reduced so theta and theta + 2*pi
    produce identical floating-point results."""
    ang = math.remainder(theta, math.tau) + phase
    return (ax + length * math.cos(ang), ay + length * math.sin(ang))
