"""Deterministic rendering of mechanism and curve images.

Conventions (color scheme version 1):
  base/ground link red, input crank green, every other link blue, joints as
  yellow discs drawn last; curve segments run blue (slowest) to red
  (fastest).  Strokes are 3 px integer Bresenham lines, joints radius-3
  discs, no anti-aliasing, white background — every pixel is a pure function
  of the inputs, so renders are byte-identical across runs and platforms.

World-to-image mapping: px = scale * x + tx, py = ty - scale * y (image y
grows downward), rounded half-up to integer pixels.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import backend, kinematics

SCHEME_VERSION = 1
COLOR_BASE = (255, 0, 0)
COLOR_INPUT = (0, 255, 0)
COLOR_OTHER = (0, 0, 255)
COLOR_JOINT = (255, 255, 0)
COLOR_SLOW = (0, 0, 255)
COLOR_FAST = (255, 0, 0)
COLOR_BLACK = (0, 0, 0)

STROKE_WIDTH = 3  # px; fixed by the kernels
JOINT_RADIUS = 3  # px
DEFAULT_SIZE = 128
MIN_SIZE, MAX_SIZE = 64, 256


@dataclass(frozen=True)
class Transform:
    scale: float
    tx: float
    ty: float

    def to_pixels(self, points):
        """Half-up-rounded integer pixel coordinates for (n, 2) points."""
        pts = np.asarray(points, dtype=np.float64)
        px = np.floor(self.scale * pts[..., 0] + self.tx + 0.5).astype(np.int64)
        py = np.floor(self.ty - self.scale * pts[..., 1] + 0.5).astype(np.int64)
        return px, py

    def to_dict(self):
        return {"scale": self.scale, "tx": self.tx, "ty": self.ty}

    @classmethod
    def from_dict(cls, d):
        return cls(d["scale"], d["tx"], d["ty"])


def fit_transform(bbox, size, margin=0.05):
    """Uniform-scale transform fitting bbox = (xmin, ymin, xmax, ymax) into a
    size x size image, centered, with `margin` fraction of padding."""
    xmin, ymin, xmax, ymax = bbox
    span = max(xmax - xmin, ymax - ymin)
    span = max(span, 1e-9)
    scale = size * (1.0 - 2.0 * margin) / span
    cx = (xmin + xmax) / 2.0
    cy = (ymin + ymax) / 2.0
    half = size / 2.0
    return Transform(scale=scale, tx=half - scale * cx, ty=half + scale * cy)


def new_image(size=DEFAULT_SIZE):
    if not (MIN_SIZE <= size <= MAX_SIZE):
        raise ValueError(f"image size must be in {MIN_SIZE}..{MAX_SIZE}")
    return np.full((size, size, 3), 255, dtype=np.uint8)


def speed_to_color(u):
    """Blue-to-red linear interpolation of normalized speeds, rounded
    half-up to 8 bits.  u may be scalar or array, each in [0, 1]."""
    u = np.asarray(u, dtype=np.float64)
    rgb = np.empty(u.shape + (3,), dtype=np.uint8)
    for c in range(3):
        lo, hi = COLOR_SLOW[c], COLOR_FAST[c]
        rgb[..., c] = np.floor(lo + (hi - lo) * u + 0.5).astype(np.uint8)
    return rgb


def normalize_speeds(speeds):
    """Map speeds to [0, 1] by min-max; a constant profile maps to 0.5."""
    speeds = np.asarray(speeds, dtype=np.float64)
    lo = float(speeds.min())
    hi = float(speeds.max())
    if hi == lo:
        return np.full(speeds.shape, 0.5)
    return (speeds - lo) / (hi - lo)


def render_curve(trajectory, transform, size=DEFAULT_SIZE, grayscale=False):
    """Closed polyline of the trajectory, colored by per-segment speed."""
    img = new_image(size)
    px, py = transform.to_pixels(trajectory.points)
    if grayscale:
        colors = np.zeros((len(px), 3), dtype=np.uint8)
    else:
        colors = speed_to_color(normalize_speeds(trajectory.speeds))
    colors = np.ascontiguousarray(colors)
    backend.kernels.draw_polyline(img, px, py, colors, True)
    return img


def render_mechanism(instance, theta=0.0, transform=None, size=DEFAULT_SIZE):
    """One assembly pose: links by construction order, then joints on top."""
    g = instance.graph
    pos = kinematics.assemble(instance, theta)
    if transform is None:
        pts = np.array([pos[n] for n in sorted(pos)])
        transform = fit_transform((pts[:, 0].min(), pts[:, 1].min(),
                                   pts[:, 0].max(), pts[:, 1].max()), size)
    img = new_image(size)

    segments = []  # (world_p0, world_p1, color)
    if g.seed_kind == "slider":
        (ox, oy), (dx, dy) = instance.rail
        reach = 4.0  # rail is unbounded; overshoot and let clipping trim it
        segments.append(((ox - reach * dx, oy - reach * dy),
                         (ox + reach * dx, oy + reach * dy), COLOR_BASE))
    else:
        segments.append((pos[0], pos[1], COLOR_BASE))
    segments.append((pos[0], pos[2], COLOR_INPUT))
    if g.seed_kind == "slider":
        segments.append((pos[2], pos[1], COLOR_OTHER))
    for i, (p, q) in enumerate(g.layers):
        segments.append((pos[3 + i], pos[p], COLOR_OTHER))
        segments.append((pos[3 + i], pos[q], COLOR_OTHER))

    p0 = np.array([s[0] for s in segments])
    p1 = np.array([s[1] for s in segments])
    x0, y0 = transform.to_pixels(p0)
    x1, y1 = transform.to_pixels(p1)
    colors = np.ascontiguousarray([s[2] for s in segments], dtype=np.uint8)
    backend.kernels.draw_segments(img, x0, y0, x1, y1, colors)

    joints = np.array([pos[n] for n in sorted(pos)])
    jx, jy = transform.to_pixels(joints)
    backend.kernels.fill_discs(img, jx, jy, JOINT_RADIUS, COLOR_JOINT)
    return img


def sweep_bbox(positions):
    """(xmin, ymin, xmax, ymax) over a (steps, nodes, 2) sweep array."""
    xs = positions[..., 0]
    ys = positions[..., 1]
    return (float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max()))
