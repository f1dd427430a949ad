"""Pure-Python kernels: the fallback backend.

Same call signatures and bit-identical results as the compiled
``linkforge._kernels`` module.  The trace kernel delegates to the scalar
solvers so the two backends share one source of numerical truth; the raster
kernels are integer-only, so equality across backends is structural.
"""

import math

from . import solvers

NAME = "python"

STATUS_OK = 0
STATUS_INFEASIBLE = 1
STATUS_NEAR_SINGULAR = 2


def trace_cycle(ax, ay, bx, by, crank_len, phase,
                is_slider, rail_ox, rail_oy, rail_dx, rail_dy,
                rod_len, rod_sign,
                pidx, qidx, len_p, len_q, signs,
                n_steps, eps, out):
    """Assemble every node at n_steps uniform crank angles.

    ``out`` is a float64 array of shape (n_steps, 3 + len(pidx), 2).
    Returns (status, failing_step, failing_node); status 0 means success.
    """
    n_added = len(pidx)
    pos = [(0.0, 0.0)] * (3 + n_added)
    pos[0] = (ax, ay)
    if not is_slider:
        pos[1] = (bx, by)
    rail = ((rail_ox, rail_oy), (rail_dx, rail_dy))
    for i in range(n_steps):
        theta = math.tau * i / n_steps
        pos[2] = solvers.crank_point(ax, ay, crank_len, phase, theta)
        if is_slider:
            try:
                pos[1] = solvers.solve_slider(pos[2], rail, rod_len, rod_sign, eps)
            except solvers.NearSingular:
                return STATUS_NEAR_SINGULAR, i, 1
            except solvers.Infeasible:
                return STATUS_INFEASIBLE, i, 1
        for j in range(n_added):
            try:
                pos[3 + j] = solvers.solve_dyad(
                    pos[pidx[j]], pos[qidx[j]], len_p[j], len_q[j], signs[j], eps)
            except solvers.NearSingular:
                return STATUS_NEAR_SINGULAR, i, 3 + j
            except solvers.Infeasible:
                return STATUS_INFEASIBLE, i, 3 + j
        for n, (x, y) in enumerate(pos):
            out[i, n, 0] = x
            out[i, n, 1] = y
    return STATUS_OK, -1, -1


def draw_segments(img, x0s, y0s, x1s, y1s, colors):
    """Draw 3-px-wide Bresenham segments; endpoints are integer pixels."""
    for i in range(len(x0s)):
        _segment(img, int(x0s[i]), int(y0s[i]), int(x1s[i]), int(y1s[i]),
                 int(colors[i][0]), int(colors[i][1]), int(colors[i][2]))


def draw_polyline(img, xs, ys, colors, closed):
    """Draw the chain (xs[i], ys[i]) -> (xs[i+1], ys[i+1]); colors per segment."""
    n = len(xs)
    last = n if closed else n - 1
    for i in range(last):
        j = (i + 1) % n
        _segment(img, int(xs[i]), int(ys[i]), int(xs[j]), int(ys[j]),
                 int(colors[i][0]), int(colors[i][1]), int(colors[i][2]))


def fill_discs(img, cxs, cys, radius, color):
    h, w = img.shape[0], img.shape[1]
    r = int(radius)
    r2 = r * r
    cr, cg, cb = int(color[0]), int(color[1]), int(color[2])
    for i in range(len(cxs)):
        cx, cy = int(cxs[i]), int(cys[i])
        for dy in range(-r, r + 1):
            y = cy + dy
            if y < 0 or y >= h:
                continue
            for dx in range(-r, r + 1):
                if dx * dx + dy * dy > r2:
                    continue
                x = cx + dx
                if x < 0 or x >= w:
                    continue
                img[y, x, 0] = cr
                img[y, x, 1] = cg
                img[y, x, 2] = cb


def _put3(img, x, y, horiz, r, g, b, h, w):
    # center pixel plus one neighbour each side, perpendicular to the major axis
    if horiz:
        span = ((x, y - 1), (x, y), (x, y + 1))
    else:
        span = ((x - 1, y), (x, y), (x + 1, y))
    for px, py in span:
        if 0 <= px < w and 0 <= py < h:
            img[py, px, 0] = r
            img[py, px, 1] = g
            img[py, px, 2] = b


def _segment(img, x0, y0, x1, y1, r, g, b):
    h, w = img.shape[0], img.shape[1]
    dx = abs(x1 - x0)
    dy = abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    x, y = x0, y0
    if dx >= dy:
        err = dx // 2
        while True:
            _put3(img, x, y, True, r, g, b, h, w)
            if x == x1:
                break
            err -= dy
            if err < 0:
                y += sy
                err += dx
            x += sx
    else:
        err = dy // 2
        while True:
            _put3(img, x, y, False, r, g, b, h, w)
            if y == y1:
                break
            err -= dx
            if err < 0:
                x += sx
                err += dy
            y += sy
