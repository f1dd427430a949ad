# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: full-cycle assembly and integer rasterization.

Must stay bit-identical to linkforge._kernels_py / linkforge.solvers: same
temporaries, same operation order, libm transcendentals only.  The extension
is compiled with -ffp-contract=off so no FMA contraction sneaks in.
"""

from libc.math cimport remainder, sqrt

cdef extern from *:
    """
    #include <math.h>
    /* Opaque wrappers: GCC otherwise fuses adjacent sin+cos calls into
       glibc's sincos, whose results differ from the separate calls by one
       ulp on some inputs, breaking bit-equality with the Python backend. */
    __attribute__((noinline)) static double lf_sin(double x) { return sin(x); }
    __attribute__((noinline)) static double lf_cos(double x) { return cos(x); }
    """
    double lf_sin(double x) nogil
    double lf_cos(double x) nogil

NAME = "compiled"

cdef enum:
    C_OK = 0
    C_INFEASIBLE = 1
    C_NEAR_SINGULAR = 2

STATUS_OK = C_OK
STATUS_INFEASIBLE = C_INFEASIBLE
STATUS_NEAR_SINGULAR = C_NEAR_SINGULAR

cdef double TAU = 6.283185307179586

cdef int _dyad(double px, double py, double qx, double qy,
               double lp, double lq, double sign, double eps,
               double *rx, double *ry) nogil:
    cdef double dx = qx - px
    cdef double dy = qy - py
    cdef double d2 = dx * dx + dy * dy
    cdef double d, a, h2, h, ux, uy, bx, by
    if d2 <= 0.0:
        return C_INFEASIBLE
    d = sqrt(d2)
    a = (lp * lp - lq * lq + d2) / (2.0 * d)
    h2 = lp * lp - a * a
    if h2 < 0.0:
        return C_INFEASIBLE
    if h2 < eps:
        return C_NEAR_SINGULAR
    h = sqrt(h2)
    ux = dx / d
    uy = dy / d
    bx = px + a * ux
    by = py + a * uy
    rx[0] = bx - sign * h * uy
    ry[0] = by + sign * h * ux
    return C_OK


cdef int _slider(double px, double py, double ox, double oy,
                 double rx_, double ry_, double length, double sign,
                 double eps, double *rx, double *ry) nogil:
    cdef double relx = px - ox
    cdef double rely = py - oy
    cdef double t0 = relx * rx_ + rely * ry_
    cdef double fx = ox + t0 * rx_
    cdef double fy = oy + t0 * ry_
    cdef double ddx = px - fx
    cdef double ddy = py - fy
    cdef double dist2 = ddx * ddx + ddy * ddy
    cdef double h2 = length * length - dist2
    cdef double h, t
    if h2 < 0.0:
        return C_INFEASIBLE
    if h2 < eps:
        return C_NEAR_SINGULAR
    h = sqrt(h2)
    t = t0 + sign * h
    rx[0] = ox + t * rx_
    ry[0] = oy + t * ry_
    return C_OK


def trace_cycle(double ax, double ay, double bx, double by,
                double crank_len, double phase,
                bint is_slider, double rail_ox, double rail_oy,
                double rail_dx, double rail_dy,
                double rod_len, double rod_sign,
                long[::1] pidx, long[::1] qidx,
                double[::1] len_p, double[::1] len_q, double[::1] signs,
                int n_steps, double eps,
                double[:, :, ::1] out):
    """See _kernels_py.trace_cycle."""
    cdef int n_added = pidx.shape[0]
    cdef int n_nodes = 3 + n_added
    cdef int i, j, n, status
    cdef int fail_status = C_OK
    cdef int fail_step = -1
    cdef int fail_node = -1
    cdef double theta, ang
    cdef double[18] posx
    cdef double[18] posy
    if n_nodes > 18:
        raise ValueError("too many nodes for the compiled kernel")
    posx[0] = ax
    posy[0] = ay
    if not is_slider:
        posx[1] = bx
        posy[1] = by
    with nogil:
        for i in range(n_steps):
            theta = TAU * i / n_steps
            ang = remainder(theta, TAU) + phase
            posx[2] = ax + crank_len * lf_cos(ang)
            posy[2] = ay + crank_len * lf_sin(ang)
            if is_slider:
                status = _slider(posx[2], posy[2], rail_ox, rail_oy,
                                 rail_dx, rail_dy, rod_len, rod_sign, eps,
                                 &posx[1], &posy[1])
                if status != C_OK:
                    fail_status = status
                    fail_step = i
                    fail_node = 1
                    break
            if fail_status == C_OK:
                for j in range(n_added):
                    status = _dyad(posx[pidx[j]], posy[pidx[j]],
                                   posx[qidx[j]], posy[qidx[j]],
                                   len_p[j], len_q[j], signs[j], eps,
                                   &posx[3 + j], &posy[3 + j])
                    if status != C_OK:
                        fail_status = status
                        fail_step = i
                        fail_node = 3 + j
                        break
            if fail_status != C_OK:
                break
            for n in range(n_nodes):
                out[i, n, 0] = posx[n]
                out[i, n, 1] = posy[n]
    return fail_status, fail_step, fail_node


cdef inline void _put3(unsigned char[:, :, ::1] img, int x, int y, bint horiz,
                       unsigned char r, unsigned char g, unsigned char b,
                       int h, int w) nogil:
    cdef int k, px, py
    for k in range(-1, 2):
        if horiz:
            px = x
            py = y + k
        else:
            px = x + k
            py = y
        if 0 <= px < w and 0 <= py < h:
            img[py, px, 0] = r
            img[py, px, 1] = g
            img[py, px, 2] = b


cdef void _segment(unsigned char[:, :, ::1] img, int x0, int y0, int x1, int y1,
                   unsigned char r, unsigned char g, unsigned char b) nogil:
    cdef int h = img.shape[0]
    cdef int w = img.shape[1]
    cdef int dx = x1 - x0
    cdef int dy = y1 - y0
    if dx < 0:
        dx = -dx
    if dy < 0:
        dy = -dy
    cdef int sx = 1 if x0 < x1 else -1
    cdef int sy = 1 if y0 < y1 else -1
    cdef int x = x0
    cdef int y = y0
    cdef int err
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


def draw_segments(unsigned char[:, :, ::1] img,
                  long[::1] x0s, long[::1] y0s, long[::1] x1s, long[::1] y1s,
                  unsigned char[:, ::1] colors):
    cdef Py_ssize_t i
    with nogil:
        for i in range(x0s.shape[0]):
            _segment(img, <int>x0s[i], <int>y0s[i], <int>x1s[i], <int>y1s[i],
                     colors[i, 0], colors[i, 1], colors[i, 2])


def draw_polyline(unsigned char[:, :, ::1] img,
                  long[::1] xs, long[::1] ys,
                  unsigned char[:, ::1] colors, bint closed):
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t last = n if closed else n - 1
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(last):
            j = (i + 1) % n
            _segment(img, <int>xs[i], <int>ys[i], <int>xs[j], <int>ys[j],
                     colors[i, 0], colors[i, 1], colors[i, 2])


def fill_discs(unsigned char[:, :, ::1] img,
               long[::1] cxs, long[::1] cys, int radius, color):
    cdef int h = img.shape[0]
    cdef int w = img.shape[1]
    cdef int r2 = radius * radius
    cdef unsigned char cr = color[0]
    cdef unsigned char cg = color[1]
    cdef unsigned char cb = color[2]
    cdef Py_ssize_t i
    cdef int cx, cy, dx, dy, x, y
    with nogil:
        for i in range(cxs.shape[0]):
            cx = <int>cxs[i]
            cy = <int>cys[i]
            for dy in range(-radius, radius + 1):
                y = cy + dy
                if y < 0 or y >= h:
                    continue
                for dx in range(-radius, radius + 1):
                    if dx * dx + dy * dy > r2:
                        continue
                    x = cx + dx
                    if x < 0 or x >= w:
                        continue
                    img[y, x, 0] = cr
                    img[y, x, 1] = cg
                    img[y, x, 2] = cb
