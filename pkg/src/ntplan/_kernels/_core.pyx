# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementation of the numeric kernels.

Mirrors `_py.py` operation-for-operation; see that module for the shared
semantics.  Any change here must keep the two backends bit-identical.
"""

from libc.math cimport sqrt, sin, cos, log, pow, rint, INFINITY
from libc.stdint cimport uint64_t, int64_t

import numpy as np

cdef double PI = 3.14159265358979323846
cdef double TWO_PI = 6.28318530717958647692

KIND_POINT = 0
KIND_RIGID = 1
KIND_ARM = 2

cdef enum:
    MAX_DIM = 32
    MAX_VERTS = 32


cdef inline uint64_t _sm64_next(uint64_t* state) nogil:
    cdef uint64_t z
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline double _sm64_uniform(uint64_t* state) nogil:
    return <double>(_sm64_next(state) >> 11) * (2.0 ** -53)


cdef inline double _wrap(double x) nogil:
    cdef double r = x - TWO_PI * rint(x / TWO_PI)
    if r <= -PI:
        r += TWO_PI
    elif r > PI:
        r -= TWO_PI
    return r


cdef double _dist(double* a, double* b, int d, int kind, double w_theta) nogil:
    cdef double dx, dy, dth, acc, dd
    cdef int i
    if kind == 0:
        dx = b[0] - a[0]
        dy = b[1] - a[1]
        return sqrt(dx * dx + dy * dy)
    if kind == 1:
        dx = b[0] - a[0]
        dy = b[1] - a[1]
        dth = w_theta * _wrap(b[2] - a[2])
        return sqrt(dx * dx + dy * dy + dth * dth)
    acc = 0.0
    for i in range(d):
        dd = _wrap(b[i] - a[i])
        acc += dd * dd
    return sqrt(acc)


cdef inline bint _seg_hits_rect(double px, double py, double qx, double qy,
                                double r0, double r1, double r2, double r3) nogil:
    cdef double t0 = 0.0
    cdef double t1 = 1.0
    cdef double dx = qx - px
    cdef double dy = qy - py
    cdef double ta, tb, tmp
    if dx == 0.0:
        if px < r0 or px > r2:
            return False
    else:
        ta = (r0 - px) / dx
        tb = (r2 - px) / dx
        if ta > tb:
            tmp = ta
            ta = tb
            tb = tmp
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
        if t0 > t1:
            return False
    if dy == 0.0:
        if py < r1 or py > r3:
            return False
    else:
        ta = (r1 - py) / dy
        tb = (r3 - py) / dy
        if ta > tb:
            tmp = ta
            ta = tb
            tb = tmp
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
        if t0 > t1:
            return False
    return True


cdef bint _point_free(double x, double y, double[:, ::1] rects, double[::1] bounds) nogil:
    cdef int r
    if x < bounds[0] or x > bounds[2] or y < bounds[1] or y > bounds[3]:
        return False
    for r in range(rects.shape[0]):
        if rects[r, 0] <= x <= rects[r, 2] and rects[r, 1] <= y <= rects[r, 3]:
            return False
    return True


cdef bint _poly_rect_collide(double* wx, double* wy, int nv,
                             double r0, double r1, double r2, double r3) nogil:
    cdef double pmin, pmax, ax, ay, proj, rmin, rmax, rp
    cdef int i, j, k
    pmin = wx[0]
    pmax = wx[0]
    for i in range(1, nv):
        if wx[i] < pmin:
            pmin = wx[i]
        if wx[i] > pmax:
            pmax = wx[i]
    if pmax < r0 or pmin > r2:
        return False
    pmin = wy[0]
    pmax = wy[0]
    for i in range(1, nv):
        if wy[i] < pmin:
            pmin = wy[i]
        if wy[i] > pmax:
            pmax = wy[i]
    if pmax < r1 or pmin > r3:
        return False
    for i in range(nv):
        j = i + 1
        if j == nv:
            j = 0
        ax = wy[i] - wy[j]
        ay = wx[j] - wx[i]
        pmin = INFINITY
        pmax = -INFINITY
        for k in range(nv):
            proj = wx[k] * ax + wy[k] * ay
            if proj < pmin:
                pmin = proj
            if proj > pmax:
                pmax = proj
        rmin = INFINITY
        rmax = -INFINITY
        rp = r0 * ax + r1 * ay
        if rp < rmin: rmin = rp
        if rp > rmax: rmax = rp
        rp = r0 * ax + r3 * ay
        if rp < rmin: rmin = rp
        if rp > rmax: rmax = rp
        rp = r2 * ax + r1 * ay
        if rp < rmin: rmin = rp
        if rp > rmax: rmax = rp
        rp = r2 * ax + r3 * ay
        if rp < rmin: rmin = rp
        if rp > rmax: rmax = rp
        if pmax < rmin or pmin > rmax:
            return False
    return True


cdef bint _rigid_free(double* q, double[:, ::1] verts,
                      double[:, ::1] rects, double[::1] bounds) nogil:
    cdef double wx[MAX_VERTS]
    cdef double wy[MAX_VERTS]
    cdef int nv = verts.shape[0]
    cdef int i, r
    cdef double c = cos(q[2])
    cdef double s = sin(q[2])
    cdef double xmin, xmax, ymin, ymax
    for i in range(nv):
        wx[i] = q[0] + c * verts[i, 0] - s * verts[i, 1]
        wy[i] = q[1] + s * verts[i, 0] + c * verts[i, 1]
    xmin = wx[0]
    xmax = wx[0]
    ymin = wy[0]
    ymax = wy[0]
    for i in range(1, nv):
        if wx[i] < xmin: xmin = wx[i]
        if wx[i] > xmax: xmax = wx[i]
        if wy[i] < ymin: ymin = wy[i]
        if wy[i] > ymax: ymax = wy[i]
    if xmin < bounds[0] or xmax > bounds[2] or ymin < bounds[1] or ymax > bounds[3]:
        return False
    for r in range(rects.shape[0]):
        if _poly_rect_collide(wx, wy, nv, rects[r, 0], rects[r, 1], rects[r, 2], rects[r, 3]):
            return False
    return True


cdef bint _arm_free(double* q, int n, double[::1] lengths, double[::1] base,
                    bint contained, double[:, ::1] rects, double[::1] bounds) nogil:
    cdef double px[MAX_DIM + 1]
    cdef double py[MAX_DIM + 1]
    cdef double th = 0.0
    cdef int k, r
    px[0] = base[0]
    py[0] = base[1]
    for k in range(n):
        th += q[k]
        px[k + 1] = px[k] + lengths[k] * cos(th)
        py[k + 1] = py[k] + lengths[k] * sin(th)
    if contained:
        for k in range(n + 1):
            if px[k] < bounds[0] or px[k] > bounds[2] or py[k] < bounds[1] or py[k] > bounds[3]:
                return False
    for k in range(n):
        for r in range(rects.shape[0]):
            if _seg_hits_rect(px[k], py[k], px[k + 1], py[k + 1],
                              rects[r, 0], rects[r, 1], rects[r, 2], rects[r, 3]):
                return False
    return True


cdef bint _config_free(double* q, int d, int kind, double[:, ::1] verts,
                       double[::1] lengths, double[::1] base, bint contained,
                       double[:, ::1] rects, double[::1] bounds) nogil:
    if kind == 0:
        return _point_free(q[0], q[1], rects, bounds)
    if kind == 1:
        return _rigid_free(q, verts, rects, bounds)
    return _arm_free(q, d, lengths, base, contained, rects, bounds)


cdef void _interp_into(double* a, double* b, double t, int d, int kind, double* out) nogil:
    cdef int i
    if kind == 2:
        for i in range(d):
            out[i] = _wrap(a[i] + t * _wrap(b[i] - a[i]))
    elif kind == 1:
        out[0] = a[0] + t * (b[0] - a[0])
        out[1] = a[1] + t * (b[1] - a[1])
        out[2] = _wrap(a[2] + t * _wrap(b[2] - a[2]))
    else:
        for i in range(d):
            out[i] = a[i] + t * (b[i] - a[i])


cdef int _num_intervals(double dist, double resolution) except -1:
    cdef long n = 1
    while n * resolution < dist:
        n *= 2
        if n > (1 << 30):
            raise ValueError("steering discretization overflow; resolution too small")
    return <int>n


cdef bint _steer(double* a, double* b, int d, int kind, double[:, ::1] verts,
                 double[::1] lengths, double[::1] base, bint contained,
                 double w_theta, double[:, ::1] rects, double[::1] bounds,
                 double resolution) except? 0:
    cdef double sa[MAX_DIM]
    cdef double sb[MAX_DIM]
    cdef double sample[MAX_DIM]
    cdef double delta[MAX_DIM]
    cdef int i, k, n
    cdef double dist, t
    cdef bint swap = False
    for i in range(d):
        if b[i] < a[i]:
            swap = True
            break
        if b[i] > a[i]:
            break
    if swap:
        for i in range(d):
            sa[i] = b[i]
            sb[i] = a[i]
    else:
        for i in range(d):
            sa[i] = a[i]
            sb[i] = b[i]
    dist = _dist(sa, sb, d, kind, w_theta)
    if dist == 0.0:
        return _config_free(sa, d, kind, verts, lengths, base, contained, rects, bounds)
    n = _num_intervals(dist, resolution)
    if kind == 2:
        for i in range(d):
            delta[i] = _wrap(sb[i] - sa[i])
    elif kind == 1:
        delta[2] = _wrap(sb[2] - sa[2])
    if not _config_free(sa, d, kind, verts, lengths, base, contained, rects, bounds):
        return False
    if not _config_free(sb, d, kind, verts, lengths, base, contained, rects, bounds):
        return False
    for k in range(1, n):
        t = <double>k / <double>n
        if kind == 2:
            for i in range(d):
                sample[i] = _wrap(sa[i] + t * delta[i])
        elif kind == 1:
            sample[0] = sa[0] + t * (sb[0] - sa[0])
            sample[1] = sa[1] + t * (sb[1] - sa[1])
            sample[2] = _wrap(sa[2] + t * delta[2])
        else:
            for i in range(d):
                sample[i] = sa[i] + t * (sb[i] - sa[i])
        if not _config_free(sample, d, kind, verts, lengths, base, contained, rects, bounds):
            return False
    return True


# ---------------------------------------------------------------------------
# Python-visible wrappers
# ---------------------------------------------------------------------------

def config_distance(double[::1] a, double[::1] b, int kind, double w_theta):
    return _dist(&a[0], &b[0], a.shape[0], kind, w_theta)


def fk_points(double[::1] q, double[::1] lengths, double[::1] base):
    cdef int n = q.shape[0]
    out = np.empty((n + 1, 2), dtype=np.float64)
    cdef double[:, ::1] pts = out
    cdef double th = 0.0
    cdef int k
    pts[0, 0] = base[0]
    pts[0, 1] = base[1]
    for k in range(n):
        th += q[k]
        pts[k + 1, 0] = pts[k, 0] + lengths[k] * cos(th)
        pts[k + 1, 1] = pts[k, 1] + lengths[k] * sin(th)
    return out


def segment_hits_rect(double px, double py, double qx, double qy, double[::1] rect):
    return bool(_seg_hits_rect(px, py, qx, qy, rect[0], rect[1], rect[2], rect[3]))


def config_free(double[::1] q, int kind, double[:, ::1] verts, double[::1] lengths,
                double[::1] base, int contained, double[:, ::1] rects, double[::1] bounds):
    return bool(_config_free(&q[0], q.shape[0], kind, verts, lengths, base,
                             <bint>contained, rects, bounds))


def configs_free(double[:, ::1] qs, int kind, double[:, ::1] verts, double[::1] lengths,
                 double[::1] base, int contained, double[:, ::1] rects, double[::1] bounds):
    cdef int n = qs.shape[0]
    cdef int d = qs.shape[1]
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] mask = out
    cdef int i
    for i in range(n):
        mask[i] = _config_free(&qs[i, 0], d, kind, verts, lengths, base,
                               <bint>contained, rects, bounds)
    return out


def steer(double[::1] a, double[::1] b, int kind, double[:, ::1] verts,
          double[::1] lengths, double[::1] base, int contained, double w_theta,
          double[:, ::1] rects, double[::1] bounds, double resolution):
    if a.shape[0] > MAX_DIM:
        raise ValueError("configuration dimension exceeds kernel limit")
    return bool(_steer(&a[0], &b[0], a.shape[0], kind, verts, lengths, base,
                       <bint>contained, w_theta, rects, bounds, resolution))


def rrt_star(double[::1] start, double[::1] goal, int kind, double[:, ::1] verts,
             double[::1] lengths, double[::1] base, int contained, double w_theta,
             double[:, ::1] rects, double[::1] bounds, double resolution,
             int max_iters, double step_size, double goal_bias,
             double rewire_gamma, seed):
    cdef int d = start.shape[0]
    if d > MAX_DIM:
        raise ValueError("configuration dimension exceeds kernel limit")
    cdef uint64_t rng = <uint64_t>(int(seed) & ((1 << 64) - 1))
    cdef int cap = max_iters + 1

    conf_arr = np.empty((cap, d), dtype=np.float64)
    parent_arr = np.full(cap, -1, dtype=np.int64)
    cost_arr = np.zeros(cap, dtype=np.float64)
    nd_arr = np.empty(cap, dtype=np.float64)
    neigh_arr = np.empty(cap, dtype=np.int64)
    stack_arr = np.empty(cap, dtype=np.int64)
    conn_idx_arr = np.empty(cap, dtype=np.int64)
    conn_dist_arr = np.empty(cap, dtype=np.float64)
    trace_it_arr = np.empty(max_iters, dtype=np.int64)
    trace_cost_arr = np.empty(max_iters, dtype=np.float64)

    cdef double[:, ::1] conf = conf_arr
    cdef int64_t[::1] parent = parent_arr
    cdef double[::1] cost = cost_arr
    cdef double[::1] nd = nd_arr
    cdef int64_t[::1] neigh = neigh_arr
    cdef int64_t[::1] stack = stack_arr
    cdef int64_t[::1] conn_idx = conn_idx_arr
    cdef double[::1] conn_dist = conn_dist_arr
    cdef int64_t[::1] trace_it = trace_it_arr
    cdef double[::1] trace_cost = trace_cost_arr

    cdef double x_rand[MAX_DIM]
    cdef double x_new[MAX_DIM]
    cdef int n_nodes = 1
    cdef int n_conn = 0
    cdef int n_trace = 0
    cdef double best_cost = INFINITY
    cdef int64_t best_node = -1

    cdef int it, i, m, near, new_idx, n_neigh, n_cand, sel, j, k, sp
    cdef double u, dnear, radius, key, best_key, c_new, delta_c, dg, bc
    cdef int64_t cand_i
    cdef int64_t bn
    cdef bint ok, conn_dirty

    for i in range(d):
        conf[0, i] = start[i]

    for it in range(max_iters):
        u = _sm64_uniform(&rng)
        if u < goal_bias:
            for i in range(d):
                x_rand[i] = goal[i]
        else:
            if kind == 2:
                for i in range(d):
                    x_rand[i] = _wrap(-PI + _sm64_uniform(&rng) * TWO_PI)
            else:
                x_rand[0] = bounds[0] + _sm64_uniform(&rng) * (bounds[2] - bounds[0])
                x_rand[1] = bounds[1] + _sm64_uniform(&rng) * (bounds[3] - bounds[1])
                if kind == 1:
                    x_rand[2] = _wrap(-PI + _sm64_uniform(&rng) * TWO_PI)

        near = 0
        dnear = INFINITY
        for m in range(n_nodes):
            u = _dist(&conf[m, 0], x_rand, d, kind, w_theta)
            if u < dnear:
                dnear = u
                near = m
        if dnear < 1e-12:
            continue
        if dnear <= step_size:
            for i in range(d):
                x_new[i] = x_rand[i]
        else:
            _interp_into(&conf[near, 0], x_rand, step_size / dnear, d, kind, x_new)
        if not _config_free(x_new, d, kind, verts, lengths, base, <bint>contained, rects, bounds):
            continue

        radius = rewire_gamma * pow(log(n_nodes + 1.0) / (n_nodes + 1.0), 1.0 / d)
        if radius > step_size:
            radius = step_size
        n_neigh = 0
        for m in range(n_nodes):
            nd[m] = _dist(&conf[m, 0], x_new, d, kind, w_theta)
            if nd[m] <= radius:
                neigh[n_neigh] = m
                n_neigh += 1
        n_cand = n_neigh
        if nd[near] > radius:
            neigh[n_cand] = near
            n_cand += 1

        # candidates in (cost + dist, index) order; first steerable becomes parent
        new_idx = -1
        while True:
            best_key = INFINITY
            bn = -1
            sel = -1
            for m in range(n_cand):
                cand_i = neigh[m]
                if cand_i < 0:
                    continue
                key = cost[cand_i] + nd[cand_i]
                if key < best_key or (key == best_key and cand_i < bn):
                    best_key = key
                    bn = cand_i
                    sel = m
            if bn < 0:
                break
            ok = _steer(&conf[bn, 0], x_new, d, kind, verts, lengths, base,
                        <bint>contained, w_theta, rects, bounds, resolution)
            if ok:
                new_idx = n_nodes
                for i in range(d):
                    conf[new_idx, i] = x_new[i]
                parent[new_idx] = bn
                cost[new_idx] = best_key
                n_nodes += 1
                break
            neigh[sel] = -1
        if new_idx == -1:
            continue

        conn_dirty = False
        for m in range(n_neigh):
            j = <int>neigh[m]
            if j < 0 or j == parent[new_idx]:
                continue
            c_new = cost[new_idx] + nd[j]
            if c_new < cost[j]:
                ok = _steer(&conf[new_idx, 0], &conf[j, 0], d, kind, verts, lengths,
                            base, <bint>contained, w_theta, rects, bounds, resolution)
                if ok:
                    parent[j] = new_idx
                    delta_c = c_new - cost[j]
                    sp = 0
                    stack[sp] = j
                    sp += 1
                    while sp > 0:
                        sp -= 1
                        k = <int>stack[sp]
                        cost[k] += delta_c
                        for i in range(n_nodes):
                            if parent[i] == k:
                                stack[sp] = i
                                sp += 1
                    conn_dirty = True

        dg = _dist(x_new, &goal[0], d, kind, w_theta)
        if dg <= step_size:
            ok = _steer(x_new, &goal[0], d, kind, verts, lengths, base,
                        <bint>contained, w_theta, rects, bounds, resolution)
            if ok:
                conn_idx[n_conn] = new_idx
                conn_dist[n_conn] = dg
                n_conn += 1
                conn_dirty = True

        if conn_dirty and n_conn > 0:
            bc = INFINITY
            bn = -1
            for m in range(n_conn):
                u = cost[conn_idx[m]] + conn_dist[m]
                if u < bc:
                    bc = u
                    bn = conn_idx[m]
            if bc < best_cost:
                best_cost = bc
                best_node = bn
                trace_it[n_trace] = it
                trace_cost[n_trace] = bc
                n_trace += 1

    trace_i = trace_it_arr[:n_trace].copy()
    trace_c = trace_cost_arr[:n_trace].copy()
    if best_node == -1:
        return None, trace_i, trace_c, n_nodes

    rev = []
    k = <int>best_node
    while k != -1:
        rev.append(k)
        k = <int>parent[k]
    rev.reverse()
    cdef int mlen = len(rev)
    append_goal = _dist(&conf[best_node, 0], &goal[0], d, kind, w_theta) != 0.0
    path = np.empty((mlen + (1 if append_goal else 0), d), dtype=np.float64)
    for i in range(mlen):
        path[i] = conf_arr[rev[i]]
    if append_goal:
        path[mlen] = np.asarray(goal)
    return path, trace_i, trace_c, n_nodes
