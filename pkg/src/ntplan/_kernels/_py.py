"""Pure numpy implementation of the numeric kernels.

This is the fallback backend used when the compiled extension is not
available.  The compiled backend (`_core.pyx`) mirrors every formula here
operation-for-operation so both produce bit-identical results; the test
suite checks that agreement.

Conventions shared by both backends:
  * configurations are float64 vectors; `kind` selects the robot model
    (0 = planar point, 1 = planar rigid body pose [x, y, theta],
    2 = articulated arm joint vector),
  * `rects` is an (R, 4) array of [x_min, y_min, x_max, y_max] obstacle
    boxes, already inflated by whatever padding applies,
  * `bounds` is the workspace box [x_min, y_min, x_max, y_max],
  * touching an obstacle boundary counts as a collision; touching the
    workspace boundary does not.
"""

import math

import numpy as np

TWO_PI = 2.0 * math.pi

KIND_POINT = 0
KIND_RIGID = 1
KIND_ARM = 2

_U64_MASK = (1 << 64) - 1


class SplitMix64:
    """Tiny deterministic PRNG used inside the tree planner.

    Implemented identically (64-bit wrapping arithmetic) in the compiled
    backend so planner runs agree across backends.
    """

    def __init__(self, seed):
        self.state = int(seed) & _U64_MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _U64_MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64_MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64_MASK
        return z ^ (z >> 31)

    def uniform(self):
        """Double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53


def wrap_angle(x):
    """Wrap a scalar angle to (-pi, pi]."""
    r = x - TWO_PI * np.rint(x / TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    elif r > math.pi:
        r -= TWO_PI
    return r


def wrap_angles(x):
    """Vectorized wrap to (-pi, pi]."""
    x = np.asarray(x, dtype=np.float64)
    r = x - TWO_PI * np.rint(x / TWO_PI)
    r = np.where(r <= -math.pi, r + TWO_PI, r)
    r = np.where(r > math.pi, r - TWO_PI, r)
    return r


def config_distance(a, b, kind, w_theta):
    """Metric on the configuration space (angles measured on shortest arc)."""
    if kind == KIND_POINT:
        dx = b[0] - a[0]
        dy = b[1] - a[1]
        return math.sqrt(dx * dx + dy * dy)
    if kind == KIND_RIGID:
        dx = b[0] - a[0]
        dy = b[1] - a[1]
        dth = w_theta * wrap_angle(b[2] - a[2])
        return math.sqrt(dx * dx + dy * dy + dth * dth)
    acc = 0.0
    for i in range(a.shape[0]):
        d = wrap_angle(b[i] - a[i])
        acc += d * d
    return math.sqrt(acc)


def fk_points(q, lengths, base):
    """Joint positions of an articulated arm, base first, tip last.

    Link angles accumulate: link k points along the sum of the first k+1
    joint angles.
    """
    n = q.shape[0]
    pts = np.empty((n + 1, 2), dtype=np.float64)
    pts[0, 0] = base[0]
    pts[0, 1] = base[1]
    th = 0.0
    for k in range(n):
        th += q[k]
        pts[k + 1, 0] = pts[k, 0] + lengths[k] * math.cos(th)
        pts[k + 1, 1] = pts[k, 1] + lengths[k] * math.sin(th)
    return pts


def segment_hits_rect(px, py, qx, qy, rect):
    """Exact segment vs axis-aligned box overlap (slab clipping).

    Boundary contact counts as a hit.
    """
    t0 = 0.0
    t1 = 1.0
    dx = qx - px
    dy = qy - py
    if dx == 0.0:
        if px < rect[0] or px > rect[2]:
            return False
    else:
        ta = (rect[0] - px) / dx
        tb = (rect[2] - px) / dx
        if ta > tb:
            ta, tb = tb, ta
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
        if t0 > t1:
            return False
    if dy == 0.0:
        if py < rect[1] or py > rect[3]:
            return False
    else:
        ta = (rect[1] - py) / dy
        tb = (rect[3] - py) / dy
        if ta > tb:
            ta, tb = tb, ta
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
        if t0 > t1:
            return False
    return True


def _point_free(x, y, rects, bounds):
    if x < bounds[0] or x > bounds[2] or y < bounds[1] or y > bounds[3]:
        return False
    for r in range(rects.shape[0]):
        if rects[r, 0] <= x <= rects[r, 2] and rects[r, 1] <= y <= rects[r, 3]:
            return False
    return True


def _rigid_world_verts(q, verts):
    c = math.cos(q[2])
    s = math.sin(q[2])
    out = np.empty_like(verts)
    out[:, 0] = q[0] + c * verts[:, 0] - s * verts[:, 1]
    out[:, 1] = q[1] + s * verts[:, 0] + c * verts[:, 1]
    return out


def _poly_rect_collide(world, rect):
    """Separating-axis test between a convex polygon and an AABB.

    Touching counts as a collision (no strict gap on any axis).
    """
    # workspace axes first: project the polygon onto x and y
    if world[:, 0].max() < rect[0] or world[:, 0].min() > rect[2]:
        return False
    if world[:, 1].max() < rect[1] or world[:, 1].min() > rect[3]:
        return False
    nv = world.shape[0]
    for i in range(nv):
        j = i + 1
        if j == nv:
            j = 0
        ax = world[i, 1] - world[j, 1]
        ay = world[j, 0] - world[i, 0]
        proj = world[:, 0] * ax + world[:, 1] * ay
        pmin = proj.min()
        pmax = proj.max()
        r00 = rect[0] * ax + rect[1] * ay
        r01 = rect[0] * ax + rect[3] * ay
        r10 = rect[2] * ax + rect[1] * ay
        r11 = rect[2] * ax + rect[3] * ay
        rmin = min(r00, r01, r10, r11)
        rmax = max(r00, r01, r10, r11)
        if pmax < rmin or pmin > rmax:
            return False
    return True


def _rigid_free(q, verts, rects, bounds):
    world = _rigid_world_verts(q, verts)
    if (world[:, 0].min() < bounds[0] or world[:, 0].max() > bounds[2]
            or world[:, 1].min() < bounds[1] or world[:, 1].max() > bounds[3]):
        return False
    for r in range(rects.shape[0]):
        if _poly_rect_collide(world, rects[r]):
            return False
    return True


def _arm_free(q, lengths, base, contained, rects, bounds):
    pts = fk_points(q, lengths, base)
    if contained:
        if (pts[:, 0].min() < bounds[0] or pts[:, 0].max() > bounds[2]
                or pts[:, 1].min() < bounds[1] or pts[:, 1].max() > bounds[3]):
            return False
    for k in range(q.shape[0]):
        for r in range(rects.shape[0]):
            if segment_hits_rect(pts[k, 0], pts[k, 1], pts[k + 1, 0], pts[k + 1, 1], rects[r]):
                return False
    return True


def config_free(q, kind, verts, lengths, base, contained, rects, bounds):
    """Validity of a single configuration."""
    if kind == KIND_POINT:
        return _point_free(q[0], q[1], rects, bounds)
    if kind == KIND_RIGID:
        return _rigid_free(q, verts, rects, bounds)
    return _arm_free(q, lengths, base, contained, rects, bounds)


def _points_free_vec(qs, rects, bounds):
    x = qs[:, 0]
    y = qs[:, 1]
    ok = (x >= bounds[0]) & (x <= bounds[2]) & (y >= bounds[1]) & (y <= bounds[3])
    for r in rects:
        ok &= ~((x >= r[0]) & (x <= r[2]) & (y >= r[1]) & (y <= r[3]))
    return ok


def _rigid_free_vec(qs, verts, rects, bounds):
    c = np.cos(qs[:, 2])
    s = np.sin(qs[:, 2])
    wx = qs[:, 0, None] + c[:, None] * verts[:, 0] - s[:, None] * verts[:, 1]
    wy = qs[:, 1, None] + s[:, None] * verts[:, 0] + c[:, None] * verts[:, 1]
    wx_min = wx.min(axis=1)
    wx_max = wx.max(axis=1)
    wy_min = wy.min(axis=1)
    wy_max = wy.max(axis=1)
    ok = (wx_min >= bounds[0]) & (wx_max <= bounds[2]) \
        & (wy_min >= bounds[1]) & (wy_max <= bounds[3])
    nv = verts.shape[0]
    for r in rects:
        separated = (wx_max < r[0]) | (wx_min > r[2]) | (wy_max < r[1]) | (wy_min > r[3])
        for i in range(nv):
            j = (i + 1) % nv
            ax = wy[:, i] - wy[:, j]
            ay = wx[:, j] - wx[:, i]
            proj = wx * ax[:, None] + wy * ay[:, None]
            pmin = proj.min(axis=1)
            pmax = proj.max(axis=1)
            corners = np.stack([r[0] * ax + r[1] * ay, r[0] * ax + r[3] * ay,
                                r[2] * ax + r[1] * ay, r[2] * ax + r[3] * ay])
            rmin = corners.min(axis=0)
            rmax = corners.max(axis=0)
            separated |= (pmax < rmin) | (pmin > rmax)
        ok &= separated
    return ok


def _segments_hit_rect_vec(px, py, dx, dy, rect):
    n = px.shape[0]
    t0 = np.zeros(n)
    t1 = np.ones(n)
    ok = np.ones(n, dtype=bool)
    for p, d, lo, hi in ((px, dx, rect[0], rect[2]), (py, dy, rect[1], rect[3])):
        par = d == 0.0
        ok &= ~par | ((p >= lo) & (p <= hi))
        safe = np.where(par, 1.0, d)
        ta = (lo - p) / safe
        tb = (hi - p) / safe
        lo_t = np.minimum(ta, tb)
        hi_t = np.maximum(ta, tb)
        t0 = np.where(par, t0, np.maximum(t0, lo_t))
        t1 = np.where(par, t1, np.minimum(t1, hi_t))
    return ok & (t0 <= t1)


def _fk_vec(qs, lengths, base):
    """Joint positions for a batch, matching fk_points' accumulation order."""
    n = qs.shape[1]
    th = np.cumsum(qs, axis=1)
    dx = lengths * np.cos(th)
    dy = lengths * np.sin(th)
    px = np.cumsum(np.concatenate([np.full((qs.shape[0], 1), base[0]), dx], axis=1), axis=1)
    py = np.cumsum(np.concatenate([np.full((qs.shape[0], 1), base[1]), dy], axis=1), axis=1)
    return px, py


def _arms_free_vec(qs, lengths, base, contained, rects, bounds):
    px, py = _fk_vec(qs, lengths, base)
    if contained:
        ok = (px.min(axis=1) >= bounds[0]) & (px.max(axis=1) <= bounds[2]) \
            & (py.min(axis=1) >= bounds[1]) & (py.max(axis=1) <= bounds[3])
    else:
        ok = np.ones(qs.shape[0], dtype=bool)
    for k in range(qs.shape[1]):
        dx = px[:, k + 1] - px[:, k]
        dy = py[:, k + 1] - py[:, k]
        for r in rects:
            ok &= ~_segments_hit_rect_vec(px[:, k], py[:, k], dx, dy, r)
    return ok


def configs_free(qs, kind, verts, lengths, base, contained, rects, bounds):
    """Validity of a batch of configurations; returns a uint8 mask."""
    if kind == KIND_POINT:
        ok = _points_free_vec(qs, rects, bounds)
    elif kind == KIND_RIGID:
        ok = _rigid_free_vec(qs, verts, rects, bounds)
    else:
        ok = _arms_free_vec(qs, lengths, base, contained, rects, bounds)
    return ok.astype(np.uint8)


def _num_intervals(dist, resolution):
    """Power-of-two interval count with spacing <= resolution.

    Doubling keeps halving the resolution an exact refinement, so a finer
    check can never miss a collision the coarse one found.
    """
    n = 1
    while n * resolution < dist:
        n *= 2
        if n > (1 << 30):
            raise ValueError("steering discretization overflow; resolution too small")
    return n


def _lex_less(a, b):
    for i in range(a.shape[0]):
        if b[i] < a[i]:
            return True
        if b[i] > a[i]:
            return False
    return False


def steer(a, b, kind, verts, lengths, base, contained, w_theta, rects, bounds, resolution):
    """Straight-line local connection test.

    Interpolates between the endpoints at spacing <= resolution (angles on
    the shortest arc) and requires every sample, endpoints included, to be
    collision free.  Endpoints are canonically ordered first so the result
    is exactly symmetric.
    """
    if _lex_less(a, b):
        a, b = b, a
    dist = config_distance(a, b, kind, w_theta)
    if dist == 0.0:
        return config_free(a, kind, verts, lengths, base, contained, rects, bounds)
    n = _num_intervals(dist, resolution)
    d = a.shape[0]
    samples = np.empty((n + 1, d), dtype=np.float64)
    t = (np.arange(1, n, dtype=np.float64) / n)[:, None]
    if kind == KIND_ARM:
        delta = wrap_angles(b - a)
        samples[1:n] = wrap_angles(a + t * delta)
    elif kind == KIND_RIGID:
        samples[1:n, 0:2] = a[0:2] + t * (b[0:2] - a[0:2])
        dth = wrap_angle(b[2] - a[2])
        samples[1:n, 2] = wrap_angles(a[2] + t[:, 0] * dth)
    else:
        samples[1:n] = a + t * (b - a)
    samples[0] = a
    samples[n] = b
    mask = configs_free(samples, kind, verts, lengths, base, contained, rects, bounds)
    return bool(mask.all())


def _interp_into(a, b, t, kind, out):
    """out := configuration at parameter t along the local path a -> b."""
    d = a.shape[0]
    if kind == KIND_ARM:
        for i in range(d):
            out[i] = wrap_angle(a[i] + t * wrap_angle(b[i] - a[i]))
    elif kind == KIND_RIGID:
        out[0] = a[0] + t * (b[0] - a[0])
        out[1] = a[1] + t * (b[1] - a[1])
        out[2] = wrap_angle(a[2] + t * wrap_angle(b[2] - a[2]))
    else:
        for i in range(d):
            out[i] = a[i] + t * (b[i] - a[i])


def rrt_star(start, goal, kind, verts, lengths, base, contained, w_theta,
             rects, bounds, resolution, max_iters, step_size, goal_bias,
             rewire_gamma, seed):
    """Anytime optimizing tree planner (goal-biased, shrinking rewire radius).

    Returns (path, trace_iters, trace_costs, n_nodes); path is None when the
    goal was never connected.  The trace records the best goal cost each
    time it improves and is non-increasing by construction.
    """
    d = start.shape[0]
    rng = SplitMix64(seed)
    cap = max_iters + 1
    conf = np.empty((cap, d), dtype=np.float64)
    parent = np.full(cap, -1, dtype=np.int64)
    cost = np.zeros(cap, dtype=np.float64)
    conf[0] = start
    n_nodes = 1

    # nodes with a verified local connection to the goal
    conn_idx = []
    conn_dist = []
    best_cost = math.inf
    best_node = -1
    trace_it = []
    trace_cost = []

    x_rand = np.empty(d, dtype=np.float64)
    x_new = np.empty(d, dtype=np.float64)

    def dist_to_all(x, m):
        acc = np.zeros(m, dtype=np.float64)
        if kind == KIND_ARM:
            for i in range(d):
                dd = wrap_angles(x[i] - conf[:m, i])
                acc += dd * dd
        elif kind == KIND_RIGID:
            for i in range(2):
                dd = x[i] - conf[:m, i]
                acc += dd * dd
            dd = w_theta * wrap_angles(x[2] - conf[:m, 2])
            acc += dd * dd
        else:
            for i in range(d):
                dd = x[i] - conf[:m, i]
                acc += dd * dd
        return np.sqrt(acc)

    def s_free(x):
        return config_free(x, kind, verts, lengths, base, contained, rects, bounds)

    def s_steer(x, y):
        return steer(x, y, kind, verts, lengths, base, contained, w_theta,
                     rects, bounds, resolution)

    for it in range(max_iters):
        if rng.uniform() < goal_bias:
            x_rand[:] = goal
        else:
            if kind == KIND_ARM:
                for i in range(d):
                    x_rand[i] = wrap_angle(-math.pi + rng.uniform() * TWO_PI)
            else:
                x_rand[0] = bounds[0] + rng.uniform() * (bounds[2] - bounds[0])
                x_rand[1] = bounds[1] + rng.uniform() * (bounds[3] - bounds[1])
                if kind == KIND_RIGID:
                    x_rand[2] = wrap_angle(-math.pi + rng.uniform() * TWO_PI)

        dists = dist_to_all(x_rand, n_nodes)
        near = int(np.argmin(dists))
        dnear = float(dists[near])
        if dnear < 1e-12:
            continue
        if dnear <= step_size:
            x_new[:] = x_rand
        else:
            _interp_into(conf[near], x_rand, step_size / dnear, kind, x_new)
        if not s_free(x_new):
            continue

        radius = rewire_gamma * (math.log(n_nodes + 1.0) / (n_nodes + 1.0)) ** (1.0 / d)
        if radius > step_size:
            radius = step_size
        nd = dist_to_all(x_new, n_nodes)
        neighbors = np.nonzero(nd <= radius)[0].tolist()
        candidates = list(neighbors)
        if nd[near] > radius:
            candidates.append(near)

        # pick the cheapest collision-free parent
        keys = sorted((cost[i] + nd[i], i) for i in candidates)
        new_idx = -1
        for key, i in keys:
            if s_steer(conf[i], x_new):
                new_idx = n_nodes
                conf[new_idx] = x_new
                parent[new_idx] = i
                cost[new_idx] = key
                n_nodes += 1
                break
        if new_idx == -1:
            continue

        # rewire neighbors through the new node when that is cheaper
        conn_dirty = False
        for j in neighbors:
            if j == parent[new_idx]:
                continue
            c_new = cost[new_idx] + nd[j]
            if c_new < cost[j] and s_steer(conf[new_idx], conf[j]):
                parent[j] = new_idx
                delta = c_new - cost[j]
                stack = [j]
                while stack:
                    k = stack.pop()
                    cost[k] += delta
                    for m in range(n_nodes):
                        if parent[m] == k:
                            stack.append(m)
                conn_dirty = True

        dg = config_distance(x_new, goal, kind, w_theta)
        if dg <= step_size and s_steer(x_new, goal):
            conn_idx.append(new_idx)
            conn_dist.append(dg)
            conn_dirty = True

        if conn_dirty and conn_idx:
            bc = math.inf
            bn = -1
            for k in range(len(conn_idx)):
                c = cost[conn_idx[k]] + conn_dist[k]
                if c < bc:
                    bc = c
                    bn = conn_idx[k]
            if bc < best_cost:
                best_cost = bc
                best_node = bn
                trace_it.append(it)
                trace_cost.append(bc)

    if best_node == -1:
        return None, np.asarray(trace_it, dtype=np.int64), np.asarray(trace_cost, dtype=np.float64), n_nodes

    rev = []
    k = best_node
    while k != -1:
        rev.append(k)
        k = int(parent[k])
    rev.reverse()
    m = len(rev)
    append_goal = config_distance(conf[best_node], goal, kind, w_theta) != 0.0
    path = np.empty((m + (1 if append_goal else 0), d), dtype=np.float64)
    for i, k in enumerate(rev):
        path[i] = conf[k]
    if append_goal:
        path[m] = goal
    return path, np.asarray(trace_it, dtype=np.int64), np.asarray(trace_cost, dtype=np.float64), n_nodes
