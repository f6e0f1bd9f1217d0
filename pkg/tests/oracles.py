"""Independent reference implementations used only to check the real ones."""

import heapq
import math

import numpy as np

SQRT2 = math.sqrt(2.0)


def dijkstra_grid(blocked, start, goal):
    """Uniform-cost search over an 8-connected grid, no corner cutting.

    Returns (cost_float, n_straight, n_diag) or None.  Written separately
    from the production search (dict-based, no heuristic) so the two can
    cross-check each other.
    """
    ny, nx = blocked.shape
    if blocked[start[1], start[0]] or blocked[goal[1], goal[0]]:
        return None
    best = {start: (0.0, 0, 0)}
    heap = [(0.0, start)]
    done = set()
    while heap:
        d, cell = heapq.heappop(heap)
        if cell in done:
            continue
        done.add(cell)
        if cell == goal:
            g, a, b = best[cell]
            return g, a, b
        x, y = cell
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1),
                       (1, 1), (1, -1), (-1, 1), (-1, -1)):
            px, py = x + dx, y + dy
            if px < 0 or px >= nx or py < 0 or py >= ny or blocked[py, px]:
                continue
            diag = dx != 0 and dy != 0
            if diag and (blocked[y, px] or blocked[py, x]):
                continue
            step = SQRT2 if diag else 1.0
            cand = best[cell][0] + step
            prev = best.get((px, py))
            if prev is None or cand < prev[0]:
                best[(px, py)] = (cand,
                                  best[cell][1] + (0 if diag else 1),
                                  best[cell][2] + (1 if diag else 0))
                heapq.heappush(heap, (cand, (px, py)))
    return None


def segment_crosses_rects(sx, sy, gx, gy, rects):
    """Vectorized exact segment vs box overlap for query batches.

    Independent of the kernel implementation: works on whole arrays with
    the slab method expressed in numpy.  Boundary contact counts.
    """
    n = sx.shape[0]
    hit = np.zeros(n, dtype=bool)
    dx = gx - sx
    dy = gy - sy
    for r in rects:
        with np.errstate(divide="ignore", invalid="ignore"):
            t0 = np.zeros(n)
            t1 = np.ones(n)
            ok = np.ones(n, dtype=bool)
            for p, d, lo, hi in ((sx, dx, r[0], r[2]), (sy, dy, r[1], r[3])):
                par = d == 0.0
                ok &= ~par | ((p >= lo) & (p <= hi))
                with np.errstate(divide="ignore"):
                    ta = np.where(par, 0.0, (lo - p) / np.where(par, 1.0, d))
                    tb = np.where(par, 1.0, (hi - p) / np.where(par, 1.0, d))
                lo_t = np.minimum(ta, tb)
                hi_t = np.maximum(ta, tb)
                t0 = np.where(par, t0, np.maximum(t0, lo_t))
                t1 = np.where(par, t1, np.minimum(t1, hi_t))
            hit |= ok & (t0 <= t1)
    return hit


def point_free_mask(xs, ys, rects, bounds):
    """Vectorized point-robot validity (bounds inclusive, obstacles exclusive)."""
    ok = (xs >= bounds[0]) & (xs <= bounds[2]) & (ys >= bounds[1]) & (ys <= bounds[3])
    for r in rects:
        ok &= ~((xs >= r[0]) & (xs <= r[2]) & (ys >= r[1]) & (ys <= r[3]))
    return ok


def crossing_probability_oracle(rects, bounds, n_samples, seed, chunk=1_000_000):
    """Brute-force estimate of the chance a uniform free-space query pair
    has a straight connection crossing any box.

    This is the independent check for the non-triviality estimator: it
    uses its own RNG stream and the exact (not discretized) segment test.
    """
    rng = np.random.default_rng(seed)
    crossed = 0
    total = 0
    while total < n_samples:
        m = min(chunk, n_samples - total)
        pts = []
        need = 2 * m
        while need > 0:
            xs = rng.uniform(bounds[0], bounds[2], need)
            ys = rng.uniform(bounds[1], bounds[3], need)
            keep = point_free_mask(xs, ys, rects, bounds)
            pts.append(np.column_stack([xs[keep], ys[keep]]))
            need -= int(keep.sum())
        valid = np.concatenate(pts)[:2 * m]
        s = valid[:m]
        g = valid[m:]
        crossed += int(segment_crosses_rects(s[:, 0], s[:, 1], g[:, 0], g[:, 1], rects).sum())
        total += m
    return crossed / total
