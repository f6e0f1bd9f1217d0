"""Classical planners that supply near-optimal supervision paths.

Point robots use grid search (8-connected, no corner cutting) followed by
shortcut smoothing; rigid bodies and arms use the anytime optimizing tree
planner from the kernel backend.  All solvers are deterministic given a
seed.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import KIND_POINT
from .collision import InflatedView
from .steering import as_path

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ExpertConfig:
    planner: str = "auto"           # "grid", "tree" or "auto" (grid iff point robot)
    cell_size: float = 0.25         # grid planner
    max_iters: int = 2000           # tree planner iteration budget
    step_size: float = 1.0
    goal_bias: float = 0.1
    rewire_gamma: float = 12.0
    smooth_rounds: int = 80
    resolution: float | None = None  # steering resolution; None = cspace default
    seed: int = 0

    def __post_init__(self):
        if self.planner not in ("auto", "grid", "tree"):
            raise ValueError(f"unknown planner kind {self.planner!r}")
        if self.cell_size <= 0 or self.max_iters < 1 or self.smooth_rounds < 0:
            raise ValueError("expert budgets must be positive")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ValueError(f"goal_bias must be in [0, 1], got {self.goal_bias}")


# ---------------------------------------------------------------------------
# occupancy-grid search
# ---------------------------------------------------------------------------

_MOVES = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))


def grid_astar(blocked: np.ndarray, start, goal):
    """8-connected A* over an occupancy grid.

    Diagonal moves are disallowed when either orthogonal neighbor is
    blocked (no corner cutting).  Heuristic is Euclidean in cell units;
    ties on f prefer the larger g.  Returns (cells, n_straight, n_diag)
    with exact step counts, or None when unreachable.
    """
    ny, nx = blocked.shape
    sx, sy = start
    gx, gy = goal
    if blocked[sy, sx] or blocked[gy, gx]:
        return None
    size = ny * nx

    def idx(x, y):
        return y * nx + x

    g = np.full(size, np.inf)
    ns = np.zeros(size, dtype=np.int64)
    ndg = np.zeros(size, dtype=np.int64)
    parent = np.full(size, -1, dtype=np.int64)
    closed = np.zeros(size, dtype=bool)
    s = idx(sx, sy)
    t = idx(gx, gy)
    g[s] = 0.0
    counter = 0
    h0 = math.sqrt((gx - sx) ** 2 + (gy - sy) ** 2)
    heap = [(h0, 0.0, counter, s)]
    while heap:
        f, neg_g, _, cur = heapq.heappop(heap)
        if closed[cur]:
            continue
        closed[cur] = True
        if cur == t:
            break
        cx = cur % nx
        cy = cur // nx
        for dx, dy in _MOVES:
            x = cx + dx
            y = cy + dy
            if x < 0 or x >= nx or y < 0 or y >= ny or blocked[y, x]:
                continue
            diag = dx != 0 and dy != 0
            if diag and (blocked[cy, x] or blocked[y, cx]):
                continue
            nxt = idx(x, y)
            if closed[nxt]:
                continue
            cand = g[cur] + (SQRT2 if diag else 1.0)
            if cand < g[nxt]:
                g[nxt] = cand
                ns[nxt] = ns[cur] + (0 if diag else 1)
                ndg[nxt] = ndg[cur] + (1 if diag else 0)
                parent[nxt] = cur
                counter += 1
                h = math.sqrt((gx - x) ** 2 + (gy - y) ** 2)
                heapq.heappush(heap, (cand + h, -cand, counter, nxt))
    if not closed[t]:
        return None
    cells = []
    cur = t
    while cur != -1:
        cells.append((cur % nx, cur // nx))
        cur = int(parent[cur])
    cells.reverse()
    return cells, int(ns[t]), int(ndg[t])


def grid_cost(n_straight: int, n_diag: int, cell_size: float) -> float:
    """Canonical cost of a grid path, independent of traversal order."""
    return (n_straight + n_diag * SQRT2) * cell_size


def build_occupancy(view: InflatedView, cell_size: float):
    """Conservative rasterization: a cell is blocked if its rectangle touches
    any inflated obstacle or pokes outside the workspace."""
    b = view.bounds
    nx = max(1, int(math.ceil((b[2] - b[0]) / cell_size - 1e-12)))
    ny = max(1, int(math.ceil((b[3] - b[1]) / cell_size - 1e-12)))
    x_lo = b[0] + cell_size * np.arange(nx)
    y_lo = b[1] + cell_size * np.arange(ny)
    x_hi = x_lo + cell_size
    y_hi = y_lo + cell_size
    blocked = np.zeros((ny, nx), dtype=bool)
    blocked |= (x_hi > b[2] + 1e-9)[None, :]
    blocked |= (y_hi > b[3] + 1e-9)[:, None]
    for r in view.rects:
        overlap_x = (x_hi >= r[0]) & (x_lo <= r[2])
        overlap_y = (y_hi >= r[1]) & (y_lo <= r[3])
        blocked |= overlap_y[:, None] & overlap_x[None, :]
    centers_x = x_lo + 0.5 * cell_size
    centers_y = y_lo + 0.5 * cell_size
    return blocked, centers_x, centers_y


def _nearest_connectable_cell(point, blocked, cx, cy, view, resolution, max_candidates=256):
    """Free cell whose center the point can steer to, preferring close ones."""
    free_y, free_x = np.nonzero(~blocked)
    if free_x.size == 0:
        return None
    d2 = (cx[free_x] - point[0]) ** 2 + (cy[free_y] - point[1]) ** 2
    order = np.argsort(d2, kind="stable")[:max_candidates]
    for k in order:
        cell = (int(free_x[k]), int(free_y[k]))
        center = np.array([cx[cell[0]], cy[cell[1]]])
        if view.steer(point, center, resolution):
            return cell
    return None


def _solve_grid(start, goal, view, cfg, resolution):
    blocked, cx, cy = build_occupancy(view, cfg.cell_size)
    s_cell = _nearest_connectable_cell(start, blocked, cx, cy, view, resolution)
    g_cell = _nearest_connectable_cell(goal, blocked, cx, cy, view, resolution)
    if s_cell is None or g_cell is None:
        return None
    if s_cell == g_cell:
        center = np.array([cx[s_cell[0]], cy[s_cell[1]]])
        waypoints = [start, center, goal]
    else:
        res = grid_astar(blocked, s_cell, g_cell)
        if res is None:
            return None
        cells, _, _ = res
        waypoints = [start] + [np.array([cx[i], cy[j]]) for i, j in cells] + [goal]
    path = [waypoints[0]]
    for w in waypoints[1:]:
        if not np.array_equal(w, path[-1]):
            path.append(w)
    if len(path) < 2:
        path = [start, goal]
    return np.asarray(path, dtype=np.float64)


def _solve_tree(start, goal, view, cfg, resolution, seed):
    cs = view.cspace
    path, _, _, _ = _kernels.rrt_star(
        start, goal, cs.kind, cs.verts, cs.lengths, cs.base, cs.contained,
        cs.w_theta, view.rects, view.bounds, resolution,
        cfg.max_iters, cfg.step_size, cfg.goal_bias, cfg.rewire_gamma, seed)
    return path


def tree_plan_trace(start, goal, view: InflatedView, cfg: ExpertConfig, seed=None):
    """Raw tree planner result (path, trace iters, trace costs, node count)."""
    cs = view.cspace
    resolution = cfg.resolution or cs.default_resolution
    if seed is None:
        seed = cfg.seed
    return _kernels.rrt_star(
        cs.check(start), cs.check(goal), cs.kind, cs.verts, cs.lengths, cs.base,
        cs.contained, cs.w_theta, view.rects, view.bounds, resolution,
        cfg.max_iters, cfg.step_size, cfg.goal_bias, cfg.rewire_gamma, seed)


def shortcut_smooth(path, view: InflatedView, rounds: int, seed, resolution=None):
    """Randomized shortcutting; never increases cost, never breaks feasibility.

    A direct start-to-goal shortcut is attempted first, then `rounds`
    random waypoint pairs are tried.
    """
    path = as_path(path, view.cspace.dim)
    if resolution is None:
        resolution = view.cspace.default_resolution
    if path.shape[0] < 2:
        return path
    if view.steer(path[0], path[-1], resolution):
        return np.stack([path[0], path[-1]])
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pts = [path[i] for i in range(path.shape[0])]
    for _ in range(rounds):
        n = len(pts)
        if n < 4:
            break
        i = int(rng.integers(0, n))
        j = int(rng.integers(0, n))
        if i > j:
            i, j = j, i
        if j - i < 2:
            continue
        if view.steer(pts[i], pts[j], resolution):
            del pts[i + 1:j]
    return np.stack(pts)


def solve_query(query, view: InflatedView, cfg: ExpertConfig, seed=None):
    """Near-optimal feasible path for (start, goal), or None on failure.

    Invalid endpoints are an input error; planner exhaustion returns None
    so callers can redraw the query.
    """
    cs = view.cspace
    start = cs.check(query[0])
    goal = cs.check(query[1])
    if not view.is_valid(start):
        raise ValueError("query start configuration is invalid")
    if not view.is_valid(goal):
        raise ValueError("query goal configuration is invalid")
    resolution = cfg.resolution or cs.default_resolution
    if seed is None:
        seed = cfg.seed

    if view.steer(start, goal, resolution):
        return np.stack([start, goal])

    planner = cfg.planner
    if planner == "auto":
        planner = "grid" if cs.kind == KIND_POINT else "tree"
    if planner == "grid" and cs.kind != KIND_POINT:
        raise ValueError("grid planner only supports point robots")

    rng = np.random.default_rng([int(seed) % (2**63), 17])
    if planner == "grid":
        path = _solve_grid(start, goal, view, cfg, resolution)
    else:
        path = _solve_tree(start, goal, view, cfg, resolution, int(seed) & (2**64 - 1))
    if path is None:
        return None
    return shortcut_smooth(path, view, cfg.smooth_rounds, rng, resolution)
