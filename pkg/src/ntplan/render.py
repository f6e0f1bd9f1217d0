"""Deterministic SVG rendering of environments, paths and query scatters.

Output is plain text with fixed-precision coordinates, so identical
inputs give byte-identical files.  Start markers are green, goal markers
blue, expert/solution paths magenta; padded obstacle outlines are drawn
dashed.
"""

import numpy as np

from ._kernels import KIND_ARM, KIND_POINT
from .geometry import Environment, NLinkArm, forward_kinematics

_F = "{:.4f}".format


class _Canvas:
    def __init__(self, env: Environment, width: float):
        ws = env.workspace
        self.sx = width / (ws.x_max - ws.x_min)
        self.width = width
        self.height = (ws.y_max - ws.y_min) * self.sx
        self.x0 = ws.x_min
        self.y1 = ws.y_max

    def pt(self, x, y):
        return (x - self.x0) * self.sx, (self.y1 - y) * self.sx

    def fmt(self, x, y):
        px, py = self.pt(x, y)
        return f"{_F(px)},{_F(py)}"


def _rect_el(canvas, box, style):
    x, y = canvas.pt(box[0], box[3])
    w = (box[2] - box[0]) * canvas.sx
    h = (box[3] - box[1]) * canvas.sx
    return (f'<rect x="{_F(x)}" y="{_F(y)}" width="{_F(w)}" height="{_F(h)}" {style}/>')


def _polyline_el(canvas, pts, style):
    coords = " ".join(canvas.fmt(p[0], p[1]) for p in pts)
    return f'<polyline points="{coords}" {style}/>'


def _circle_el(canvas, x, y, r, style):
    px, py = canvas.pt(x, y)
    return f'<circle cx="{_F(px)}" cy="{_F(py)}" r="{_F(r)}" {style}/>'


def render_svg(env: Environment, paths=(), queries=(), arm_poses=(),
               padding: float = 0.0, width: float = 480.0) -> str:
    """Render an environment with optional overlays; returns SVG text.

    paths: iterables of (L, d) waypoint arrays, drawn as magenta polylines
    (x, y part for planar robots; arm paths render each waypoint's pose).
    queries: (start, goal) pairs scattered as green/blue dots with a thin
    connecting line.  arm_poses: joint vectors drawn as the arm's links.
    """
    canvas = _Canvas(env, width)
    cs = env.cspace()
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_F(canvas.width)}" '
        f'height="{_F(canvas.height)}" viewBox="0 0 {_F(canvas.width)} {_F(canvas.height)}">',
        f"<desc>environment={env.name}</desc>",
        f'<rect x="0" y="0" width="{_F(canvas.width)}" height="{_F(canvas.height)}" '
        f'fill="#ffffff" stroke="#222222" stroke-width="1.5"/>',
    ]
    for obs in env.obstacles:
        if padding > 0:
            out.append(_rect_el(canvas, obs.aabb(padding),
                                'fill="none" stroke="#cc8844" stroke-width="1" '
                                'stroke-dasharray="4 3"'))
        out.append(_rect_el(canvas, obs.aabb(), 'fill="#555555"'))

    if isinstance(env.robot, NLinkArm):
        for q in arm_poses:
            pts = forward_kinematics(np.asarray(q, dtype=np.float64), env.robot)
            out.append(_polyline_el(canvas, pts,
                                    'fill="none" stroke="#3366aa" stroke-width="2" '
                                    'stroke-linecap="round"'))
            out.append(_circle_el(canvas, pts[0, 0], pts[0, 1], 3.0, 'fill="#222222"'))

    for path in paths:
        path = np.atleast_2d(np.asarray(path, dtype=np.float64))
        if cs.kind == KIND_ARM:
            for q in path:
                pts = forward_kinematics(q, env.robot)
                out.append(_polyline_el(canvas, pts,
                                        'fill="none" stroke="#cc22cc" stroke-width="1.2" '
                                        'opacity="0.7"'))
        else:
            out.append(_polyline_el(canvas, path[:, :2],
                                    'fill="none" stroke="#cc22cc" stroke-width="1.8"'))
        wp = ";".join(",".join(_F(v) for v in row) for row in path)
        out.append(f"<desc>path={wp}</desc>")

    for start, goal in queries:
        start = np.asarray(start, dtype=np.float64)
        goal = np.asarray(goal, dtype=np.float64)
        if cs.kind == KIND_ARM:
            # scatter the arm tip positions
            s_xy = forward_kinematics(start, env.robot)[-1]
            g_xy = forward_kinematics(goal, env.robot)[-1]
        else:
            s_xy, g_xy = start[:2], goal[:2]
        out.append(_polyline_el(canvas, [s_xy, g_xy],
                                'fill="none" stroke="#bbbbbb" stroke-width="0.6"'))
        out.append(_circle_el(canvas, s_xy[0], s_xy[1], 2.2, 'fill="#22aa22"'))
        out.append(_circle_el(canvas, g_xy[0], g_xy[1], 2.2, 'fill="#2244cc"'))

    out.append("</svg>")
    return "\n".join(out) + "\n"


def save_svg(text: str, path):
    with open(path, "w") as fh:
        fh.write(text)
