"""Numeric kernel backend selection.

The hot loops (collision tests, steering discretization, the optimizing
tree planner) live in a compiled extension built from `_core.pyx`.  When
the extension is missing, or when ``NTPLAN_PURE_PYTHON`` is set in the
environment, the numpy fallback in `_py.py` is used instead.  Both
backends implement the same functions with bit-identical arithmetic.
"""

import os

from . import _py

if os.environ.get("NTPLAN_PURE_PYTHON"):
    _impl = _py
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        _impl = _py
        BACKEND = "python"

KIND_POINT = _py.KIND_POINT
KIND_RIGID = _py.KIND_RIGID
KIND_ARM = _py.KIND_ARM

wrap_angle = _py.wrap_angle
wrap_angles = _py.wrap_angles

config_distance = _impl.config_distance
config_free = _impl.config_free
configs_free = _impl.configs_free
fk_points = _impl.fk_points
segment_hits_rect = _impl.segment_hits_rect
steer = _impl.steer
rrt_star = _impl.rrt_star
