"""Shortest bounded-curvature (Dubins) curves and arc-length sampling.

A curve between two oriented poses is the minimum over the six classic
families (LSL, RSR, LSR, RSL, RLR, LRL).  Curves chain into tours whose
consecutive endpoints share position and heading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Fixed enumeration order; ties between families resolve to the first one.
FAMILIES = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")


def norm_angle(theta: float) -> float:
    """Normalize an angle into [0, 2*pi)."""
    return theta % TWO_PI


@dataclass(frozen=True)
class Pose:
    """Planar position plus heading; heading is normalized on construction."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", self.theta % TWO_PI)


@dataclass(frozen=True)
class DubinsPath:
    """One curve between two poses.

    ``seg_params`` holds the three segment lengths in meters (arc segments
    are already multiplied by the radius).
    """

    family: str
    radius: float
    seg_params: tuple[float, float, float]
    start: Pose
    length: float


@dataclass(frozen=True)
class CompositePath:
    """A chain of Dubins curves forming a tour."""

    curves: tuple[DubinsPath, ...]
    total_length: float


# --- family solvers -------------------------------------------------------
#
# Each solver works in normalized coordinates: d = distance / radius,
# a / b are start / end headings relative to the connecting segment.
# They return (t, p, q) in normalized units, or None when infeasible.


def _lsl(a, b, d):
    p_sq = 2.0 + d * d - 2.0 * math.cos(a - b) + 2.0 * d * (math.sin(a) - math.sin(b))
    if p_sq < 0.0:
        return None
    tmp = math.atan2(math.cos(b) - math.cos(a), d + math.sin(a) - math.sin(b))
    return (-a + tmp) % TWO_PI, math.sqrt(p_sq), (b - tmp) % TWO_PI


def _rsr(a, b, d):
    p_sq = 2.0 + d * d - 2.0 * math.cos(a - b) + 2.0 * d * (math.sin(b) - math.sin(a))
    if p_sq < 0.0:
        return None
    tmp = math.atan2(math.cos(a) - math.cos(b), d - math.sin(a) + math.sin(b))
    return (a - tmp) % TWO_PI, math.sqrt(p_sq), (tmp - b) % TWO_PI


def _lsr(a, b, d):
    p_sq = -2.0 + d * d + 2.0 * math.cos(a - b) + 2.0 * d * (math.sin(a) + math.sin(b))
    if p_sq < 0.0:
        return None
    p = math.sqrt(p_sq)
    tmp = math.atan2(-math.cos(a) - math.cos(b), d + math.sin(a) + math.sin(b)) - math.atan2(-2.0, p)
    return (-a + tmp) % TWO_PI, p, (-b + tmp) % TWO_PI


def _rsl(a, b, d):
    p_sq = -2.0 + d * d + 2.0 * math.cos(a - b) - 2.0 * d * (math.sin(a) + math.sin(b))
    if p_sq < 0.0:
        return None
    p = math.sqrt(p_sq)
    tmp = math.atan2(math.cos(a) + math.cos(b), d - math.sin(a) - math.sin(b)) - math.atan2(2.0, p)
    return (a - tmp) % TWO_PI, p, (b - tmp) % TWO_PI


def _rlr(a, b, d):
    tmp = (6.0 - d * d + 2.0 * math.cos(a - b) + 2.0 * d * (math.sin(a) - math.sin(b))) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = (TWO_PI - math.acos(tmp)) % TWO_PI
    phi = math.atan2(math.cos(a) - math.cos(b), d - math.sin(a) + math.sin(b))
    t = (a - phi + p / 2.0) % TWO_PI
    return t, p, (a - b - t + p) % TWO_PI


def _lrl(a, b, d):
    tmp = (6.0 - d * d + 2.0 * math.cos(a - b) + 2.0 * d * (math.sin(b) - math.sin(a))) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = (TWO_PI - math.acos(tmp)) % TWO_PI
    phi = math.atan2(math.cos(a) - math.cos(b), d + math.sin(a) - math.sin(b))
    t = (-a - phi + p / 2.0) % TWO_PI
    return t, p, (b - a - t + p) % TWO_PI


_SOLVERS = {
    "LSL": _lsl,
    "RSR": _rsr,
    "LSR": _lsr,
    "RSL": _rsl,
    "RLR": _rlr,
    "LRL": _lrl,
}


def dubins_shortest(start: Pose, end: Pose, radius: float) -> DubinsPath:
    """Minimum-length curve over all feasible families for this pose pair."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if start.x == end.x and start.y == end.y and start.theta == end.theta:
        return DubinsPath("LSL", radius, (0.0, 0.0, 0.0), start, 0.0)
    dx = end.x - start.x
    dy = end.y - start.y
    d = math.hypot(dx, dy) / radius
    phi = math.atan2(dy, dx)
    a = (start.theta - phi) % TWO_PI
    b = (end.theta - phi) % TWO_PI

    best_family = None
    best = None
    best_len = math.inf
    for family in FAMILIES:
        res = _SOLVERS[family](a, b, d)
        if res is None:
            continue
        total = sum(res)
        if total < best_len:
            best_len = total
            best = res
            best_family = family
    assert best is not None  # at least one CSC family always exists
    seg = tuple(v * radius for v in best)
    return DubinsPath(best_family, radius, seg, start, best_len * radius)


def path_length(path: DubinsPath | CompositePath) -> float:
    if isinstance(path, CompositePath):
        return path.total_length
    return path.length


def _advance(x, y, theta, seg_type, s, rho):
    """Pose after moving arc length s along one segment; s may be an array."""
    if seg_type == "S":
        return x + s * np.cos(theta), y + s * np.sin(theta), theta + 0.0 * s
    if seg_type == "L":
        nt = theta + s / rho
        return (
            x + rho * (np.sin(nt) - np.sin(theta)),
            y - rho * (np.cos(nt) - np.cos(theta)),
            nt,
        )
    nt = theta - s / rho
    return (
        x + rho * (np.sin(theta) - np.sin(nt)),
        y - rho * (np.cos(theta) - np.cos(nt)),
        nt,
    )


def sample_many(path: DubinsPath, s: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized poses (x, y, theta arrays) at arc lengths ``s``."""
    s = np.asarray(s, dtype=float)
    if s.size and (s.min() < -1e-9 or s.max() > path.length + 1e-9):
        raise ValueError("arc length outside [0, length]")
    s = np.clip(s, 0.0, path.length)

    seg = path.seg_params
    ends = np.array([seg[0], seg[0] + seg[1], path.length])
    idx = np.minimum(np.searchsorted(ends, s, side="right"), 2)

    # entry pose of each of the three segments
    entries = [(path.start.x, path.start.y, path.start.theta)]
    for k in range(2):
        ex, ey, eth = entries[k]
        entries.append(_advance(ex, ey, eth, path.family[k], seg[k], path.radius))

    xs = np.empty_like(s)
    ys = np.empty_like(s)
    ths = np.empty_like(s)
    starts = np.array([0.0, seg[0], seg[0] + seg[1]])
    for k in range(3):
        m = idx == k
        if not m.any():
            continue
        ex, ey, eth = entries[k]
        x, y, th = _advance(ex, ey, eth, path.family[k], s[m] - starts[k], path.radius)
        xs[m], ys[m], ths[m] = x, y, th
    return xs, ys, ths % TWO_PI


def sample(path: DubinsPath | CompositePath, s: float) -> Pose:
    """Pose on the curve (or tour) at arc length s."""
    if s < -1e-9 or s > path_length(path) + 1e-9:
        raise ValueError("arc length outside [0, length]")
    if isinstance(path, CompositePath):
        s = min(max(s, 0.0), path.total_length)
        for curve in path.curves:
            if s <= curve.length or curve is path.curves[-1]:
                return sample(curve, min(s, curve.length))
            s -= curve.length
        raise ValueError("empty composite path")
    x, y, th = sample_many(path, np.array([s]))
    return Pose(float(x[0]), float(y[0]), float(th[0]))


def path_end(path: DubinsPath) -> Pose:
    x, y, th = path.start.x, path.start.y, path.start.theta
    for k in range(3):
        x, y, th = _advance(x, y, th, path.family[k], path.seg_params[k], path.radius)
    return Pose(float(x), float(y), float(th))


def build_tour(poses: list[Pose], radii: list[float]) -> CompositePath:
    """Chain per-pair shortest curves through an ordered pose sequence."""
    if len(poses) < 2:
        raise ValueError("a tour needs at least 2 poses")
    if len(radii) != len(poses) - 1:
        raise ValueError("need exactly one radius per segment")
    curves = []
    total = 0.0
    for i in range(len(poses) - 1):
        curve = dubins_shortest(poses[i], poses[i + 1], radii[i])
        curves.append(curve)
        total += curve.length
    return CompositePath(tuple(curves), total)
