"""Independent verification oracles.

These deliberately re-derive results through different routes than the
main code paths: tangent-circle geometry for curve lengths, a closed-form
integral for exposure, brute-force pairwise dominance for front sorting,
and series-evaluated Bessel functions for the circular sampler.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import Pose, TWO_PI
from .pareto import Fitness

# --- tangent-circle construction of individual curve families -------------


def _turn_center(pose: Pose, rho: float, turn: int):
    # turn: +1 left, -1 right
    return (pose.x - turn * rho * math.sin(pose.theta), pose.y + turn * rho * math.cos(pose.theta))


def _heading_on_circle(point, center, turn: int) -> float:
    vx, vy = point[0] - center[0], point[1] - center[1]
    if turn > 0:
        return math.atan2(vx, -vy) % TWO_PI
    return math.atan2(-vx, vy) % TWO_PI


def _arc_amount(from_heading: float, to_heading: float, turn: int) -> float:
    if turn > 0:
        return (to_heading - from_heading) % TWO_PI
    return (from_heading - to_heading) % TWO_PI


def _propagate(pose: Pose, family: str, segs, rho: float) -> Pose:
    x, y, th = pose.x, pose.y, pose.theta
    for seg_type, s in zip(family, segs):
        if seg_type == "S":
            x += s * math.cos(th)
            y += s * math.sin(th)
        elif seg_type == "L":
            nt = th + s / rho
            x += rho * (math.sin(nt) - math.sin(th))
            y -= rho * (math.cos(nt) - math.cos(th))
            th = nt
        else:
            nt = th - s / rho
            x += rho * (math.sin(th) - math.sin(nt))
            y -= rho * (math.cos(th) - math.cos(nt))
            th = nt
    return Pose(x, y, th)


def _endpoint_error(start: Pose, end: Pose, family: str, segs, rho: float) -> float:
    got = _propagate(start, family, segs, rho)
    ang = abs((got.theta - end.theta + math.pi) % TWO_PI - math.pi)
    return max(abs(got.x - end.x), abs(got.y - end.y), ang)


def _csc_candidates(start: Pose, end: Pose, rho: float, family: str):
    t1 = 1 if family[0] == "L" else -1
    t3 = 1 if family[2] == "L" else -1
    c1 = _turn_center(start, rho, t1)
    c2 = _turn_center(end, rho, t3)
    wx, wy = c2[0] - c1[0], c2[1] - c1[1]
    dist = math.hypot(wx, wy)
    psi = math.atan2(wy, wx)
    if t1 == t3:
        p = dist
        phi = psi
    else:
        if dist < 2.0 * rho:
            return []
        p = math.sqrt(dist * dist - 4.0 * rho * rho)
        offset = math.atan2(2.0 * rho, p)
        phi = psi + offset if t1 > 0 else psi - offset
    arc1 = _arc_amount(start.theta, phi % TWO_PI, t1) * rho
    arc3 = _arc_amount(phi % TWO_PI, end.theta, t3) * rho
    return [(arc1, p, arc3)]


def _ccc_candidates(start: Pose, end: Pose, rho: float, family: str):
    t1 = 1 if family[0] == "L" else -1
    tm = -t1
    c1 = _turn_center(start, rho, t1)
    c3 = _turn_center(end, rho, t1)
    wx, wy = c3[0] - c1[0], c3[1] - c1[1]
    dist = math.hypot(wx, wy)
    if dist > 4.0 * rho or dist == 0.0:
        return []
    half = dist / 2.0
    h = math.sqrt(max(4.0 * rho * rho - half * half, 0.0))
    base = ((c1[0] + c3[0]) / 2.0, (c1[1] + c3[1]) / 2.0)
    nx, ny = -wy / dist, wx / dist
    out = []
    for sign in (1.0, -1.0):
        c2 = (base[0] + sign * h * nx, base[1] + sign * h * ny)
        p12 = ((c1[0] + c2[0]) / 2.0, (c1[1] + c2[1]) / 2.0)
        p23 = ((c2[0] + c3[0]) / 2.0, (c2[1] + c3[1]) / 2.0)
        phi1 = _heading_on_circle(p12, c1, t1)
        phi2 = _heading_on_circle(p23, c3, t1)
        arc1 = _arc_amount(start.theta, phi1, t1) * rho
        arc2 = _arc_amount(phi1, phi2, tm) * rho
        arc3 = _arc_amount(phi2, end.theta, t1) * rho
        out.append((arc1, arc2, arc3))
    return out


def family_oracle_length(start: Pose, end: Pose, rho: float, family: str) -> float | None:
    """Shortest verified candidate of one family, or None if infeasible."""
    if family[1] == "S":
        candidates = _csc_candidates(start, end, rho, family)
    else:
        candidates = _ccc_candidates(start, end, rho, family)
    scale = max(1.0, abs(start.x), abs(start.y), abs(end.x), abs(end.y), rho)
    best = None
    for segs in candidates:
        if _endpoint_error(start, end, family, segs, rho) > 1e-6 * scale:
            continue
        total = sum(segs)
        if best is None or total < best:
            best = total
    return best


# --- closed-form exposure of a straight leg past one node -----------------


def straight_exposure_closed_form(alpha: float, lateral: float, t0: float, t1: float) -> float:
    """Integral of alpha / (lateral^2 + t^2) dt from t0 to t1 (no cap active)."""
    return alpha / lateral * (math.atan(t1 / lateral) - math.atan(t0 / lateral))


# --- brute-force dominance classification ---------------------------------


def brute_force_fronts(fits: list[Fitness]) -> list[list[int]]:
    """Peel non-dominated layers by exhaustive pairwise comparison."""
    def dom(a, b):
        return (
            a.reward >= b.reward
            and a.exposure <= b.exposure
            and (a.reward > b.reward or a.exposure < b.exposure)
        )

    remaining = list(range(len(fits)))
    fronts = []
    while remaining:
        layer = [
            i
            for i in remaining
            if not any(dom(fits[j], fits[i]) for j in remaining if j != i)
        ]
        fronts.append(sorted(layer))
        remaining = [i for i in remaining if i not in set(layer)]
    return fronts


# --- series Bessel functions and the circular density ---------------------


def bessel_i0(x: float, terms: int = 60) -> float:
    half = x / 2.0
    total = 1.0
    term = 1.0
    for k in range(1, terms):
        term *= (half / k) ** 2
        total += term
    return total


def bessel_i1(x: float, terms: int = 60) -> float:
    half = x / 2.0
    term = half
    total = term
    for k in range(1, terms):
        term *= half * half / (k * (k + 1))
        total += term
    return total


def von_mises_density(x: float, mean: float, kappa: float) -> float:
    return math.exp(kappa * math.cos(x - mean)) / (TWO_PI * bessel_i0(kappa))


def von_mises_bin_probabilities(mean: float, kappa: float, bins: int) -> np.ndarray:
    """Per-bin probabilities over [0, 2*pi), Simpson-integrated per bin."""
    probs = np.empty(bins)
    width = TWO_PI / bins
    for b in range(bins):
        lo = b * width
        xs = np.linspace(lo, lo + width, 9)
        ys = np.array([von_mises_density(x, mean, kappa) for x in xs])
        w = np.ones(9)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        probs[b] = width / 8.0 / 3.0 * float(w @ ys)
    return probs / probs.sum()


# --- Monte-Carlo hypervolume ----------------------------------------------


def monte_carlo_hypervolume(front: list[Fitness], reference, samples: int, seed: int):
    """Dominated-area estimate and its standard error."""
    rng = np.random.default_rng(seed)
    r_ref, e_ref = reference
    r_hi = max(f.reward for f in front)
    e_lo = min(f.exposure for f in front)
    box = (r_hi - r_ref) * (e_ref - e_lo)
    if box <= 0.0:
        return 0.0, 0.0
    rs = r_ref + rng.random(samples) * (r_hi - r_ref)
    es = e_lo + rng.random(samples) * (e_ref - e_lo)
    hit = np.zeros(samples, dtype=bool)
    for f in front:
        hit |= (rs <= f.reward) & (es >= f.exposure)
    frac = hit.mean()
    se = math.sqrt(max(frac * (1.0 - frac), 1e-12) / samples)
    return box * float(frac), box * se
