"""Smallest enclosing disk of a planar point set.

``smallest_enclosing_disk`` is the randomized incremental construction
(expected linear time); ``brute_force_sed`` checks every 2- and 3-point
candidate and exists as an independent oracle.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import Point2

# squared-distance slack in normalized coordinates (unit half-extent)
_EPS = 1e-12


@dataclass(frozen=True)
class Disk:
    center: Point2
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", Point2(float(self.center[0]), float(self.center[1])))
        if not (math.isfinite(self.radius) and self.radius >= 0):
            raise ValueError(f"invalid radius {self.radius!r}")

    def contains(self, p, tol: float = 1e-9) -> bool:
        return math.hypot(p[0] - self.center.x, p[1] - self.center.y) <= self.radius + tol


def as_rng(seed=None) -> np.random.Generator:
    """Accept a seed or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def disk_from_two(p, q) -> Disk:
    cx, cy = (p[0] + q[0]) / 2, (p[1] + q[1]) / 2
    return Disk(Point2(cx, cy), math.hypot(p[0] - q[0], p[1] - q[1]) / 2)


def disk_from_three(p, q, r) -> Disk:
    """Circumcircle of three points; degenerate triples use the widest pair."""
    bx, by = q[0] - p[0], q[1] - p[1]
    cx, cy = r[0] - p[0], r[1] - p[1]
    d = 2 * (bx * cy - by * cx)
    spread = max(bx * bx + by * by, cx * cx + cy * cy, (q[0] - r[0]) ** 2 + (q[1] - r[1]) ** 2)
    if abs(d) <= 1e-12 * spread or spread == 0:
        pairs = ((p, q), (p, r), (q, r))
        a, b = max(pairs, key=lambda ab: math.hypot(ab[0][0] - ab[1][0], ab[0][1] - ab[1][1]))
        return disk_from_two(a, b)
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    center = Point2(p[0] + ux, p[1] + uy)
    radius = max(math.hypot(center.x - s[0], center.y - s[1]) for s in (p, q, r))
    return Disk(center, radius)


def _normalize(points):
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("smallest enclosing disk of an empty point set")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    origin = (lo + hi) / 2
    scale = float(np.max(hi - lo)) / 2 or 1.0
    return (pts - origin) / scale, origin, scale


def _denormalize(disk: Disk, origin, scale) -> Disk:
    return Disk(
        Point2(disk.center.x * scale + origin[0], disk.center.y * scale + origin[1]),
        disk.radius * scale,
    )


def _inside(p, disk: Disk) -> bool:
    dx, dy = p[0] - disk.center.x, p[1] - disk.center.y
    return dx * dx + dy * dy <= disk.radius * disk.radius + _EPS


def smallest_enclosing_disk(points, rng=None) -> Disk:
    """Minimum-radius disk containing every point.

    Points are inserted in a random order; a point falling outside the
    current disk must lie on the boundary of the new one, which reduces to
    the same problem with one (then two) boundary points fixed.
    """
    norm, origin, scale = _normalize(points)
    order = as_rng(rng).permutation(len(norm))
    pts = [(float(x), float(y)) for x, y in norm[order]]

    disk = Disk(Point2(*pts[0]), 0.0)
    for i in range(1, len(pts)):
        if _inside(pts[i], disk):
            continue
        # pts[i] is on the boundary of the disk of pts[:i+1]
        q = pts[i]
        disk = Disk(Point2(*q), 0.0)
        for j in range(i):
            if _inside(pts[j], disk):
                continue
            # q and pts[j] both on the boundary
            q2 = pts[j]
            disk = disk_from_two(q, q2)
            for k in range(j):
                if not _inside(pts[k], disk):
                    disk = disk_from_three(q, q2, pts[k])
    return _denormalize(disk, origin, scale)


def brute_force_sed(points) -> Disk:
    """Smallest disk among all pair and triple candidates that enclose every point."""
    norm, origin, scale = _normalize(points)
    pts = [(float(x), float(y)) for x, y in norm]
    candidates = [Disk(Point2(*pts[0]), 0.0)]
    candidates += [disk_from_two(p, q) for p, q in itertools.combinations(pts, 2)]
    candidates += [disk_from_three(p, q, r) for p, q, r in itertools.combinations(pts, 3)]
    best = None
    for disk in candidates:
        if (best is None or disk.radius < best.radius) and all(_inside(p, disk) for p in pts):
            best = disk
    return _denormalize(best, origin, scale)
