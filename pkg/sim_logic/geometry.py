"""
2D vector and ray/segment intersection kernel
Used by sensing, collision and course-progress queries
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

# Hits closer than this are reported as contact (t = 0)
CONTACT_EPSILON = 1e-9
# Parallel / collinear tolerance on cross products
PARALLEL_EPSILON = 1e-12


@dataclass(frozen=True)
class Vec2:
    """Planar vector in meters"""
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Vec2 components must be finite, got ({self.x}, {self.y})")

    def __add__(self, other: 'Vec2') -> 'Vec2':
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: 'Vec2') -> 'Vec2':
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> 'Vec2':
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other: 'Vec2') -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: 'Vec2') -> float:
        """z-component of the 3D cross product"""
        return self.x * other.y - self.y * other.x

    def length(self) -> float:
        return math.hypot(self.x, self.y)

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)

    @staticmethod
    def from_angle(angle: float) -> 'Vec2':
        return Vec2(math.cos(angle), math.sin(angle))


@dataclass(frozen=True)
class Segment:
    """Wall or centerline piece between two points"""
    a: Vec2
    b: Vec2

    def length(self) -> float:
        return (self.b - self.a).length()


def normalize_angle(a: float) -> float:
    """Wrap an angle into (-pi, pi]"""
    r = math.remainder(a, 2.0 * math.pi)
    if r <= -math.pi:
        r += 2.0 * math.pi
    return r


def ray_segment_intersect(origin: Vec2, direction: Vec2, seg: Segment) -> Optional[float]:
    """Distance along a unit ray to the segment, or None when the ray misses it"""
    assert abs(direction.length() - 1.0) <= 1e-9, "ray direction must be a unit vector"

    sx, sy = seg.b.x - seg.a.x, seg.b.y - seg.a.y
    qx, qy = seg.a.x - origin.x, seg.a.y - origin.y
    dx, dy = direction.x, direction.y

    denom = dx * sy - dy * sx
    if abs(denom) <= PARALLEL_EPSILON:
        # Parallel; only a collinear overlap can hit
        if abs(dx * qy - dy * qx) > PARALLEL_EPSILON:
            return None
        ta = qx * dx + qy * dy
        tb = (seg.b.x - origin.x) * dx + (seg.b.y - origin.y) * dy
        lo, hi = min(ta, tb), max(ta, tb)
        if hi < 0.0:
            return None
        if lo <= 0.0:
            return 0.0
        return lo if lo >= CONTACT_EPSILON else 0.0

    t = (qx * sy - qy * sx) / denom
    u = (qx * dy - qy * dx) / denom
    if u < 0.0 or u > 1.0 or t < -CONTACT_EPSILON:
        return None
    return t if t >= CONTACT_EPSILON else 0.0


def cast_rays(origin: Tuple[float, float], directions: np.ndarray, walls: np.ndarray) -> np.ndarray:
    """
    Vectorized ray_segment_intersect.

    Args:
        origin: ray origin (x, y)
        directions: (R, 2) unit vectors
        walls: (W, 2, 2) segment endpoints

    Returns:
        (R,) nearest hit distance per ray, np.inf where nothing is hit
    """
    n_rays = directions.shape[0]
    if walls.shape[0] == 0:
        return np.full(n_rays, np.inf)

    ox, oy = origin
    ax = walls[:, 0, 0][None, :]
    ay = walls[:, 0, 1][None, :]
    sx = (walls[:, 1, 0] - walls[:, 0, 0])[None, :]
    sy = (walls[:, 1, 1] - walls[:, 0, 1])[None, :]
    dx = directions[:, 0][:, None]
    dy = directions[:, 1][:, None]
    qx = ax - ox
    qy = ay - oy

    denom = dx * sy - dy * sx
    parallel = np.abs(denom) <= PARALLEL_EPSILON
    safe = np.where(parallel, 1.0, denom)
    t = (qx * sy - qy * sx) / safe
    u = (qx * dy - qy * dx) / safe
    hit = ~parallel & (u >= 0.0) & (u <= 1.0) & (t >= -CONTACT_EPSILON)
    dist = np.where(hit, np.where(t >= CONTACT_EPSILON, t, 0.0), np.inf)

    if parallel.any():
        collinear = parallel & (np.abs(dx * qy - dy * qx) <= PARALLEL_EPSILON)
        if collinear.any():
            ta = qx * dx + qy * dy
            tb = (ax + sx - ox) * dx + (ay + sy - oy) * dy
            lo = np.minimum(ta, tb)
            hi = np.maximum(ta, tb)
            near = np.where(lo <= 0.0, 0.0, np.where(lo >= CONTACT_EPSILON, lo, 0.0))
            dist = np.where(collinear & (hi >= 0.0), near, dist)

    return dist.min(axis=1)


def segments_hit_box(walls: np.ndarray, half_length: float, half_width: float) -> np.ndarray:
    """
    Which segments touch the closed axis-aligned box [-hl, hl] x [-hw, hw].

    Segment endpoints must already be expressed in the box frame.
    Liang-Barsky clipping, vectorized over segments.
    """
    p0 = walls[:, 0, :]
    d = walls[:, 1, :] - p0
    t0 = np.zeros(walls.shape[0])
    t1 = np.ones(walls.shape[0])
    inside = np.ones(walls.shape[0], dtype=bool)

    for axis, half in ((0, half_length), (1, half_width)):
        p = p0[:, axis]
        dv = d[:, axis]
        flat = dv == 0.0
        inside &= ~(flat & ((p < -half) | (p > half)))
        with np.errstate(divide='ignore', invalid='ignore'):
            ta = (-half - p) / dv
            tb = (half - p) / dv
        enter = np.where(flat, -np.inf, np.minimum(ta, tb))
        leave = np.where(flat, np.inf, np.maximum(ta, tb))
        t0 = np.maximum(t0, enter)
        t1 = np.minimum(t1, leave)

    return inside & (t0 <= t1)


def to_local_frame(points: np.ndarray, origin: Tuple[float, float], yaw: float) -> np.ndarray:
    """Express world points (..., 2) in a frame at origin rotated by yaw"""
    c, s = math.cos(yaw), math.sin(yaw)
    rel = points - np.asarray(origin)
    x = rel[..., 0] * c + rel[..., 1] * s
    y = -rel[..., 0] * s + rel[..., 1] * c
    return np.stack([x, y], axis=-1)


def point_segment_distance(p: Vec2, seg: Segment) -> float:
    """Euclidean distance from a point to a closed segment"""
    ab = seg.b - seg.a
    denom = ab.dot(ab)
    t = 0.0 if denom == 0.0 else max(0.0, min(1.0, (p - seg.a).dot(ab) / denom))
    closest = seg.a + ab * t
    return (p - closest).length()
