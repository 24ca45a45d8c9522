"""
Track system for the neuroevolution simulator
Walls, centerline, collision queries and course progress
"""

import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

import config
from sim_logic.exceptions import TrackParseError, TrackValidationError
from sim_logic.geometry import Segment, Vec2, segments_hit_box, to_local_frame

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


class StartPoseModel(BaseModel):
    """Start block of the track file"""
    model_config = ConfigDict(extra='forbid', allow_inf_nan=False)

    pos: Tuple[float, float]
    yaw: float


class TrackFileModel(BaseModel):
    """Schema of the UTF-8 JSON track file"""
    model_config = ConfigDict(extra='forbid', allow_inf_nan=False)

    name: str
    walls: List[Tuple[Tuple[float, float], Tuple[float, float]]]
    centerline: List[Tuple[float, float]]
    start: StartPoseModel
    finish_s: float
    half_width: float


@dataclass(frozen=True)
class CoursePose:
    """Progress of a point along the centerline"""
    s: float
    tangent: Vec2
    lateral_offset: float


class WallGrid:
    """Uniform grid of wall indices; queries return a superset of the walls in a box"""

    def __init__(self, walls: np.ndarray, cell_size: float = config.GRID_CELL_SIZE):
        self.cell_size = cell_size
        self.origin = walls.min(axis=(0, 1))
        extent = walls.max(axis=(0, 1)) - self.origin
        self.nx = int(math.floor(extent[0] / cell_size)) + 1
        self.ny = int(math.floor(extent[1] / cell_size)) + 1
        self._all = np.arange(walls.shape[0], dtype=np.intp)

        buckets: Dict[Tuple[int, int], List[int]] = defaultdict(list)
        for i, seg in enumerate(walls):
            ix0, iy0 = self._cell(seg.min(axis=0))
            ix1, iy1 = self._cell(seg.max(axis=0))
            for ix in range(ix0, ix1 + 1):
                for iy in range(iy0, iy1 + 1):
                    buckets[(ix, iy)].append(i)
        self._cells = {key: np.array(ids, dtype=np.intp) for key, ids in buckets.items()}

    def _cell(self, point) -> Tuple[int, int]:
        return (int(math.floor((point[0] - self.origin[0]) / self.cell_size)),
                int(math.floor((point[1] - self.origin[1]) / self.cell_size)))

    def query(self, xmin: float, ymin: float, xmax: float, ymax: float) -> np.ndarray:
        """Indices of walls whose cells overlap the box"""
        ix0, iy0 = self._cell((xmin, ymin))
        ix1, iy1 = self._cell((xmax, ymax))
        ix0, iy0 = max(ix0, 0), max(iy0, 0)
        ix1, iy1 = min(ix1, self.nx - 1), min(iy1, self.ny - 1)
        if ix0 > ix1 or iy0 > iy1:
            return self._all[:0]
        if ix0 == 0 and iy0 == 0 and ix1 == self.nx - 1 and iy1 == self.ny - 1:
            return self._all

        n_range = (ix1 - ix0 + 1) * (iy1 - iy0 + 1)
        if n_range > len(self._cells):
            parts = [ids for (ix, iy), ids in self._cells.items()
                     if ix0 <= ix <= ix1 and iy0 <= iy <= iy1]
        else:
            parts = [self._cells[key] for key in
                     ((ix, iy) for ix in range(ix0, ix1 + 1) for iy in range(iy0, iy1 + 1))
                     if key in self._cells]
        if not parts:
            return self._all[:0]
        return np.unique(np.concatenate(parts))


@dataclass(frozen=True)
class Track:
    """Immutable environment: guard rails, obstacles, centerline and start pose"""
    name: str
    walls: Tuple[Segment, ...]
    centerline: Tuple[Vec2, ...]
    start_position: Vec2
    start_yaw: float
    finish_s: float
    half_width: float
    cell_size: float = config.GRID_CELL_SIZE

    wall_array: np.ndarray = field(init=False, repr=False, compare=False)
    centerline_array: np.ndarray = field(init=False, repr=False, compare=False)
    cumulative_s: np.ndarray = field(init=False, repr=False, compare=False)
    grid: WallGrid = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.walls:
            raise TrackValidationError("walls must not be empty")
        for i, wall in enumerate(self.walls):
            if wall.length() <= 0.0:
                raise TrackValidationError(f"wall {i} has zero length")
        if len(self.centerline) < 2:
            raise TrackValidationError("centerline needs at least 2 points")
        for i in range(1, len(self.centerline)):
            if self.centerline[i] == self.centerline[i - 1]:
                raise TrackValidationError(f"centerline point {i} duplicates point {i - 1}")
        if not self.half_width > 0.0:
            raise TrackValidationError("half_width must be positive")

        cl = np.array([p.as_tuple() for p in self.centerline], dtype=float)
        seg_len = np.hypot(*(cl[1:] - cl[:-1]).T)
        cum = np.concatenate([[0.0], np.cumsum(seg_len)])
        if not self.finish_s > 0.0:
            raise TrackValidationError("finish_s must be positive")
        if self.finish_s > cum[-1]:
            raise TrackValidationError(
                f"finish_s exceeds centerline length ({self.finish_s} > {cum[-1]})"
            )

        walls = np.array([[w.a.as_tuple(), w.b.as_tuple()] for w in self.walls], dtype=float)
        for arr in (walls, cl, cum):
            arr.setflags(write=False)
        object.__setattr__(self, 'wall_array', walls)
        object.__setattr__(self, 'centerline_array', cl)
        object.__setattr__(self, 'cumulative_s', cum)
        object.__setattr__(self, 'grid', WallGrid(walls, self.cell_size))

    @property
    def start_pose(self) -> Tuple[Vec2, float]:
        return self.start_position, self.start_yaw

    @property
    def length(self) -> float:
        """Total centerline arc length"""
        return float(self.cumulative_s[-1])

    def walls_near(self, xmin: float, ymin: float, xmax: float, ymax: float) -> np.ndarray:
        """Wall endpoints (k, 2, 2) that may intersect the box"""
        return self.wall_array[self.grid.query(xmin, ymin, xmax, ymax)]

    def to_dict(self) -> Dict:
        """Convert to the track file structure"""
        return {
            'name': self.name,
            'walls': [[list(w.a.as_tuple()), list(w.b.as_tuple())] for w in self.walls],
            'centerline': [list(p.as_tuple()) for p in self.centerline],
            'start': {'pos': list(self.start_position.as_tuple()), 'yaw': self.start_yaw},
            'finish_s': self.finish_s,
            'half_width': self.half_width,
        }


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        loc = '.'.join(str(p) for p in item['loc']) or '<root>'
        if item['type'] == 'missing':
            parts.append(f"missing field '{loc}'")
        elif item['type'] == 'extra_forbidden':
            parts.append(f"unknown field '{loc}'")
        else:
            parts.append(f"field '{loc}': {item['msg']}")
    return '; '.join(parts)


def load_track(text: bytes, cell_size: float = config.GRID_CELL_SIZE) -> Track:
    """Parse and validate a track file"""
    try:
        raw = json.loads(text.decode('utf-8'))
    except UnicodeDecodeError as e:
        raise TrackParseError(f"track file is not UTF-8: {e}") from e
    except json.JSONDecodeError as e:
        raise TrackParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e

    try:
        model = TrackFileModel.model_validate(raw)
    except ValidationError as e:
        raise TrackValidationError(_format_validation_error(e)) from e

    track = Track(
        name=model.name,
        walls=tuple(Segment(Vec2(*a), Vec2(*b)) for a, b in model.walls),
        centerline=tuple(Vec2(*p) for p in model.centerline),
        start_position=Vec2(*model.start.pos),
        start_yaw=model.start.yaw,
        finish_s=model.finish_s,
        half_width=model.half_width,
        cell_size=cell_size,
    )
    logger.debug(f"Loaded track '{track.name}': {len(track.walls)} walls, {track.length:.1f} m centerline")
    return track


def collides(track: Track, position: Vec2, yaw: float, footprint: Tuple[float, float]) -> bool:
    """True iff the oriented footprint rectangle touches any wall"""
    length, width = footprint
    assert length > 0.0 and width > 0.0, "footprint dimensions must be positive"
    half_l, half_w = 0.5 * length, 0.5 * width
    reach = math.hypot(half_l, half_w) + 1e-6
    candidates = track.walls_near(position.x - reach, position.y - reach,
                                  position.x + reach, position.y + reach)
    if candidates.shape[0] == 0:
        return False
    local = to_local_frame(candidates, (position.x, position.y), yaw)
    return bool(segments_hit_box(local, half_l, half_w).any())


def course_pose(track: Track, position: Vec2) -> CoursePose:
    """Nearest centerline point: arc length, tangent and signed lateral offset"""
    cl = track.centerline_array
    a = cl[:-1]
    d = cl[1:] - a
    p = np.array([position.x, position.y])

    len2 = np.einsum('ij,ij->i', d, d)
    t = np.clip(np.einsum('ij,ij->i', p - a, d) / len2, 0.0, 1.0)
    q = a + d * t[:, None]
    dist2 = np.einsum('ij,ij->i', p - q, p - q)

    s_all = track.cumulative_s[:-1] + t * np.sqrt(len2)
    ties = np.flatnonzero(dist2 <= dist2.min() + 1e-12)
    i = int(ties[np.argmin(s_all[ties])])

    seg_len = math.sqrt(len2[i])
    tangent = Vec2(d[i, 0] / seg_len, d[i, 1] / seg_len)
    rel = Vec2(p[0] - q[i, 0], p[1] - q[i, 1])
    lateral = math.copysign(rel.length(), tangent.cross(rel))
    s = min(max(float(s_all[i]), 0.0), track.length)
    return CoursePose(s=s, tangent=tangent, lateral_offset=lateral)


def _offset_normals(points: np.ndarray, closed: bool) -> np.ndarray:
    """Unit left normals per point, averaged over adjacent segments"""
    if closed:
        seg = np.roll(points, -1, axis=0) - points
    else:
        seg = points[1:] - points[:-1]
    seg = seg / np.hypot(*seg.T)[:, None]
    normals = np.stack([-seg[:, 1], seg[:, 0]], axis=1)
    if closed:
        avg = normals + np.roll(normals, 1, axis=0)
    else:
        avg = np.vstack([normals[:1], normals[:-1] + normals[1:], normals[-1:]])
    return avg / np.hypot(*avg.T)[:, None]


def _polyline_walls(points: np.ndarray, closed: bool) -> List[Segment]:
    pts = np.vstack([points, points[:1]]) if closed else points
    return [Segment(Vec2(*map(float, pts[i])), Vec2(*map(float, pts[i + 1])))
            for i in range(len(pts) - 1)]


def build_track_from_centerline(name: str, centerline: Sequence[Point], half_width: float,
                                finish_s: Optional[float] = None, closed: bool = False,
                                run_off: float = 5.0, start_gap: float = 12.0,
                                cell_size: float = config.GRID_CELL_SIZE) -> Track:
    """
    Build guard rails at +/- half_width around a centerline.

    Open tracks get rails extended run_off meters behind the start and an end cap.
    Closed tracks get closed rails, the scoring centerline stops start_gap meters
    short of the loop, and a barrier sits across the gap behind the start.
    """
    pts = np.asarray(centerline, dtype=float)
    normals = _offset_normals(pts, closed)
    left = pts + normals * half_width
    right = pts - normals * half_width

    if closed:
        walls = _polyline_walls(left, True) + _polyline_walls(right, True)
        loop = np.vstack([pts, pts[:1]])
        seg_len = np.hypot(*(loop[1:] - loop[:-1]).T)
        cum = np.concatenate([[0.0], np.cumsum(seg_len)])
        total = cum[-1]
        # centerline covers [0, total - start_gap]
        cut = total - start_gap
        k = int(np.searchsorted(cum, cut, side='right')) - 1
        frac = (cut - cum[k]) / seg_len[k]
        end_point = loop[k] + (loop[k + 1] - loop[k]) * frac
        score_line = np.vstack([loop[:k + 1], end_point[None, :]])
        # barrier a third of the gap behind the start
        back = total - start_gap / 3.0
        j = int(np.searchsorted(cum, back, side='right')) - 1
        frac = (back - cum[j]) / seg_len[j]
        bp = loop[j] + (loop[j + 1] - loop[j]) * frac
        tdir = (loop[j + 1] - loop[j]) / seg_len[j]
        bn = np.array([-tdir[1], tdir[0]])
        walls.append(Segment(Vec2(*map(float, bp + bn * half_width * 1.2)),
                             Vec2(*map(float, bp - bn * half_width * 1.2))))
    else:
        t0 = (pts[1] - pts[0]) / np.hypot(*(pts[1] - pts[0]))
        lead_l = left[0] - t0 * run_off
        lead_r = right[0] - t0 * run_off
        left = np.vstack([lead_l[None, :], left])
        right = np.vstack([lead_r[None, :], right])
        walls = _polyline_walls(left, False) + _polyline_walls(right, False)
        walls.append(Segment(Vec2(*map(float, lead_l)), Vec2(*map(float, lead_r))))
        walls.append(Segment(Vec2(*map(float, left[-1])), Vec2(*map(float, right[-1]))))
        score_line = pts

    cl = tuple(Vec2(float(x), float(y)) for x, y in score_line)
    lengths = np.hypot(*(score_line[1:] - score_line[:-1]).T)
    total_cl = float(lengths.sum())
    if finish_s is None:
        finish_s = total_cl - 1.0 if closed else total_cl - 5.0
    start_dir = score_line[1] - score_line[0]
    return Track(
        name=name,
        walls=tuple(walls),
        centerline=cl,
        start_position=cl[0],
        start_yaw=math.atan2(start_dir[1], start_dir[0]),
        finish_s=float(finish_s),
        half_width=half_width,
        cell_size=cell_size,
    )
