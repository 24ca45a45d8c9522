"""
Sensor system - builds the network input vector
Ray-cloud distances around the car plus normalized speed and slip angle
"""

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

import config
from sim_logic.geometry import cast_rays, normalize_angle
from sim_logic.track import Track
from sim_logic.vehicle import VehicleParams, VehicleState, slip_angle


def even_ray_angles(ray_count: int) -> List[float]:
    """Evenly spaced angles over the full circle, starting at the heading, sorted into (-pi, pi]"""
    return sorted(normalize_angle(2.0 * math.pi * k / ray_count) for k in range(ray_count))


class SensorConfig(BaseModel):
    """Ray layout; ray_angles are relative to heading"""
    model_config = ConfigDict(extra='forbid', frozen=True, allow_inf_nan=False)

    ray_count: int = config.DEFAULT_RAY_COUNT
    max_range: float = config.DEFAULT_MAX_RANGE
    ray_angles: Optional[List[float]] = None

    @model_validator(mode='before')
    @classmethod
    def _fill_angles(cls, data):
        if isinstance(data, dict) and data.get('ray_angles') is None:
            count = data.get('ray_count', config.DEFAULT_RAY_COUNT)
            if isinstance(count, int) and count >= 1:
                data = {**data, 'ray_angles': even_ray_angles(count)}
        return data

    @model_validator(mode='after')
    def _check_rays(self) -> 'SensorConfig':
        if self.ray_count < 1:
            raise ValueError("ray_count must be positive")
        if not self.max_range > 0.0:
            raise ValueError("max_range must be positive")
        angles = self.ray_angles or []
        if len(angles) != self.ray_count:
            raise ValueError(f"ray_angles has {len(angles)} entries, ray_count is {self.ray_count}")
        for a in angles:
            if not -math.pi < a <= math.pi:
                raise ValueError(f"ray angle {a} outside (-pi, pi]")
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise ValueError("ray_angles must be strictly increasing")
        return self

    @property
    def angles(self) -> np.ndarray:
        return np.array(self.ray_angles, dtype=float)


@dataclass(frozen=True, eq=False)
class SensorReading:
    """Normalized inputs: distances in [0, 1], then speed and slip"""
    distances: np.ndarray
    speed_norm: float
    slip_norm: float

    def as_input(self) -> np.ndarray:
        """Network input in order: distances, speed_norm, slip_norm"""
        return np.concatenate([self.distances, (self.speed_norm, self.slip_norm)])

    def __len__(self) -> int:
        return self.distances.shape[0] + 2


def sense(state: VehicleState, track: Track, params: VehicleParams, cfg: SensorConfig) -> SensorReading:
    """Cast the ray cloud from the car center and normalize everything to [0, 1]"""
    px, py = state.position.x, state.position.y
    reach = cfg.max_range
    walls = track.walls_near(px - reach, py - reach, px + reach, py + reach)

    angles = cfg.angles + state.yaw
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    hits = cast_rays((px, py), directions, walls)
    distances = np.clip(hits / cfg.max_range, 0.0, 1.0)
    distances.setflags(write=False)

    speed_norm = min(max(state.speed / params.max_speed, 0.0), 1.0)
    return SensorReading(distances=distances, speed_norm=speed_norm,
                         slip_norm=slip_angle(state) / math.pi)
