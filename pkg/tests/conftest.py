"""
Shared fixtures: tracks, vehicle parameters and hand-built genomes
"""

import json
import math
from pathlib import Path

import numpy as np
import pytest

import config
from sim_logic.brain import Genome, Topology
from sim_logic.episode import EpisodeConfig
from sim_logic.sensors import SensorConfig
from sim_logic.track import Track, build_track_from_centerline, load_track
from sim_logic.vehicle import Layout, default_params


def corridor_payload(finish_s: float = 200.0, length: float = 210.0, half_width: float = 5.0) -> dict:
    """Track-file dict of a straight corridor along +x"""
    return {
        'name': 'corridor',
        'walls': [
            [[-5.0, half_width], [length, half_width]],
            [[-5.0, -half_width], [length, -half_width]],
            [[-5.0, -half_width], [-5.0, half_width]],
            [[length, -half_width], [length, half_width]],
        ],
        'centerline': [[0.0, 0.0], [length, 0.0]],
        'start': {'pos': [0.0, 0.0], 'yaw': 0.0},
        'finish_s': finish_s,
        'half_width': half_width,
    }


def write_track(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload), encoding='utf-8')
    return path


def rigid_point(point, angle: float, shift) -> list:
    """Rotate a point about the origin, then translate it"""
    c, s = math.cos(angle), math.sin(angle)
    x, y = point
    return [c * x - s * y + shift[0], s * x + c * y + shift[1]]


def transformed_track(track: Track, angle: float, shift) -> Track:
    """The same track moved by a rotation and a translation"""
    data = track.to_dict()
    data['walls'] = [[rigid_point(a, angle, shift), rigid_point(b, angle, shift)] for a, b in data['walls']]
    data['centerline'] = [rigid_point(p, angle, shift) for p in data['centerline']]
    data['start'] = {'pos': rigid_point(data['start']['pos'], angle, shift), 'yaw': data['start']['yaw'] + angle}
    return load_track(json.dumps(data).encode('utf-8'))


def constant_genome(topology: Topology, throttle: float = 0.0, brake: float = 0.0,
                    steer: float = 0.0) -> Genome:
    """All weights 0 except the output biases, so raw outputs are tanh of these values"""
    weights = np.zeros(topology.genome_length)
    weights[-3:] = (throttle, brake, steer)
    return Genome(weights=weights, topology=topology)


@pytest.fixture
def straight_track():
    return load_track((config.TRACKS_PATH / 'straight_corridor.json').read_bytes())


@pytest.fixture
def short_corridor():
    """Corridor whose finish is a few meters ahead of the start"""
    return load_track(json.dumps(corridor_payload(finish_s=6.0, length=30.0)).encode('utf-8'))


@pytest.fixture
def l_track():
    return build_track_from_centerline('l_track', [(0.0, 0.0), (60.0, 0.0), (60.0, 60.0)], 5.0)


@pytest.fixture
def ff_params():
    return default_params(Layout.FF)


@pytest.fixture
def fr_params():
    return default_params(Layout.FR)


@pytest.fixture
def sensors():
    return SensorConfig()


@pytest.fixture
def topology(sensors):
    return Topology.for_rays(sensors.ray_count)


@pytest.fixture
def episode():
    return EpisodeConfig()


@pytest.fixture
def quick_episode():
    return EpisodeConfig(max_time=8.0, stall_window=2.0)


@pytest.fixture
def corridor_file(tmp_path):
    return write_track(tmp_path / 'corridor.json', corridor_payload())


@pytest.fixture
def short_corridor_file(tmp_path):
    return write_track(tmp_path / 'short_corridor.json', corridor_payload(finish_s=6.0, length=30.0))
