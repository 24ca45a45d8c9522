"""
Episode runner - one car, one track, scored per frame until it is despawned or finishes
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, List, Optional

from pydantic import BaseModel, ConfigDict, model_validator

import config
from sim_logic.brain import Genome, forward, to_controls
from sim_logic.exceptions import ConfigValidationError, ReplayMismatchError
from sim_logic.sensors import SensorConfig, sense
from sim_logic.track import CoursePose, Track, collides, course_pose
from sim_logic.vehicle import Controls, VehicleParams, VehicleState, slip_angle, step

logger = logging.getLogger(__name__)


class EpisodeConfig(BaseModel):
    """Frame time, time limits and despawn thresholds"""
    model_config = ConfigDict(extra='forbid', frozen=True, allow_inf_nan=False)

    dt: float = config.DEFAULT_DT
    max_time: float = config.DEFAULT_MAX_TIME
    stall_window: float = config.DEFAULT_STALL_WINDOW
    stall_min_progress: float = config.DEFAULT_STALL_MIN_PROGRESS
    angle_threshold: float = config.DEFAULT_ANGLE_THRESHOLD
    min_scoring_speed: float = 0.0

    @model_validator(mode='after')
    def _check_times(self) -> 'EpisodeConfig':
        if not 0.0 < self.dt <= config.MAX_DT:
            raise ValueError(f"dt must lie in (0, {config.MAX_DT}]")
        if not self.max_time > self.stall_window > 0.0:
            raise ValueError("need max_time > stall_window > 0")
        if not 0.0 < self.angle_threshold < math.pi:
            raise ValueError("angle_threshold must lie in (0, pi)")
        if self.stall_min_progress < 0.0 or self.min_scoring_speed < 0.0:
            raise ValueError("stall_min_progress and min_scoring_speed must not be negative")
        return self

    @property
    def max_frames(self) -> int:
        return int(round(self.max_time / self.dt))

    @property
    def stall_frames(self) -> int:
        return int(round(self.stall_window / self.dt))


class Outcome(str, Enum):
    """How an episode ended"""
    COMPLETED = "Completed"
    CRASHED = "Crashed"
    STALLED = "Stalled"
    TIMED_OUT = "TimedOut"


@dataclass(frozen=True)
class EpisodeResult:
    """Score (sum of frame scores), outcome and length of one episode"""
    score: float
    outcome: Outcome
    frames: int
    final_s: float


@dataclass
class EpisodeTrace:
    """Optional per-frame record of an episode"""
    controls: List[Controls] = field(default_factory=list)
    frame_scores: List[float] = field(default_factory=list)
    states: List[VehicleState] = field(default_factory=list)


def frame_score(state: VehicleState, course: CoursePose, dt: float, angle_threshold: float,
                min_scoring_speed: float = 0.0) -> float:
    """Distance made along the course this frame; 0 when sliding past the threshold or reversing"""
    velocity = state.world_velocity()
    along = velocity.dot(course.tangent)
    if along <= 0.0 or slip_angle(state) >= angle_threshold:
        return 0.0
    if min_scoring_speed > 0.0 and state.speed < min_scoring_speed:
        return 0.0
    return along * dt


def _drive(track: Track, params: VehicleParams, ep: EpisodeConfig,
           controller: Callable[[VehicleState], Controls],
           trace: Optional[EpisodeTrace] = None) -> EpisodeResult:
    """Shared frame loop: control, step, score, despawn checks"""
    position, yaw = track.start_pose
    state = VehicleState(position=position, yaw=yaw)
    if trace is not None:
        trace.states.append(state)
    if collides(track, state.position, state.yaw, params.footprint):
        return EpisodeResult(0.0, Outcome.CRASHED, 0, course_pose(track, state.position).s)

    stall_frames, max_frames = ep.stall_frames, ep.max_frames
    history = deque([0.0], maxlen=stall_frames + 1)
    score = 0.0
    frames = 0

    while True:
        controls = controller(state)
        state = step(state, controls, params, ep.dt)
        frames += 1
        course = course_pose(track, state.position)
        gained = frame_score(state, course, ep.dt, ep.angle_threshold, ep.min_scoring_speed)
        score += gained
        if trace is not None:
            trace.controls.append(controls)
            trace.frame_scores.append(gained)
            trace.states.append(state)

        outcome = None
        if collides(track, state.position, state.yaw, params.footprint):
            outcome = Outcome.CRASHED
        elif course.s >= track.finish_s:
            outcome = Outcome.COMPLETED
        else:
            history.append(score)
            if frames >= stall_frames and score - history[0] < ep.stall_min_progress:
                outcome = Outcome.STALLED
            elif frames >= max_frames:
                outcome = Outcome.TIMED_OUT
        if outcome is not None:
            return EpisodeResult(score=score, outcome=outcome, frames=frames, final_s=course.s)


def check_sizes(genome: Genome, sensors: SensorConfig) -> None:
    if genome.topology.input_size != sensors.ray_count + 2:
        raise ConfigValidationError(
            f"network expects {genome.topology.input_size} inputs, sensors provide {sensors.ray_count + 2}"
        )


def run_episode(genome: Genome, track: Track, params: VehicleParams, sensors: SensorConfig,
                ep: EpisodeConfig, trace: Optional[EpisodeTrace] = None) -> EpisodeResult:
    """Spawn at the start pose at rest and drive with the genome until despawn or finish"""
    check_sizes(genome, sensors)

    def controller(state: VehicleState) -> Controls:
        return to_controls(forward(genome, sense(state, track, params, sensors)))

    return _drive(track, params, ep, controller, trace)


def replay_controls(controls: Iterable[Controls], track: Track, params: VehicleParams,
                    ep: EpisodeConfig, trace: Optional[EpisodeTrace] = None) -> EpisodeResult:
    """Drive a recorded control sequence open-loop"""
    feed = iter(controls)

    def controller(_state: VehicleState) -> Controls:
        try:
            return next(feed)
        except StopIteration:
            raise ReplayMismatchError("recorded controls ran out before the episode ended") from None

    return _drive(track, params, ep, controller, trace)
