"""
Vehicle dynamics for the neuroevolution simulator
Planar dynamic bicycle model with linear tires, per-axle saturation and FF/FR drivetrains
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

import config
from sim_logic.geometry import Vec2

logger = logging.getLogger(__name__)


class Layout(str, Enum):
    """Drivetrain layouts"""
    FF = "FF"  # front engine, front-wheel drive
    FR = "FR"  # front engine, rear-wheel drive


class VehicleParams(BaseModel):
    """Physical parameters of one car"""
    model_config = ConfigDict(extra='forbid', frozen=True, allow_inf_nan=False)

    layout: Layout
    mass: float
    yaw_inertia: float
    lf: float
    lr: float
    cornering_stiffness_front: float
    cornering_stiffness_rear: float
    friction_coeff: float
    max_drive_force: float
    max_brake_force: float
    max_steer: float
    drag_coeff: float
    rolling_resist: float
    max_speed: float
    footprint: Tuple[float, float] = config.DEFAULT_FOOTPRINT

    @model_validator(mode='after')
    def _check_magnitudes(self) -> 'VehicleParams':
        positive = ('mass', 'yaw_inertia', 'lf', 'lr', 'cornering_stiffness_front',
                    'cornering_stiffness_rear', 'friction_coeff', 'max_drive_force',
                    'max_brake_force', 'drag_coeff', 'rolling_resist', 'max_speed')
        for name in positive:
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.max_steer < math.pi / 2:
            raise ValueError("max_steer must lie in (0, pi/2)")
        if not (self.footprint[0] > 0.0 and self.footprint[1] > 0.0):
            raise ValueError("footprint dimensions must be positive")
        return self

    @property
    def wheelbase(self) -> float:
        return self.lf + self.lr

    @property
    def front_axle_load(self) -> float:
        """Static normal load on the front axle (N)"""
        return self.mass * config.GRAVITY * self.lr / self.wheelbase

    @property
    def rear_axle_load(self) -> float:
        """Static normal load on the rear axle (N)"""
        return self.mass * config.GRAVITY * self.lf / self.wheelbase


def understeer_gradient(params: VehicleParams) -> float:
    """K = (m/L)(lr/Cf - lf/Cr); positive understeers, negative oversteers"""
    return (params.mass / params.wheelbase) * (
        params.lr / params.cornering_stiffness_front - params.lf / params.cornering_stiffness_rear
    )


def default_params(layout) -> VehicleParams:
    """Default parameters for a layout (FF understeers, FR oversteers)"""
    layout = Layout(layout)
    values = {k: v for k, v in config.VEHICLE_LAYOUTS[layout.value].items() if k != 'name'}
    return VehicleParams(layout=layout, footprint=config.DEFAULT_FOOTPRINT,
                         **config.SHARED_PHYSICS, **values)


@dataclass(frozen=True)
class VehicleState:
    """Rigid-body state: world pose plus body-frame velocities"""
    position: Vec2
    yaw: float
    vx: float = 0.0
    vy: float = 0.0
    yaw_rate: float = 0.0

    @property
    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)

    def world_velocity(self) -> Vec2:
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        return Vec2(self.vx * c - self.vy * s, self.vx * s + self.vy * c)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in (self.position.x, self.position.y, self.yaw,
                                              self.vx, self.vy, self.yaw_rate))


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


@dataclass(frozen=True)
class Controls:
    """Pedals and steering, clamped on construction"""
    throttle: float = 0.0
    brake: float = 0.0
    steer: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'throttle', _clamp(float(self.throttle), 0.0, 1.0))
        object.__setattr__(self, 'brake', _clamp(float(self.brake), 0.0, 1.0))
        object.__setattr__(self, 'steer', _clamp(float(self.steer), -1.0, 1.0))


class AxleForces(NamedTuple):
    """Tire forces in each wheel's frame (N)"""
    front_long: float
    front_lat: float
    rear_long: float
    rear_lat: float


def slip_angle(state: VehicleState) -> float:
    """Unsigned angle between velocity and heading, in [0, pi]"""
    if state.speed < config.SLIP_SPEED_EPSILON:
        return 0.0
    return abs(math.atan2(state.vy, state.vx))


def _axle_forces(vx: float, vy: float, r: float, delta: float, controls: Controls,
                 p: VehicleParams, h: float) -> AxleForces:
    lf, lr, mass = p.lf, p.lr, p.mass
    vx_eff = max(vx, config.MIN_SLIP_VX)
    alpha_f = math.atan2(vy + lf * r, vx_eff) - delta
    alpha_r = math.atan2(vy - lr * r, vx_eff)

    cap_f = p.friction_coeff * p.front_axle_load
    cap_r = p.friction_coeff * p.rear_axle_load
    fyf = _clamp(-p.cornering_stiffness_front * alpha_f, -cap_f, cap_f)
    fyr = _clamp(-p.cornering_stiffness_rear * alpha_r, -cap_r, cap_r)

    # contact-patch sliding clamp: never more than stops the axle sliding this sub-step
    cd, sd = math.cos(delta), math.sin(delta)
    stop_f = mass * lr / p.wheelbase * abs(-vx * sd + (vy + lf * r) * cd) / h
    stop_r = mass * lf / p.wheelbase * abs(vy - lr * r) / h
    fyf = _clamp(fyf, -stop_f, stop_f)
    fyr = _clamp(fyr, -stop_r, stop_r)

    drive = controls.throttle * p.max_drive_force
    brake = min(controls.brake * p.max_brake_force, mass * abs(vx) / h)
    brake_dir = -1.0 if vx > 0.0 else (1.0 if vx < 0.0 else 0.0)
    front_split = config.BRAKE_SPLIT_FRONT
    fxf = brake_dir * brake * front_split
    fxr = brake_dir * brake * (1.0 - front_split)
    if p.layout == Layout.FF:
        fxf += drive
    else:
        fxr += drive

    # friction circle: longitudinal gets what lateral leaves
    room_f = math.sqrt(max(cap_f * cap_f - fyf * fyf, 0.0))
    room_r = math.sqrt(max(cap_r * cap_r - fyr * fyr, 0.0))
    return AxleForces(_clamp(fxf, -room_f, room_f), fyf, _clamp(fxr, -room_r, room_r), fyr)


def axle_forces(state: VehicleState, controls: Controls, params: VehicleParams,
                dt: float = config.DEFAULT_DT) -> AxleForces:
    """Tire forces the integrator would apply in the first sub-step from this state"""
    h = dt / config.PHYSICS_SUBSTEPS
    return _axle_forces(state.vx, state.vy, state.yaw_rate,
                        controls.steer * params.max_steer, controls, params, h)


def step(state: VehicleState, controls: Controls, params: VehicleParams, dt: float) -> VehicleState:
    """Advance the car by dt with semi-implicit Euler sub-steps"""
    assert 0.0 < dt <= config.MAX_DT, f"dt must lie in (0, {config.MAX_DT}]"
    assert state.is_finite(), "vehicle state must be finite"

    p = params
    h = dt / config.PHYSICS_SUBSTEPS
    delta = controls.steer * p.max_steer
    cd, sd = math.cos(delta), math.sin(delta)
    inv_m, inv_iz = 1.0 / p.mass, 1.0 / p.yaw_inertia
    lf, lr = p.lf, p.lr

    x, y, yaw = state.position.x, state.position.y, state.yaw
    vx, vy, r = state.vx, state.vy, state.yaw_rate

    for _ in range(config.PHYSICS_SUBSTEPS):
        fxf, fyf, fxr, fyr = _axle_forces(vx, vy, r, delta, controls, p, h)
        resist = p.drag_coeff * math.hypot(vx, vy) + p.rolling_resist

        front_x = fxf * cd - fyf * sd
        front_y = fxf * sd + fyf * cd
        fx = front_x + fxr - resist * vx
        fy = front_y + fyr - resist * vy
        mz = lf * front_y - lr * fyr

        ax = fx * inv_m + r * vy
        ay = fy * inv_m - r * vx
        vx += ax * h
        vy += ay * h
        r += mz * inv_iz * h

        heading = yaw + 0.5 * r * h
        yaw += r * h
        c, s = math.cos(heading), math.sin(heading)
        x += (vx * c - vy * s) * h
        y += (vx * s + vy * c) * h

    return VehicleState(position=Vec2(x, y), yaw=yaw, vx=vx, vy=vy, yaw_rate=r)
