"""
Configuration file for the neuroevolution driving simulator
"""

import math
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
env_path = Path('.') / '.env'
load_dotenv(dotenv_path=env_path)

# Logging Configuration
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('LOG_FILE', 'logs/neuroevo.log')
ENABLE_LOGGING = os.getenv('ENABLE_LOGGING', 'true').lower() == 'true'

# Output Configuration
DEFAULT_OUT_DIR = os.getenv('NEUROEVO_OUT_DIR', 'runs')


def get_thread_count() -> int:
    """Evaluator parallelism cap (NEUROEVO_THREADS, default: hardware count)"""
    raw = os.getenv('NEUROEVO_THREADS', '')
    try:
        threads = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        threads = os.cpu_count() or 1
    return max(1, threads)


# Physics Configuration
GRAVITY = 9.81
DEFAULT_DT = 1.0 / 60.0
MAX_DT = 0.05
PHYSICS_SUBSTEPS = 8
MIN_SLIP_VX = 0.5           # m/s floor inside the slip-angle atan2
SLIP_SPEED_EPSILON = 0.05   # below this speed the slip angle is 0
BRAKE_SPLIT_FRONT = 0.6

DEFAULT_FOOTPRINT = (4.5, 1.8)

# Shared by both layouts
SHARED_PHYSICS = {
    'friction_coeff': 1.0,
    'max_drive_force': 6000.0,
    'max_brake_force': 9000.0,
    'max_steer': 0.61,
    'drag_coeff': 1.8,
    'rolling_resist': 30.0,
    'max_speed': 50.0,
}

# Drivetrain layouts: FF biased toward understeer, FR toward oversteer
VEHICLE_LAYOUTS = {
    'FF': {
        'name': 'Front engine, front-wheel drive',
        'mass': 1200.0,
        'yaw_inertia': 1900.0,
        'lf': 1.0,
        'lr': 1.6,
        'cornering_stiffness_front': 70000.0,
        'cornering_stiffness_rear': 90000.0,
    },
    'FR': {
        'name': 'Front engine, rear-wheel drive',
        'mass': 1300.0,
        'yaw_inertia': 2200.0,
        'lf': 1.35,
        'lr': 1.25,
        'cornering_stiffness_front': 95000.0,
        'cornering_stiffness_rear': 70000.0,
    },
}

# Sensor Configuration
DEFAULT_RAY_COUNT = 12
DEFAULT_MAX_RANGE = 50.0

# Network Configuration
DEFAULT_HIDDEN_LAYERS = [12, 8]
OUTPUT_SIZE = 3

# Track Configuration
GRID_CELL_SIZE = 5.0

# Episode Configuration
DEFAULT_MAX_TIME = 60.0
DEFAULT_STALL_WINDOW = 5.0
DEFAULT_STALL_MIN_PROGRESS = 2.0
DEFAULT_ANGLE_THRESHOLD = 10.0 * math.pi / 180.0

# Genetic Algorithm Configuration
DEFAULT_GA = {
    'population': 50,
    'top_fraction': 0.1,
    'crossover_rate': 0.8,
    'mutation_rate': 0.2,
    'mutation_range': 1.0,
    'elitism': True,
}
SUCCESS_STREAK = 3  # consecutive generations with a Completed episode

# Sweep grid defaults (layout x crossover x mutation x seed)
SWEEP_GRID = {
    'layouts': ['FR', 'FF'],
    'crossover_rates': [0.8, 0.9],
    'mutation_rates': [0.2, 0.1],
    'seeds': [1],
}

# Replay file
REPLAY_MAGIC = b'NEVO'
REPLAY_FORMAT_VERSION = 1

# File Paths
DATA_PATH = Path(__file__).parent / 'data'
TRACKS_PATH = DATA_PATH / 'tracks'
EXPERIMENTS_PATH = DATA_PATH / 'experiments'
