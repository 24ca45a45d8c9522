"""
Shared pieces of the command handlers: loading inputs and reporting failures
"""

import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from sim_logic.exceptions import (
    ConfigParseError,
    ConfigValidationError,
    NeuroevoError,
    ReplayFormatError,
    ReplayMismatchError,
    TrackParseError,
    TrackValidationError,
)
from sim_logic.track import Track, load_track
from storage.experiment_config import ExperimentConfig, load_experiment_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_SOLVED = 2


@dataclass(frozen=True)
class RunInputs:
    """Validated config plus the track it points at"""
    experiment: ExperimentConfig
    track: Track
    track_bytes: bytes


def read_track(path: Path) -> Tuple[Track, bytes]:
    data = Path(path).read_bytes()
    return load_track(data), data


def load_run_inputs(config_path: Optional[str], track_path: Optional[str], seed: Optional[int],
                    out_dir: Optional[str], overrides: Dict[str, Any]) -> RunInputs:
    """Config file, then dotted overrides, then the dedicated flags"""
    merged = dict(overrides)
    if track_path is not None:
        merged['track_path'] = track_path
    if seed is not None:
        merged['seed'] = seed
    if out_dir is not None:
        merged['out_dir'] = out_dir

    experiment = load_experiment_config(Path(config_path) if config_path else None, merged)
    if experiment.track_path is None:
        raise ConfigValidationError("missing field 'track_path' (or --track)")
    track, data = read_track(Path(experiment.track_path))
    return RunInputs(experiment=experiment, track=track, track_bytes=data)


def error_category(error: BaseException) -> str:
    if isinstance(error, (ConfigParseError, TrackParseError, ReplayFormatError)):
        return 'parse error'
    if isinstance(error, (ConfigValidationError, TrackValidationError)):
        return 'validation error'
    if isinstance(error, ReplayMismatchError):
        return 'replay mismatch'
    if isinstance(error, OSError):
        return 'I/O error'
    return 'error'


def describe_error(error: BaseException) -> str:
    if isinstance(error, OSError) and error.filename is not None:
        return f"{error.filename}: {error.strerror or error}"
    return str(error)


def report_failure(error: BaseException) -> int:
    """Log and print a one-line message, return the failure exit code"""
    message = f"{error_category(error)}: {describe_error(error)}"
    logger.error(message)
    print(message, file=sys.stderr)
    return EXIT_ERROR


HANDLED_ERRORS = (NeuroevoError, OSError)
