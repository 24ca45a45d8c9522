"""
Exceptions raised by the simulator core
"""


class NeuroevoError(Exception):
    """Base class for all simulator errors"""


class ConfigParseError(NeuroevoError):
    """Experiment config is not valid JSON"""


class ConfigValidationError(NeuroevoError):
    """Experiment config is well-formed but violates a constraint"""


class TrackParseError(NeuroevoError):
    """Track file is not valid UTF-8 JSON"""


class TrackValidationError(NeuroevoError):
    """Track file violates the schema or a track invariant"""


class ReplayFormatError(NeuroevoError):
    """Replay file is truncated or malformed"""


class ReplayMismatchError(NeuroevoError):
    """Replay does not belong to the given track/config, or re-simulation diverged"""


class ScoringError(NeuroevoError):
    """A score vector contains a negative value"""


class GenomeError(NeuroevoError):
    """Genome shape or parent set is unusable"""
