"""
Brain - fixed-topology feed-forward network whose flat weight vector is the genome
"""

import logging
import struct
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

import config
from sim_logic.exceptions import GenomeError
from sim_logic.sensors import SensorReading
from sim_logic.vehicle import Controls

logger = logging.getLogger(__name__)

_LENGTH = struct.Struct('<I')


@dataclass(frozen=True)
class Topology:
    """Layer widths: inputs (rays + 2), hidden layers, 3 outputs"""
    input_size: int
    hidden: Tuple[int, ...] = tuple(config.DEFAULT_HIDDEN_LAYERS)
    output_size: int = config.OUTPUT_SIZE

    def __post_init__(self):
        object.__setattr__(self, 'hidden', tuple(int(w) for w in self.hidden))
        if self.input_size < 3:
            raise ValueError(f"input_size must be >= 3, got {self.input_size}")
        if self.output_size != config.OUTPUT_SIZE:
            raise ValueError(f"output_size must be {config.OUTPUT_SIZE}")
        if any(w < 1 for w in self.hidden):
            raise ValueError("hidden layer widths must be >= 1")

    @classmethod
    def for_rays(cls, ray_count: int, hidden: Sequence[int] = config.DEFAULT_HIDDEN_LAYERS) -> 'Topology':
        return cls(input_size=ray_count + 2, hidden=tuple(hidden))

    @property
    def layer_shapes(self) -> List[Tuple[int, int]]:
        """(fan_in, fan_out) per dense layer"""
        sizes = [self.input_size, *self.hidden, self.output_size]
        return list(zip(sizes[:-1], sizes[1:]))

    @property
    def genome_length(self) -> int:
        return sum(fan_in * fan_out + fan_out for fan_in, fan_out in self.layer_shapes)


def describe_index(topology: Topology, index: int) -> Tuple[int, str, int, int]:
    """
    Map a flat weight index to (layer, kind, row, column).

    Each layer stores its (fan_out x fan_in) matrix row-major, then fan_out biases.
    Biases report column -1.
    """
    if not 0 <= index < topology.genome_length:
        raise IndexError(f"weight index {index} out of range")
    offset = 0
    for layer, (fan_in, fan_out) in enumerate(topology.layer_shapes):
        n_weights = fan_in * fan_out
        if index < offset + n_weights:
            row, col = divmod(index - offset, fan_in)
            return layer, 'weight', row, col
        offset += n_weights
        if index < offset + fan_out:
            return layer, 'bias', index - offset, -1
        offset += fan_out
    raise IndexError(f"weight index {index} out of range")  # unreachable


@dataclass(frozen=True, eq=False)
class Genome:
    """Flat weight vector plus the topology it encodes"""
    weights: np.ndarray
    topology: Topology
    layers: List[Tuple[np.ndarray, np.ndarray]] = field(init=False, repr=False)

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64)
        if weights.ndim != 1 or weights.shape[0] != self.topology.genome_length:
            raise GenomeError(
                f"genome has {weights.size} weights, topology needs {self.topology.genome_length}"
            )
        if not np.all(np.isfinite(weights)):
            raise GenomeError("genome weights must be finite")
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)

        layers = []
        offset = 0
        for fan_in, fan_out in self.topology.layer_shapes:
            w = weights[offset:offset + fan_in * fan_out].reshape(fan_out, fan_in)
            offset += fan_in * fan_out
            b = weights[offset:offset + fan_out]
            offset += fan_out
            layers.append((w, b))
        object.__setattr__(self, 'layers', layers)

    def __len__(self) -> int:
        return self.weights.shape[0]

    def with_weights(self, weights: np.ndarray) -> 'Genome':
        return Genome(weights=weights, topology=self.topology)

    def same_as(self, other: 'Genome') -> bool:
        """Bit-exact equality of topology and weights"""
        return (self.topology == other.topology
                and self.weights.tobytes() == other.weights.tobytes())


def random_genome(topology: Topology, rng: np.random.Generator) -> Genome:
    """Every weight uniform on [-1, 1], drawn in index order"""
    return Genome(weights=rng.uniform(-1.0, 1.0, size=topology.genome_length), topology=topology)


def zero_genome(topology: Topology) -> Genome:
    return Genome(weights=np.zeros(topology.genome_length), topology=topology)


def forward(genome: Genome, reading: Union[SensorReading, np.ndarray]) -> Tuple[float, float, float]:
    """Dense tanh layers; returns (throttle_raw, brake_raw, steer_raw), each in (-1, 1)"""
    x = reading.as_input() if isinstance(reading, SensorReading) else np.asarray(reading, dtype=float)
    assert x.shape == (genome.topology.input_size,), (
        f"input has {x.shape}, network expects {genome.topology.input_size}"
    )
    for w, b in genome.layers:
        x = np.tanh(w @ x + b)
    return float(x[0]), float(x[1]), float(x[2])


def to_controls(raw: Tuple[float, float, float]) -> Controls:
    """Positive parts drive the pedals; steer passes through"""
    throttle_raw, brake_raw, steer_raw = raw
    return Controls(throttle=max(throttle_raw, 0.0), brake=max(brake_raw, 0.0), steer=steer_raw)


def genome_to_bytes(genome: Genome) -> bytes:
    """u32 length followed by little-endian float64 weights"""
    return _LENGTH.pack(len(genome)) + genome.weights.astype('<f8').tobytes()


def genome_from_bytes(data: bytes, offset: int, topology: Topology) -> Tuple[Genome, int]:
    """Decode a genome at offset; returns the genome and the offset just past it"""
    if offset + _LENGTH.size > len(data):
        raise GenomeError("truncated genome length")
    (n,) = _LENGTH.unpack_from(data, offset)
    offset += _LENGTH.size
    end = offset + 8 * n
    if end > len(data):
        raise GenomeError(f"truncated genome: need {8 * n} bytes, have {len(data) - offset}")
    weights = np.frombuffer(data, dtype='<f8', count=n, offset=offset).astype(np.float64)
    return Genome(weights=weights, topology=topology), end
