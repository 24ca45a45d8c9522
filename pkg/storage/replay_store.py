"""
Replay files - enough to re-simulate the final best episode bit-exactly

Layout (little-endian):
    magic 'NEVO', u16 format version, u64 seed, 32-byte config hash
    u32 length + canonical config JSON (UTF-8)
    u32 generation count, then per generation the best genome (u32 length + f64 weights)
    final best episode: u8 outcome, u32 frames, f64 score,
                        u32 control count + (throttle, brake, steer) f64 per frame
"""

import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

import config
from sim_logic.brain import Genome, genome_from_bytes, genome_to_bytes
from sim_logic.episode import Outcome
from sim_logic.exceptions import GenomeError, ReplayFormatError
from sim_logic.vehicle import Controls
from storage.experiment_config import ExperimentConfig, config_from_canonical

logger = logging.getLogger(__name__)

HEADER = struct.Struct('<4sHQ32s')
U32 = struct.Struct('<I')
EPISODE = struct.Struct('<BId')
CONTROL = struct.Struct('<3d')

OUTCOME_CODES = {
    Outcome.COMPLETED: 0,
    Outcome.CRASHED: 1,
    Outcome.STALLED: 2,
    Outcome.TIMED_OUT: 3,
}
CODE_OUTCOMES = {code: outcome for outcome, code in OUTCOME_CODES.items()}


@dataclass
class ReplayFile:
    """Decoded replay"""
    seed: int
    config_hash: bytes
    config_json: str
    best_genomes: List[Genome]
    outcome: Outcome
    frames: int
    score: float
    controls: List[Controls] = field(default_factory=list)
    version: int = config.REPLAY_FORMAT_VERSION

    @property
    def experiment(self) -> ExperimentConfig:
        return config_from_canonical(self.config_json)

    @property
    def final_genome(self) -> Genome:
        if not self.best_genomes:
            raise ReplayFormatError("replay holds no genomes")
        return self.best_genomes[-1]


def encode_replay(replay: ReplayFile) -> bytes:
    if len(replay.config_hash) != 32:
        raise ValueError("config hash must be 32 bytes")
    config_bytes = replay.config_json.encode('utf-8')
    parts = [
        HEADER.pack(config.REPLAY_MAGIC, replay.version, replay.seed, replay.config_hash),
        U32.pack(len(config_bytes)), config_bytes,
        U32.pack(len(replay.best_genomes)),
    ]
    parts.extend(genome_to_bytes(g) for g in replay.best_genomes)
    parts.append(EPISODE.pack(OUTCOME_CODES[replay.outcome], replay.frames, replay.score))
    parts.append(U32.pack(len(replay.controls)))
    parts.extend(CONTROL.pack(c.throttle, c.brake, c.steer) for c in replay.controls)
    return b''.join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, fmt: struct.Struct, what: str):
        if self.offset + fmt.size > len(self.data):
            raise ReplayFormatError(f"truncated replay: {what} missing at byte {self.offset}")
        values = fmt.unpack_from(self.data, self.offset)
        self.offset += fmt.size
        return values

    def take_bytes(self, n: int, what: str) -> bytes:
        if self.offset + n > len(self.data):
            raise ReplayFormatError(f"truncated replay: {what} missing at byte {self.offset}")
        chunk = self.data[self.offset:self.offset + n]
        self.offset += n
        return chunk


def decode_replay(data: bytes) -> ReplayFile:
    reader = _Reader(data)
    magic, version, seed, digest = reader.take(HEADER, 'header')
    if magic != config.REPLAY_MAGIC:
        raise ReplayFormatError("not a replay file (bad magic)")
    if version != config.REPLAY_FORMAT_VERSION:
        raise ReplayFormatError(f"unsupported replay format version {version}")

    (config_len,) = reader.take(U32, 'config length')
    try:
        config_json = reader.take_bytes(config_len, 'config').decode('utf-8')
    except UnicodeDecodeError as e:
        raise ReplayFormatError("embedded config is not valid UTF-8") from e
    topology = config_from_canonical(config_json).topology

    (count,) = reader.take(U32, 'generation count')
    genomes = []
    for g in range(count):
        try:
            genome, reader.offset = genome_from_bytes(data, reader.offset, topology)
        except GenomeError as e:
            raise ReplayFormatError(f"genome of generation {g}: {e}") from e
        genomes.append(genome)

    code, frames, score = reader.take(EPISODE, 'final episode')
    if code not in CODE_OUTCOMES:
        raise ReplayFormatError(f"unknown outcome code {code}")
    (n_controls,) = reader.take(U32, 'control count')
    controls = [Controls(*reader.take(CONTROL, f'controls of frame {i}')) for i in range(n_controls)]
    if reader.offset != len(data):
        raise ReplayFormatError(f"{len(data) - reader.offset} trailing bytes after replay")

    return ReplayFile(seed=seed, config_hash=digest, config_json=config_json, best_genomes=genomes,
                      outcome=CODE_OUTCOMES[code], frames=frames, score=score,
                      controls=controls, version=version)


def write_replay(path: Path, replay: ReplayFile) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_replay(replay))
    logger.info(f"Replay written to {path} ({len(replay.controls)} frames)")
    return path


def read_replay(path: Path) -> ReplayFile:
    return decode_replay(Path(path).read_bytes())
