"""
Experiment configuration
Loading the JSON config file, dotted flag overrides, canonical form and hashing
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

import config
from sim_logic.brain import Topology
from sim_logic.episode import EpisodeConfig
from sim_logic.evolution import GaConfig
from sim_logic.exceptions import ConfigParseError, ConfigValidationError
from sim_logic.sensors import SensorConfig, even_ray_angles
from sim_logic.sim import EvolutionConfig
from sim_logic.track import Track
from sim_logic.vehicle import Layout, VehicleParams, default_params

logger = logging.getLogger(__name__)

EFFECTIVE_CONFIG_FILE = 'effective_config.json'
PATH_FIELDS = ('track_path', 'out_dir')


class PhysicsConfig(BaseModel):
    """Layout plus any VehicleParams field, set at the same level"""
    model_config = ConfigDict(extra='allow', frozen=True, allow_inf_nan=False)

    layout: Layout = Layout.FF

    @property
    def overrides(self) -> Dict[str, Any]:
        return dict(self.model_extra or {})

    def to_params(self) -> VehicleParams:
        base = default_params(self.layout).model_dump()
        return VehicleParams(**{**base, **self.overrides, 'layout': self.layout})

    @model_validator(mode='after')
    def _check_overrides(self) -> 'PhysicsConfig':
        unknown = sorted(set(self.overrides) - set(VehicleParams.model_fields))
        if unknown:
            raise ValueError(f"unknown vehicle parameter(s): {', '.join(unknown)}")
        self.to_params()
        return self


class NetConfig(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)

    hidden: List[int] = Field(default_factory=lambda: list(config.DEFAULT_HIDDEN_LAYERS))


class ExperimentConfig(BaseModel):
    """Everything a run needs; the seed is always explicit"""
    model_config = ConfigDict(extra='forbid', frozen=True, allow_inf_nan=False)

    track_path: Optional[str] = None
    ga: GaConfig = Field(default_factory=GaConfig)
    physics: PhysicsConfig = Field(default_factory=PhysicsConfig)
    rays: SensorConfig = Field(default_factory=SensorConfig)
    net: NetConfig = Field(default_factory=NetConfig)
    episode: EpisodeConfig = Field(default_factory=EpisodeConfig)
    seed: int
    max_generations: int = 100
    out_dir: str = config.DEFAULT_OUT_DIR

    @model_validator(mode='after')
    def _check_run(self) -> 'ExperimentConfig':
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.max_generations < 0:
            raise ValueError("max_generations must not be negative")
        return self

    @property
    def topology(self) -> Topology:
        return Topology.for_rays(self.rays.ray_count, self.net.hidden)

    @property
    def params(self) -> VehicleParams:
        return self.physics.to_params()

    def to_evolution_config(self, track: Track) -> EvolutionConfig:
        return EvolutionConfig(
            track=track,
            params=self.params,
            sensors=self.rays,
            topology=self.topology,
            ga=self.ga,
            episode=self.episode,
            seed=self.seed,
            max_generations=self.max_generations,
        )


def _format_validation_error(error: ValidationError) -> str:
    first = error.errors()[0]
    path = '.'.join(str(p) for p in first['loc'])
    if first['type'] == 'missing':
        return f"missing field '{path}'"
    if first['type'] == 'extra_forbidden':
        return f"unknown field '{path}'"
    message = first['msg'].removeprefix('Value error, ')
    return f"field '{path}': {message}" if path else message


def parse_config_text(text: str, source: str = '<config>') -> Dict[str, Any]:
    """Parse config JSON; errors carry line and column"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(f"{source}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigParseError(f"{source}: top level must be a JSON object")
    return data


def parse_override_args(args: Sequence[str]) -> Dict[str, Any]:
    """
    Turn ['--ga.mutation-rate', '0.1', '--physics.layout=FR'] into
    {'ga.mutation_rate': 0.1, 'physics.layout': 'FR'}.

    Values are read as JSON when they parse, otherwise kept as strings.
    """
    overrides: Dict[str, Any] = {}
    items = list(args)
    i = 0
    while i < len(items):
        flag = items[i]
        if not flag.startswith('--') or len(flag) < 3:
            raise ConfigParseError(f"unrecognized argument '{flag}'")
        key, sep, raw = flag[2:].partition('=')
        if not sep:
            if i + 1 >= len(items):
                raise ConfigParseError(f"override '{flag}' needs a value")
            raw = items[i + 1]
            i += 1
        i += 1
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        overrides[key.replace('-', '_')] = value
    return overrides


def apply_overrides(data: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Set dotted paths in a copy of a nested dict"""
    result = json.loads(json.dumps(data))
    for dotted, value in overrides.items():
        keys = dotted.split('.')
        node = result
        for key in keys[:-1]:
            child = node.setdefault(key, {})
            if not isinstance(child, dict):
                raise ConfigValidationError(f"field '{dotted}': '{key}' is not a section")
            node = child
        node[keys[-1]] = value
    return result


def validate_config(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigValidationError(_format_validation_error(e)) from e


def load_experiment_config(path: Optional[Path] = None,
                           overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Read the config file (if any) and let overrides win over it"""
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding='utf-8')
        except UnicodeDecodeError as e:
            raise ConfigParseError(f"{path}: not valid UTF-8") from e
        data = parse_config_text(text, str(path))
    cfg = validate_config(apply_overrides(data, overrides or {}))
    logger.debug(f"Loaded experiment config (seed {cfg.seed}, layout {cfg.physics.layout.value})")
    return cfg


def canonical_json(cfg: ExperimentConfig, include_paths: bool = False) -> str:
    """Sorted, compact JSON of the config; paths are left out unless asked for"""
    exclude = None if include_paths else set(PATH_FIELDS)
    data = cfg.model_dump(mode='json', exclude=exclude)
    return json.dumps(data, sort_keys=True, separators=(',', ':'), ensure_ascii=False)


def config_from_canonical(text: str) -> ExperimentConfig:
    return validate_config(parse_config_text(text, '<embedded config>'))


def config_hash(cfg: ExperimentConfig, track_bytes: bytes) -> bytes:
    """SHA-256 over the canonical config and the digest of the track file"""
    digest = hashlib.sha256()
    digest.update(canonical_json(cfg).encode('utf-8'))
    digest.update(hashlib.sha256(track_bytes).digest())
    return digest.digest()


def write_effective_config(cfg: ExperimentConfig, out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / EFFECTIVE_CONFIG_FILE
    data = cfg.model_dump(mode='json')
    # generated angles are left out so ray_count stays overridable
    if cfg.rays.ray_angles == even_ray_angles(cfg.rays.ray_count):
        del data['rays']['ray_angles']
    target.write_text(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + '\n',
                      encoding='utf-8')
    logger.info(f"Effective config written to {target}")
    return target


def split_list(raw: str, cast) -> Tuple:
    """'0.8,0.9' -> (0.8, 0.9)"""
    try:
        return tuple(cast(part.strip()) for part in raw.split(',') if part.strip())
    except ValueError as e:
        raise ConfigParseError(f"bad list '{raw}': {e}") from e
