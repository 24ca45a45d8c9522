import json

import numpy as np
import pytest

import config
from sim_logic.brain import random_genome
from sim_logic.episode import Outcome
from sim_logic.exceptions import ConfigParseError, ConfigValidationError, ReplayFormatError
from sim_logic.rng import Purpose, stream
from sim_logic.sim import GenerationStats
from sim_logic.vehicle import Controls, Layout
from storage.csv_store import STATS_COLUMNS, SWEEP_COLUMNS, SweepRow, read_csv, write_stats_csv, write_sweep_csv
from storage.experiment_config import (
    EFFECTIVE_CONFIG_FILE,
    apply_overrides,
    canonical_json,
    config_from_canonical,
    config_hash,
    load_experiment_config,
    parse_override_args,
    split_list,
    validate_config,
    write_effective_config,
)
from storage.replay_store import ReplayFile, decode_replay, encode_replay, read_replay, write_replay


def write_config(tmp_path, text: str):
    path = tmp_path / 'experiment.json'
    path.write_text(text, encoding='utf-8')
    return path


class TestOverrides:
    def test_both_flag_forms(self):
        args = ['--ga.mutation-rate', '0.1', '--physics.layout=FR', '--max-generations', '7']
        assert parse_override_args(args) == {
            'ga.mutation_rate': 0.1,
            'physics.layout': 'FR',
            'max_generations': 7,
        }

    def test_json_values(self):
        parsed = parse_override_args(['--net.hidden=[6, 4]', '--ga.elitism=false'])
        assert parsed == {'net.hidden': [6, 4], 'ga.elitism': False}

    def test_missing_value(self):
        with pytest.raises(ConfigParseError):
            parse_override_args(['--seed'])

    def test_stray_positional(self):
        with pytest.raises(ConfigParseError):
            parse_override_args(['oops'])

    def test_apply_nested(self):
        data = apply_overrides({'ga': {'population': 10}}, {'ga.mutation_rate': 0.3, 'physics.layout': 'FR'})
        assert data == {'ga': {'population': 10, 'mutation_rate': 0.3}, 'physics': {'layout': 'FR'}}

    def test_apply_through_a_value(self):
        with pytest.raises(ConfigValidationError):
            apply_overrides({'seed': 1}, {'seed.value': 2})

    def test_split_list(self):
        assert split_list('0.8, 0.9', float) == (0.8, 0.9)
        with pytest.raises(ConfigParseError):
            split_list('1,x', int)


class TestLoadExperimentConfig:
    def test_defaults_with_seed(self):
        cfg = load_experiment_config(overrides={'seed': 3})
        assert cfg.seed == 3
        assert cfg.physics.layout is Layout.FF
        assert cfg.topology.input_size == config.DEFAULT_RAY_COUNT + 2

    def test_seed_is_required(self):
        with pytest.raises(ConfigValidationError, match="missing field 'seed'"):
            load_experiment_config(overrides={})

    def test_overrides_win_over_file(self, tmp_path):
        path = write_config(tmp_path, json.dumps({'seed': 1, 'ga': {'mutation_rate': 0.2}}))
        cfg = load_experiment_config(path, {'ga.mutation_rate': 0.05})
        assert cfg.ga.mutation_rate == 0.05

    def test_parse_error_position(self, tmp_path):
        path = write_config(tmp_path, '{\n  "seed": 1,\n  "ga": {population: 4}\n}')
        with pytest.raises(ConfigParseError, match=r'line 3, column'):
            load_experiment_config(path)

    def test_unknown_field(self, tmp_path):
        path = write_config(tmp_path, json.dumps({'seed': 1, 'ga': {'populaton': 4}}))
        with pytest.raises(ConfigValidationError, match="unknown field 'ga.populaton'"):
            load_experiment_config(path)

    def test_constraint_violation(self):
        with pytest.raises(ConfigValidationError, match='mutation_rate'):
            load_experiment_config(overrides={'seed': 1, 'ga.mutation_rate': 1.5})

    def test_unknown_physics_override(self):
        with pytest.raises(ConfigValidationError, match='unknown vehicle parameter'):
            load_experiment_config(overrides={'seed': 1, 'physics.wings': 2.0})

    def test_physics_override_applied(self):
        cfg = load_experiment_config(overrides={'seed': 1, 'physics.layout': 'FR',
                                                'physics.friction_coeff': 0.9})
        assert cfg.params.layout is Layout.FR
        assert cfg.params.friction_coeff == 0.9

    def test_physics_fields_sit_beside_layout(self, tmp_path):
        path = write_config(tmp_path, '{"seed": 1, "physics": {"layout": "FR", "friction_coeff": 0.9}}')
        overrides = parse_override_args(['--physics.mass', '1500'])
        cfg = load_experiment_config(path, overrides)
        assert cfg.params.friction_coeff == 0.9
        assert cfg.params.mass == 1500
        assert json.loads(canonical_json(cfg))['physics'] == {'layout': 'FR', 'friction_coeff': 0.9, 'mass': 1500}
        assert config_from_canonical(canonical_json(cfg)).params == cfg.params

    def test_physics_parameter_constraint(self):
        with pytest.raises(ConfigValidationError, match='friction_coeff must be positive'):
            load_experiment_config(overrides={'seed': 1, 'physics.friction_coeff': -1.0})

    def test_seed_must_fit_in_64_bits(self):
        with pytest.raises(ConfigValidationError):
            load_experiment_config(overrides={'seed': 2 ** 64})

    @pytest.mark.parametrize('name', ['straight_corridor', 's_curve', 'closed_circuit_fr', 'obstacle_corridor'])
    def test_bundled_experiments_load(self, name):
        cfg = load_experiment_config(config.EXPERIMENTS_PATH / f'{name}.json')
        assert cfg.track_path is not None


class TestCanonicalForm:
    def test_paths_are_left_out(self):
        a = validate_config({'seed': 1, 'track_path': 'a.json', 'out_dir': 'x'})
        b = validate_config({'seed': 1, 'track_path': 'b.json', 'out_dir': 'y'})
        assert canonical_json(a) == canonical_json(b)
        assert 'track_path' not in json.loads(canonical_json(a))
        assert json.loads(canonical_json(a, include_paths=True))['track_path'] == 'a.json'

    def test_round_trip(self):
        cfg = validate_config({'seed': 9, 'physics': {'layout': 'FR'}, 'net': {'hidden': [6]}})
        again = config_from_canonical(canonical_json(cfg))
        assert canonical_json(again) == canonical_json(cfg)
        assert again.topology == cfg.topology

    def test_hash_covers_config_and_track(self):
        cfg = validate_config({'seed': 1})
        base = config_hash(cfg, b'track-a')
        assert len(base) == 32
        assert config_hash(cfg, b'track-a') == base
        assert config_hash(cfg, b'track-b') != base
        assert config_hash(validate_config({'seed': 2}), b'track-a') != base

    def test_effective_config_keeps_paths(self, tmp_path):
        cfg = validate_config({'seed': 1, 'track_path': 't.json', 'out_dir': str(tmp_path)})
        written = write_effective_config(cfg, tmp_path / 'out')
        assert written.name == EFFECTIVE_CONFIG_FILE
        data = json.loads(written.read_text(encoding='utf-8'))
        assert data['track_path'] == 't.json'
        assert validate_config(data) == cfg

    def test_effective_config_accepts_new_ray_count(self, tmp_path):
        cfg = validate_config({'seed': 1, 'rays': {'ray_count': 12}})
        written = write_effective_config(cfg, tmp_path / 'out')
        assert 'ray_angles' not in json.loads(written.read_text(encoding='utf-8'))['rays']
        again = load_experiment_config(written, {'rays.ray_count': 8})
        assert len(again.rays.ray_angles) == 8

    def test_effective_config_keeps_custom_angles(self, tmp_path):
        cfg = validate_config({'seed': 1, 'rays': {'ray_count': 3, 'ray_angles': [-0.5, 0.0, 0.5]}})
        written = write_effective_config(cfg, tmp_path / 'out')
        assert json.loads(written.read_text(encoding='utf-8'))['rays']['ray_angles'] == [-0.5, 0.0, 0.5]


class TestCsv:
    def test_stats_columns_and_float_round_trip(self, tmp_path):
        stats = [
            GenerationStats(0, 0.1 + 0.2, 1.0 / 3.0, 2.5, 1, 2, 3, 4, best_genome_id=7),
            GenerationStats(1, 12.75, 6.0, 5.5, 0, 10, 0, 0, best_genome_id=0),
        ]
        path = write_stats_csv(tmp_path / 'stats.csv', stats)
        header = path.read_text(encoding='utf-8').splitlines()[0]
        assert header == ','.join(STATS_COLUMNS)

        rows = read_csv(path)
        assert float(rows[0]['best_score']) == 0.1 + 0.2
        assert float(rows[0]['mean_score']) == 1.0 / 3.0
        assert [int(r['generation']) for r in rows] == [0, 1]
        assert int(rows[1]['crashes']) == 10

    def test_sweep_rows(self, tmp_path):
        rows = [
            SweepRow('FF', 0.9, 0.1, 1, 12, 600),
            SweepRow('FR', 0.8, 0.2, 1, -1, 0, error='validation error'),
        ]
        path = write_sweep_csv(tmp_path / 'sweep.csv', rows)
        parsed = read_csv(path)
        assert list(parsed[0]) == SWEEP_COLUMNS
        assert parsed[0]['generations_to_success'] == '12'
        assert parsed[1]['generations_to_success'] == '-1'
        assert parsed[1]['error'] == 'validation error'


@pytest.fixture
def replay():
    cfg = validate_config({'seed': 5, 'net': {'hidden': [4]}, 'rays': {'ray_count': 5}})
    genomes = [random_genome(cfg.topology, stream(5, Purpose.INIT, 0, i)) for i in range(3)]
    controls = [Controls(0.5, 0.0, -0.25), Controls(1.0, 0.1, 0.3)]
    return ReplayFile(seed=5, config_hash=config_hash(cfg, b'track'), config_json=canonical_json(cfg),
                      best_genomes=genomes, outcome=Outcome.STALLED, frames=2, score=1.0 / 7.0,
                      controls=controls)


class TestReplayFile:
    def test_decode_restores_everything(self, replay, tmp_path):
        decoded = read_replay(write_replay(tmp_path / 'best.replay', replay))
        assert decoded.seed == replay.seed
        assert decoded.config_hash == replay.config_hash
        assert decoded.outcome is Outcome.STALLED
        assert decoded.score == replay.score
        assert decoded.controls == replay.controls
        assert all(a.same_as(b) for a, b in zip(decoded.best_genomes, replay.best_genomes))
        assert decoded.final_genome.same_as(replay.best_genomes[-1])
        assert decoded.experiment.seed == 5

    def test_starts_with_magic(self, replay):
        assert encode_replay(replay)[:4] == b'NEVO'

    @pytest.mark.parametrize('cut', [3, 20, 60, -1])
    def test_truncated(self, replay, cut):
        data = encode_replay(replay)
        with pytest.raises(ReplayFormatError):
            decode_replay(data[:cut])

    def test_trailing_bytes(self, replay):
        with pytest.raises(ReplayFormatError, match='trailing'):
            decode_replay(encode_replay(replay) + b'\x00')

    def test_bad_magic(self, replay):
        with pytest.raises(ReplayFormatError, match='magic'):
            decode_replay(b'XXXX' + encode_replay(replay)[4:])

    def test_unknown_version(self, replay):
        data = bytearray(encode_replay(replay))
        data[4] = 99
        with pytest.raises(ReplayFormatError, match='version'):
            decode_replay(bytes(data))

    def test_empty_genome_list(self, replay):
        replay.best_genomes = []
        decoded = decode_replay(encode_replay(replay))
        with pytest.raises(ReplayFormatError):
            decoded.final_genome

    def test_weights_survive_bit_exactly(self, replay):
        decoded = decode_replay(encode_replay(replay))
        for a, b in zip(decoded.best_genomes, replay.best_genomes):
            assert np.array_equal(a.weights.view(np.uint64), b.weights.view(np.uint64))
