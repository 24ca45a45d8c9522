"""
End-to-end tests of the run, sweep and replay commands through main()
"""

import json

import pytest

import config
from main import main
from storage.csv_store import read_csv
from tests.conftest import corridor_payload, write_track

# any forward motion crosses the finish
SPRINT = ['--ga.population=20', '--ga.top-fraction=0.05', '--episode.max-time=8', '--episode.stall-window=2']


@pytest.fixture(autouse=True)
def no_log_file(monkeypatch):
    monkeypatch.setattr(config, 'ENABLE_LOGGING', False)


@pytest.fixture
def sprint_track(tmp_path):
    return write_track(tmp_path / 'sprint.json', corridor_payload(finish_s=0.5, length=30.0))


def run(track, out, *extra, seed='1'):
    return main(['run', '--track', str(track), '--seed', seed, '--out', str(out), *extra])


class TestRun:
    def test_trivial_track_succeeds(self, sprint_track, tmp_path, capsys):
        out = tmp_path / 'out'
        assert run(sprint_track, out, *SPRINT, '--max-generations=20') == 0
        assert 'success after' in capsys.readouterr().out
        rows = read_csv(out / 'stats.csv')
        assert 3 <= len(rows) <= 20
        assert all(int(r['completions']) > 0 for r in rows[-3:])
        assert (out / 'best.replay').exists()
        assert (out / 'effective_config.json').exists()

    def test_exhausted_generations_exit_2(self, sprint_track, tmp_path):
        out = tmp_path / 'out'
        assert run(sprint_track, out, *SPRINT, '--max-generations=1') == 2
        assert len(read_csv(out / 'stats.csv')) == 1

    def test_missing_track_names_the_path(self, tmp_path, capsys):
        missing = tmp_path / 'nowhere' / 'track.json'
        assert run(missing, tmp_path / 'out') == 1
        assert str(missing) in capsys.readouterr().err

    def test_missing_seed(self, sprint_track, tmp_path, capsys):
        assert main(['run', '--track', str(sprint_track), '--out', str(tmp_path / 'out')]) == 1
        assert "missing field 'seed'" in capsys.readouterr().err

    def test_invalid_override(self, sprint_track, tmp_path, capsys):
        assert run(sprint_track, tmp_path / 'out', '--ga.mutation-rate=2') == 1
        assert 'validation error' in capsys.readouterr().err

    def test_effective_config_reflects_overrides(self, sprint_track, tmp_path):
        out = tmp_path / 'out'
        run(sprint_track, out, *SPRINT, '--max-generations=1', '--ga.mutation-rate', '0.05',
            '--physics.layout=FR', '--physics.friction-coeff', '0.9')
        data = json.loads((out / 'effective_config.json').read_text(encoding='utf-8'))
        assert data['ga']['mutation_rate'] == 0.05
        assert data['physics'] == {'layout': 'FR', 'friction_coeff': 0.9}
        assert data['seed'] == 1
        assert data['track_path'] == str(sprint_track)

    def test_runs_are_byte_identical(self, sprint_track, tmp_path):
        for name in ('a', 'b'):
            run(sprint_track, tmp_path / name, *SPRINT, '--max-generations=4')
        for artifact in ('stats.csv', 'best.replay'):
            assert (tmp_path / 'a' / artifact).read_bytes() == (tmp_path / 'b' / artifact).read_bytes()

    def test_thread_count_does_not_change_output(self, sprint_track, tmp_path, monkeypatch):
        for name, threads in (('one', '1'), ('four', '4')):
            monkeypatch.setenv('NEUROEVO_THREADS', threads)
            run(sprint_track, tmp_path / name, *SPRINT, '--max-generations=4')
        for artifact in ('stats.csv', 'best.replay'):
            assert (tmp_path / 'one' / artifact).read_bytes() == (tmp_path / 'four' / artifact).read_bytes()

    def test_bundled_config_file(self, tmp_path):
        path = config.EXPERIMENTS_PATH / 'straight_corridor.json'
        track = config.TRACKS_PATH / 'straight_corridor.json'
        code = main(['run', '--config', str(path), '--track', str(track), '--out', str(tmp_path / 'out'),
                     '--max-generations=1', '--ga.population=4'])
        assert code == 2


class TestReplay:
    @pytest.fixture
    def recorded(self, sprint_track, tmp_path):
        out = tmp_path / 'recorded'
        run(sprint_track, out, *SPRINT, '--max-generations=3')
        return out / 'best.replay'

    def test_replay_reproduces(self, recorded, sprint_track, capsys):
        assert main(['replay', str(recorded), '--track', str(sprint_track)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 3
        assert len({line.split(':', 1)[1] for line in lines}) == 1

    def test_other_track_is_rejected(self, recorded, tmp_path, capsys):
        other = write_track(tmp_path / 'other.json', corridor_payload(finish_s=0.6, length=30.0))
        assert main(['replay', str(recorded), '--track', str(other)]) == 1
        assert 'replay mismatch' in capsys.readouterr().err

    def test_truncated_file(self, recorded, sprint_track, tmp_path, capsys):
        broken = tmp_path / 'broken.replay'
        broken.write_bytes(recorded.read_bytes()[:-5])
        assert main(['replay', str(broken), '--track', str(sprint_track)]) == 1
        assert 'parse error' in capsys.readouterr().err

    def test_missing_file(self, sprint_track, tmp_path):
        assert main(['replay', str(tmp_path / 'none.replay'), '--track', str(sprint_track)]) == 1


class TestSweep:
    def test_default_grid_without_generations(self, sprint_track, tmp_path):
        out = tmp_path / 'sweep'
        assert main(['sweep', '--track', str(sprint_track), '--out', str(out), '--max-generations=0']) == 0
        rows = read_csv(out / 'sweep.csv')
        assert len(rows) == 8
        assert {r['layout'] for r in rows} == {'FF', 'FR'}
        assert all(r['generations_to_success'] == '-1' for r in rows)
        assert all(r['total_individuals'] == '0' for r in rows)

    def test_sweep_output_is_reproducible(self, sprint_track, tmp_path):
        args = ['--layouts', 'FF', '--crossover-rates', '0.9', '--mutation-rates', '0.1,0.2',
                '--seeds', '1', *SPRINT, '--max-generations=3']
        for name in ('a', 'b'):
            assert main(['sweep', '--track', str(sprint_track), '--out', str(tmp_path / name), *args]) == 0
        first = (tmp_path / 'a' / 'sweep.csv').read_bytes()
        assert first == (tmp_path / 'b' / 'sweep.csv').read_bytes()

        rows = read_csv(tmp_path / 'a' / 'sweep.csv')
        assert [r['mutation_rate'] for r in rows] == ['0.1', '0.2']
        for r in rows:
            generations = int(r['generations_to_success'])
            assert generations == -1 or int(r['total_individuals']) == generations * 20
            assert (tmp_path / 'a' / f"FF_cr0.9_mr{r['mutation_rate']}_s1" / 'stats.csv').exists()

    def test_bad_cell_is_recorded(self, sprint_track, tmp_path):
        out = tmp_path / 'sweep'
        code = main(['sweep', '--track', str(sprint_track), '--out', str(out), '--layouts', 'FF,XX',
                     '--crossover-rates', '0.9', '--mutation-rates', '0.1', '--seeds', '1',
                     '--max-generations=0'])
        assert code == 0
        rows = read_csv(out / 'sweep.csv')
        assert rows[0]['error'] == ''
        assert rows[1]['error'] != ''
        assert rows[1]['generations_to_success'] == '-1'
