"""
Evolution benchmarks on the bundled tracks; run with -m slow
"""

import statistics
import warnings

import pytest

import config
from sim_logic.sim import run_evolution
from sim_logic.track import load_track
from storage.experiment_config import load_experiment_config

SEEDS = (1, 2, 3, 4, 5)


def generations_needed(experiment_name: str, **overrides) -> list:
    """Generations to success per seed; runs that never succeed count as max_generations + 1"""
    counts = []
    for seed in SEEDS:
        experiment = load_experiment_config(config.EXPERIMENTS_PATH / f'{experiment_name}.json',
                                            {**overrides, 'seed': seed})
        track = load_track((config.DATA_PATH.parent / experiment.track_path).read_bytes())
        result = run_evolution(experiment.to_evolution_config(track))
        counts.append(result.generations_to_success if result.success else experiment.max_generations + 1)
    return counts


@pytest.mark.slow
def test_straight_corridor_is_learned_quickly():
    counts = generations_needed('straight_corridor', **{'physics.layout': 'FF'})
    assert statistics.median(counts) <= 30, counts


@pytest.mark.slow
def test_front_drive_learns_the_s_curve_no_slower():
    ff = statistics.median(generations_needed('s_curve', **{'physics.layout': 'FF'}))
    fr = statistics.median(generations_needed('s_curve', **{'physics.layout': 'FR'}))
    if ff > fr:
        warnings.warn(f"S-curve: FF needed {ff} generations (median), FR only {fr}")
