"""
`run` command - one seeded evolution run
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

from handlers.common import (
    EXIT_NOT_SOLVED,
    EXIT_OK,
    HANDLED_ERRORS,
    RunInputs,
    load_run_inputs,
    report_failure,
)
from sim_logic.sim import EvolutionResult, run_evolution
from storage.csv_store import write_stats_csv
from storage.experiment_config import canonical_json, config_hash, write_effective_config
from storage.replay_store import ReplayFile, write_replay

logger = logging.getLogger(__name__)

STATS_FILE = 'stats.csv'
REPLAY_FILE = 'best.replay'


def execute_run(inputs: RunInputs, out_dir: Path, threads: Optional[int] = None) -> EvolutionResult:
    """Run evolution and write effective_config.json, stats.csv and best.replay into out_dir"""
    experiment = inputs.experiment
    out_dir = Path(out_dir)
    write_effective_config(experiment, out_dir)

    result = run_evolution(experiment.to_evolution_config(inputs.track), threads)
    write_stats_csv(out_dir / STATS_FILE, result.stats)

    if result.final_result is None:
        logger.warning("No generation was evaluated; skipping the replay file")
        return result

    replay = ReplayFile(
        seed=experiment.seed,
        config_hash=config_hash(experiment, inputs.track_bytes),
        config_json=canonical_json(experiment),
        best_genomes=result.best_genomes,
        outcome=result.final_result.outcome,
        frames=result.final_result.frames,
        score=result.final_result.score,
        controls=result.final_controls,
    )
    write_replay(out_dir / REPLAY_FILE, replay)
    return result


def run_command(config_path: Optional[str], track_path: Optional[str], seed: Optional[int],
                out_dir: Optional[str], overrides: Dict[str, Any],
                threads: Optional[int] = None) -> int:
    """Exit 0 when the success criterion is met, 2 when generations run out, 1 on errors"""
    try:
        inputs = load_run_inputs(config_path, track_path, seed, out_dir, overrides)
        result = execute_run(inputs, Path(inputs.experiment.out_dir), threads)
    except HANDLED_ERRORS as e:
        return report_failure(e)

    if result.success:
        print(f"success after {result.generations_to_success} generations")
        return EXIT_OK
    print(f"no success within {result.generations} generations")
    return EXIT_NOT_SOLVED
