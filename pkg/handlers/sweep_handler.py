"""
`sweep` command - layout x crossover rate x mutation rate x seed grid
"""

import itertools
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import config
from handlers.common import EXIT_OK, HANDLED_ERRORS, RunInputs, load_run_inputs, report_failure
from handlers.run_handler import execute_run
from storage.csv_store import SweepRow, write_sweep_csv
from storage.experiment_config import apply_overrides, validate_config

logger = logging.getLogger(__name__)

SWEEP_FILE = 'sweep.csv'


def cell_name(layout: str, crossover_rate: float, mutation_rate: float, seed: int) -> str:
    return f"{layout}_cr{crossover_rate!r}_mr{mutation_rate!r}_s{seed}"


def run_cell(base: RunInputs, layout: str, crossover_rate: float, mutation_rate: float,
             seed: int, out_dir: Path, threads: Optional[int]) -> SweepRow:
    """One grid cell; failures end up in the row instead of propagating"""
    try:
        data = apply_overrides(base.experiment.model_dump(mode='json'), {
            'physics.layout': layout,
            'ga.crossover_rate': crossover_rate,
            'ga.mutation_rate': mutation_rate,
            'seed': seed,
            'out_dir': str(out_dir / cell_name(layout, crossover_rate, mutation_rate, seed)),
        })
        experiment = validate_config(data)
        inputs = RunInputs(experiment=experiment, track=base.track, track_bytes=base.track_bytes)
        result = execute_run(inputs, Path(experiment.out_dir), threads)
    except HANDLED_ERRORS as e:
        logger.warning(f"Sweep cell {cell_name(layout, crossover_rate, mutation_rate, seed)} failed: {e}")
        return SweepRow(layout, crossover_rate, mutation_rate, seed, -1, 0, error=str(e))

    return SweepRow(
        layout=layout,
        crossover_rate=crossover_rate,
        mutation_rate=mutation_rate,
        seed=seed,
        generations_to_success=result.generations_to_success,
        total_individuals=result.generations * experiment.ga.population,
    )


def sweep_command(config_path: Optional[str], track_path: Optional[str], out_dir: Optional[str],
                  overrides: Dict[str, Any],
                  layouts: Sequence[str] = tuple(config.SWEEP_GRID['layouts']),
                  crossover_rates: Sequence[float] = tuple(config.SWEEP_GRID['crossover_rates']),
                  mutation_rates: Sequence[float] = tuple(config.SWEEP_GRID['mutation_rates']),
                  seeds: Sequence[int] = tuple(config.SWEEP_GRID['seeds']),
                  threads: Optional[int] = None) -> int:
    """Runs every cell, writes sweep.csv; only a bad base config is fatal"""
    try:
        base = load_run_inputs(config_path, track_path, seeds[0] if seeds else None, out_dir, overrides)
    except HANDLED_ERRORS as e:
        return report_failure(e)

    root = Path(base.experiment.out_dir)
    rows: List[SweepRow] = []
    grid = list(itertools.product(layouts, crossover_rates, mutation_rates, seeds))
    logger.info(f"Sweeping {len(grid)} cells into {root}")
    for layout, cr, mr, seed in grid:
        rows.append(run_cell(base, layout, cr, mr, seed, root, threads))

    try:
        write_sweep_csv(root / SWEEP_FILE, rows)
    except OSError as e:
        return report_failure(e)
    solved = sum(1 for r in rows if r.generations_to_success >= 0)
    print(f"{solved}/{len(rows)} cells reached the success criterion")
    return EXIT_OK
