"""
CSV output - per-generation statistics and sweep summaries
Floats are written with repr so every value parses back to the identical number
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence

from sim_logic.sim import GenerationStats

logger = logging.getLogger(__name__)

STATS_COLUMNS = ['generation', 'best_score', 'mean_score', 'median_score',
                 'completions', 'crashes', 'stalls', 'timeouts']
SWEEP_COLUMNS = ['layout', 'crossover_rate', 'mutation_rate', 'seed',
                 'generations_to_success', 'total_individuals', 'error']


def format_value(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class SweepRow:
    """One grid cell of a sweep"""
    layout: str
    crossover_rate: float
    mutation_rate: float
    seed: int
    generations_to_success: int
    total_individuals: int
    error: str = ''

    def as_row(self) -> List[str]:
        return [format_value(getattr(self, column)) for column in SWEEP_COLUMNS]


def _write(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_stats_csv(path: Path, stats: Sequence[GenerationStats]) -> Path:
    rows = ([format_value(getattr(s, column)) for column in STATS_COLUMNS] for s in stats)
    written = _write(path, STATS_COLUMNS, rows)
    logger.info(f"Wrote {len(stats)} generation rows to {written}")
    return written


def write_sweep_csv(path: Path, rows: Sequence[SweepRow]) -> Path:
    written = _write(path, SWEEP_COLUMNS, (r.as_row() for r in rows))
    logger.info(f"Wrote {len(rows)} sweep rows to {written}")
    return written


def read_csv(path: Path) -> List[dict]:
    with open(path, encoding='utf-8', newline='') as f:
        return list(csv.DictReader(f))
