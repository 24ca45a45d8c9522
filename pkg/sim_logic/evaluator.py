"""
Population evaluator - runs one episode per genome, serially or in worker processes
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import config
from sim_logic.brain import Genome
from sim_logic.episode import EpisodeConfig, EpisodeResult, run_episode
from sim_logic.sensors import SensorConfig
from sim_logic.track import Track
from sim_logic.vehicle import VehicleParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpisodeContext:
    """Read-only inputs shared by every episode of a run"""
    track: Track
    params: VehicleParams
    sensors: SensorConfig
    episode: EpisodeConfig

    def evaluate(self, genome: Genome) -> EpisodeResult:
        return run_episode(genome, self.track, self.params, self.sensors, self.episode)


_worker_context: Optional[EpisodeContext] = None


def _init_worker(context: EpisodeContext) -> None:
    global _worker_context
    _worker_context = context


def _evaluate_in_worker(genome: Genome) -> EpisodeResult:
    return _worker_context.evaluate(genome)


class PopulationEvaluator:
    """
    Evaluates populations against one context.

    With more than one thread a process pool is kept open for the life of the
    evaluator; results come back in submission order either way.
    """

    def __init__(self, context: EpisodeContext, threads: Optional[int] = None):
        self.context = context
        self.threads = max(1, threads if threads is not None else config.get_thread_count())
        self._pool: Optional[ProcessPoolExecutor] = None

    def __enter__(self) -> 'PopulationEvaluator':
        if self.threads > 1:
            self._pool = ProcessPoolExecutor(
                max_workers=self.threads,
                initializer=_init_worker,
                initargs=(self.context,),
            )
            logger.debug(f"Started evaluator pool with {self.threads} workers")
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def evaluate(self, population: Sequence[Genome]) -> List[EpisodeResult]:
        if self._pool is None:
            return [self.context.evaluate(g) for g in population]
        chunk = max(1, len(population) // (self.threads * 4))
        return list(self._pool.map(_evaluate_in_worker, population, chunksize=chunk))
