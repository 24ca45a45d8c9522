"""
Generation runner - evaluates populations, records statistics and drives the evolution loop
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

import config
from sim_logic.brain import Genome, Topology, random_genome
from sim_logic.episode import (
    EpisodeConfig,
    EpisodeResult,
    EpisodeTrace,
    Outcome,
    run_episode,
)
from sim_logic.evaluator import EpisodeContext, PopulationEvaluator
from sim_logic.evolution import GaConfig, next_generation
from sim_logic.exceptions import ConfigValidationError
from sim_logic.rng import Purpose, stream
from sim_logic.sensors import SensorConfig
from sim_logic.track import Track
from sim_logic.vehicle import Controls, VehicleParams
from utils.utils_monitoring import PerformanceTracker

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenerationStats:
    """Aggregates of one evaluated generation"""
    generation: int
    best_score: float
    mean_score: float
    median_score: float
    completions: int
    crashes: int
    stalls: int
    timeouts: int
    best_genome_id: int

    @classmethod
    def from_results(cls, generation: int, results: Sequence[EpisodeResult]) -> 'GenerationStats':
        scores = np.array([r.score for r in results], dtype=float)
        outcomes = [r.outcome for r in results]
        return cls(
            generation=generation,
            best_score=float(scores.max()),
            mean_score=float(scores.mean()),
            median_score=float(np.median(scores)),
            completions=outcomes.count(Outcome.COMPLETED),
            crashes=outcomes.count(Outcome.CRASHED),
            stalls=outcomes.count(Outcome.STALLED),
            timeouts=outcomes.count(Outcome.TIMED_OUT),
            best_genome_id=int(np.argmax(scores)),
        )


@dataclass(frozen=True)
class EvolutionConfig:
    """Everything one seeded evolution run needs"""
    track: Track
    params: VehicleParams
    sensors: SensorConfig
    topology: Topology
    ga: GaConfig
    episode: EpisodeConfig
    seed: int
    max_generations: int

    def validate(self) -> None:
        if self.topology.input_size != self.sensors.ray_count + 2:
            raise ConfigValidationError(
                f"net input size {self.topology.input_size} does not match "
                f"{self.sensors.ray_count} rays + speed + slip"
            )
        if self.max_generations < 0:
            raise ConfigValidationError("max_generations must not be negative")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigValidationError("seed must be a 64-bit unsigned integer")


@dataclass
class EvolutionResult:
    """Outcome of run_evolution"""
    stats: List[GenerationStats] = field(default_factory=list)
    population: List[Genome] = field(default_factory=list)
    best_genomes: List[Genome] = field(default_factory=list)
    success: bool = False
    generations_to_success: int = -1
    final_best: Optional[Genome] = None
    final_result: Optional[EpisodeResult] = None
    final_controls: List[Controls] = field(default_factory=list)

    @property
    def generations(self) -> int:
        return len(self.stats)


def initial_population(cfg: EvolutionConfig) -> List[Genome]:
    """Generation 0: one keyed stream per individual"""
    return [random_genome(cfg.topology, stream(cfg.seed, Purpose.INIT, 0, i))
            for i in range(cfg.ga.population)]


def run_evolution(cfg: EvolutionConfig, threads: Optional[int] = None,
                  seed_population: Optional[Sequence[Genome]] = None) -> EvolutionResult:
    """
    Evaluate, record and breed until a Completed outcome has appeared in
    SUCCESS_STREAK consecutive generations or max_generations is reached.

    seed_population replaces the random generation 0 when given.
    """
    cfg.validate()
    result = EvolutionResult()
    context = EpisodeContext(cfg.track, cfg.params, cfg.sensors, cfg.episode)
    tracker = PerformanceTracker()
    if seed_population is None:
        population = initial_population(cfg)
    else:
        population = list(seed_population)
        if len(population) != cfg.ga.population:
            raise ConfigValidationError(
                f"seed population has {len(population)} genomes, expected {cfg.ga.population}"
            )
        if any(g.topology != cfg.topology for g in population):
            raise ConfigValidationError("seed population does not match the network topology")
    streak = 0

    with PopulationEvaluator(context, threads) as evaluator:
        logger.info(
            f"Evolving on '{cfg.track.name}' ({cfg.params.layout.value}): population "
            f"{cfg.ga.population}, seed {cfg.seed}, {evaluator.threads} worker(s)"
        )
        for generation in range(cfg.max_generations):
            with tracker.measure('generation', count=len(population)):
                results = evaluator.evaluate(population)
            stats = GenerationStats.from_results(generation, results)
            result.stats.append(stats)
            result.population = list(population)
            result.best_genomes.append(population[stats.best_genome_id])
            result.final_best = population[stats.best_genome_id]
            result.final_result = results[stats.best_genome_id]

            logger.info(
                f"Generation {generation}: best {stats.best_score:.2f} m, "
                f"median {stats.median_score:.2f} m, completions {stats.completions}, "
                f"crashes {stats.crashes}, stalls {stats.stalls}, timeouts {stats.timeouts} "
                f"({tracker.rate('generation'):.1f} episodes/s)"
            )

            streak = streak + 1 if stats.completions > 0 else 0
            if streak >= config.SUCCESS_STREAK:
                result.success = True
                result.generations_to_success = generation + 1
                logger.info(f"Success after {generation + 1} generations")
                break

            if generation + 1 < cfg.max_generations:
                scores = [r.score for r in results]
                population = next_generation(population, scores, cfg.ga, cfg.seed, generation + 1)

    if result.final_best is not None:
        trace = EpisodeTrace()
        rerun = run_episode(result.final_best, cfg.track, cfg.params, cfg.sensors, cfg.episode, trace)
        if rerun != result.final_result:
            logger.warning("Re-run of the final best genome diverged from its evaluation")
        result.final_controls = trace.controls

    if not result.success:
        logger.info(f"Stopped after {result.generations} generations without success")
    return result
