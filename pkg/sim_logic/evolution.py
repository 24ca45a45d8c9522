"""
Genetic algorithm supervisor
Relative fitness, top-n selection, fitness-weighted crossover, mutation, next generation
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

import config
from sim_logic.brain import Genome
from sim_logic.exceptions import GenomeError, ScoringError
from sim_logic.rng import Purpose, stream

logger = logging.getLogger(__name__)


class GaConfig(BaseModel):
    """Rates and sizes of the genetic algorithm"""
    model_config = ConfigDict(extra='forbid', frozen=True, allow_inf_nan=False)

    population: int = config.DEFAULT_GA['population']
    top_fraction: float = config.DEFAULT_GA['top_fraction']
    crossover_rate: float = config.DEFAULT_GA['crossover_rate']
    mutation_rate: float = config.DEFAULT_GA['mutation_rate']
    mutation_range: float = config.DEFAULT_GA['mutation_range']
    elitism: bool = config.DEFAULT_GA['elitism']

    @model_validator(mode='after')
    def _check_rates(self) -> 'GaConfig':
        if self.population < 1:
            raise ValueError("population must be positive")
        if not 0.0 < self.top_fraction <= 1.0:
            raise ValueError("top_fraction must lie in (0, 1]")
        for name in ('crossover_rate', 'mutation_rate'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.mutation_range < 0.0:
            raise ValueError("mutation_range must not be negative")
        return self

    @property
    def parent_count(self) -> int:
        """n = ceil(top_fraction * p), ignoring float noise such as 0.3 * 10"""
        return max(1, min(self.population, math.ceil(self.top_fraction * self.population - 1e-9)))


@dataclass(frozen=True, eq=False)
class FitnessVector:
    """Relative fitness per individual; sums to 1 (uniform when every score is 0)"""
    values: np.ndarray

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, i: int) -> float:
        return float(self.values[i])


def compute_fitness(scores: Sequence[float]) -> FitnessVector:
    """fitness_i = score_i / sum(scores)"""
    s = np.asarray(scores, dtype=float)
    if s.ndim != 1 or s.shape[0] < 1:
        raise ScoringError("need at least one score")
    if not np.all(np.isfinite(s)):
        raise ScoringError("scores must be finite")
    if np.any(s < 0.0):
        raise ScoringError(f"negative score at index {int(np.flatnonzero(s < 0.0)[0])}")

    total = s.sum()
    values = np.full(s.shape[0], 1.0 / s.shape[0]) if total == 0.0 else s / total
    values.setflags(write=False)
    return FitnessVector(values=values)


def select_top(fitness: FitnessVector, n: int) -> List[int]:
    """Indices of the n fittest, by descending fitness then ascending index"""
    p = len(fitness)
    if not 1 <= n <= p:
        raise ValueError(f"n must lie in [1, {p}], got {n}")
    order = np.lexsort((np.arange(p), -fitness.values))
    return [int(i) for i in order[:n]]


def crossover(parents: Sequence[Genome], parent_fitness: Sequence[float]) -> Genome:
    """Fitness-weighted arithmetic crossover, renormalized over the parents"""
    if not parents:
        raise GenomeError("crossover needs at least one parent")
    if len(parent_fitness) != len(parents):
        raise GenomeError("one fitness value per parent required")
    topology = parents[0].topology
    if any(g.topology != topology for g in parents[1:]):
        raise GenomeError("parents have different topologies")

    f = np.asarray(parent_fitness, dtype=float)
    if np.any(f < 0.0) or not np.all(np.isfinite(f)):
        raise GenomeError("parent fitness must be finite and non-negative")
    total = f.sum()
    if total <= 0.0:
        raise GenomeError("parent fitness sums to zero")
    f = f / total

    w = np.stack([g.weights for g in parents])
    # anchored form keeps identical parents bit-exact
    child = w[0] + f @ (w - w[0])
    child = np.clip(child, w.min(axis=0), w.max(axis=0))
    return Genome(weights=child, topology=topology)


def mutate_with_mask(genome: Genome, cfg: GaConfig,
                     rng: np.random.Generator) -> Tuple[Genome, np.ndarray]:
    """mutate, also returning which weights were replaced"""
    weights = genome.weights.copy()
    mask = np.zeros(weights.shape[0], dtype=bool)
    rate, span = cfg.mutation_rate, cfg.mutation_range
    for i in range(weights.shape[0]):
        if rng.random() < rate:
            weights[i] = rng.uniform(-span, span)
            mask[i] = True
    return genome.with_weights(weights), mask


def mutate(genome: Genome, cfg: GaConfig, rng: np.random.Generator) -> Genome:
    """Replace each weight with probability mutation_rate by a uniform draw on [-range, range]"""
    mutated, _ = mutate_with_mask(genome, cfg, rng)
    return mutated


def breed_child(base: Genome, fittest: Genome, cfg: GaConfig,
                rng: np.random.Generator) -> Tuple[Genome, np.ndarray]:
    """Per weight: base with probability crossover_rate else the fittest parent; then mutate"""
    take_base = rng.random(len(base)) < cfg.crossover_rate
    child = base.with_weights(np.where(take_base, base.weights, fittest.weights))
    return mutate_with_mask(child, cfg, rng)


def next_generation(population: Sequence[Genome], scores: Sequence[float], cfg: GaConfig,
                    seed: int, generation: int) -> List[Genome]:
    """
    Breed the next population.

    All children descend from one crossover base of the top-n parents. Child c draws
    from its own stream keyed by (seed, generation, c); with elitism child 0 is the
    unmutated base and, when there are several parents, child 1 is the
    unmutated fittest parent.
    """
    p = len(population)
    if p != len(scores):
        raise ValueError(f"{p} genomes but {len(scores)} scores")

    fitness = compute_fitness(scores)
    n = min(cfg.parent_count, p)
    chosen = select_top(fitness, n)
    parents = [population[i] for i in chosen]
    base = crossover(parents, [fitness[i] for i in chosen])
    fittest = parents[0]

    elites = [base, fittest] if n > 1 else [base]
    children: List[Genome] = []
    for c in range(p):
        if cfg.elitism and c < len(elites):
            children.append(elites[c])
            continue
        child, _ = breed_child(base, fittest, cfg, stream(seed, Purpose.BREED, generation, c))
        children.append(child)

    logger.debug(f"Generation {generation}: bred {p} children from parents {chosen}")
    return children
