# -*- coding: utf-8 -*-
"""Constrained binary genetic algorithm over element geometries.

Genome layout: [x0 (M bits) | switch positions (Q x ceil(log2 M) bits, MSB
first) | anode sides (Q bits)]. Position values >= M are infeasible and
never wrap.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InfeasiblePopulationError, InputError
from .topology import GeometryVector, Switch, objective, random_feasible_geometry

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GAParams:
    population: int = 64
    generations: int = 100
    mutation_rate: float = None
    crossover_rate: float = 0.9
    tournament: int = 3
    elitism: int = 1
    init_attempts: int = 100
    workers: int = 1

    def __post_init__(self):
        if self.population < 2:
            raise InputError("GA population must be at least 2")
        if self.generations < 1:
            raise InputError("GA needs at least one generation")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise InputError("mutation rate must lie in [0, 1]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise InputError("crossover rate must lie in [0, 1]")
        if self.tournament < 1:
            raise InputError("tournament size must be at least 1")
        if not 0 <= self.elitism < self.population:
            raise InputError("elitism must be smaller than the population")
        if self.init_attempts < 1 or self.workers < 1:
            raise InputError("init_attempts and workers must be positive")


@dataclass(frozen=True)
class GenomeLayout:
    ports: int
    switches: int

    @property
    def position_bits(self):
        return (self.ports - 1).bit_length()

    @property
    def length(self):
        return self.ports + self.switches * (self.position_bits + 1)

    def encode(self, x):
        genome = np.zeros(self.length, dtype=np.uint8)
        genome[:self.ports] = x.x0
        bits = self.position_bits
        offset = self.ports
        for sw in x.switches:
            value = sw.port - 1
            for b in range(bits):
                genome[offset + b] = (value >> (bits - 1 - b)) & 1
            offset += bits
        for q, sw in enumerate(x.switches):
            genome[offset + q] = 1 if sw.anode_side == "n2" else 0
        return genome

    def decode(self, genome):
        """GeometryVector for a genome, or None when the decode is invalid."""
        x0 = genome[:self.ports]
        bits = self.position_bits
        offset = self.ports
        ports = []
        for _ in range(self.switches):
            value = 0
            for b in genome[offset:offset + bits]:
                value = (value << 1) | int(b)
            offset += bits
            if value >= self.ports:
                return None
            ports.append(value + 1)
        if len(set(ports)) != len(ports) or any(x0[p - 1] for p in ports):
            return None
        sides = ["n2" if genome[offset + q] else "n1" for q in range(self.switches)]
        return GeometryVector(x0, [Switch(p, s) for p, s in zip(ports, sides)])


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best: float
    mean: float
    feasible_fraction: float


@dataclass(frozen=True)
class GAResult:
    best: GeometryVector
    fitness: float
    history: tuple
    evaluations: int


def stream(seed, *key):
    """Independent generator for one (generation, individual) slot."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


class _Evaluator:
    def __init__(self, layout, fitness, workers):
        self.layout = layout
        self.fitness = fitness
        self.workers = workers
        self.cache = {}
        self.evaluations = 0

    def _score(self, genome):
        x = self.layout.decode(genome)
        return -math.inf if x is None else self.fitness(x)

    def __call__(self, genomes):
        pending = []
        for g in genomes:
            key = g.tobytes()
            if key not in self.cache and key not in pending:
                pending.append(key)
        if pending:
            arrays = [np.frombuffer(k, dtype=np.uint8) for k in pending]
            if self.workers > 1:
                with ThreadPoolExecutor(max_workers=self.workers) as pool:
                    scores = list(pool.map(self._score, arrays))
            else:
                scores = [self._score(a) for a in arrays]
            self.cache.update(zip(pending, scores))
            self.evaluations += len(pending)
        return np.array([self.cache[g.tobytes()] for g in genomes])


def _record(generation, scores):
    feasible = scores[np.isfinite(scores)]
    return GenerationRecord(
        generation=generation,
        best=float(scores.max()),
        mean=float(feasible.mean()) if feasible.size else math.nan,
        feasible_fraction=feasible.size / scores.size,
    )


def _tournament(scores, size, rng):
    entrants = rng.integers(0, scores.size, size=size)
    return entrants[int(np.argmax(scores[entrants]))]


def run_ga(layout, fitness, params, seed, sample, initial=None):
    """Generic elitist GA.

    `fitness(x)` scores a decoded geometry, `sample(rng)` draws a feasible
    geometry or None. `initial` replaces sampling for the first population.
    """
    if initial is not None:
        population = [layout.encode(x) for x in initial]
        if len(population) != params.population:
            raise InputError(f"initial population has {len(population)} members, expected {params.population}")
    else:
        population = []
        for i in range(params.population):
            rng = stream(seed, 0, i)
            x = None
            for _ in range(params.init_attempts):
                x = sample(rng)
                if x is not None:
                    break
            if x is not None:
                population.append(layout.encode(x))
        if not population:
            raise InfeasiblePopulationError(params.init_attempts * params.population)
        # slots whose sampler failed are filled with clones of earlier feasible draws
        population = [population[i % len(population)] for i in range(params.population)]

    evaluate = _Evaluator(layout, fitness, params.workers)
    scores = evaluate(population)
    if not np.isfinite(scores).any():
        raise InfeasiblePopulationError(0)
    history = [_record(0, scores)]
    mutation = params.mutation_rate if params.mutation_rate is not None else 1.0 / layout.length

    for generation in range(1, params.generations + 1):
        order = np.argsort(-scores, kind="stable")
        children = [population[i].copy() for i in order[:params.elitism]]
        for j in range(params.population - params.elitism):
            rng = stream(seed, generation, j)
            a = population[_tournament(scores, params.tournament, rng)]
            b = population[_tournament(scores, params.tournament, rng)]
            if rng.random() < params.crossover_rate:
                child = np.where(rng.random(layout.length) < 0.5, a, b).astype(np.uint8)
            else:
                child = a.copy()
            flips = rng.random(layout.length) < mutation
            child[flips] ^= 1
            children.append(child)
        population = children
        scores = evaluate(population)
        history.append(_record(generation, scores))
        logger.debug("generation %d best %.6f feasible %.2f", generation, history[-1].best,
                     history[-1].feasible_fraction)

    best = int(np.argmax(scores))
    if not np.isfinite(scores[best]):
        raise InfeasiblePopulationError(evaluate.evaluations)
    return GAResult(
        best=layout.decode(population[best]),
        fitness=float(scores[best]),
        history=tuple(history),
        evaluations=evaluate.evaluations,
    )


def optimize(problem, params, seed, initial_population=None):
    """Maximize mean phase entropy subject to the DC feeding constraint."""
    layout = GenomeLayout(problem.incidence.M, problem.switches)

    def sample(rng):
        return random_feasible_geometry(problem.incidence, problem.feeding, problem.switches, rng, attempts=1)

    result = run_ga(layout, lambda x: objective(problem, x), params, seed, sample, initial_population)
    logger.info("GA finished: best mean entropy %.4f bits after %d evaluations", result.fitness, result.evaluations)
    return result
