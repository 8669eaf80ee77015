"""Mask optimization: a seeded genetic algorithm and an exhaustive oracle.

Fitness is the magnitude of the coherent design-direction sum of the
per-cell reflection coefficients. Randomness comes from a single
``numpy.random.Generator`` stream and is consumed in this order every
generation:

1. tournament entrants, shape ``(n_pairs * 2, tournament_size)``
2. crossover draws, shape ``(n_pairs,)``
3. cut points in ``[1, L)``, shape ``(n_pairs,)``
4. mutation draws, shape ``(n_offspring, L)``

Fitness evaluation never touches the stream, so splitting it across
worker threads cannot change results.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Scenario, StateMask, StateSet, UnsupportedError, ValidationError
from .synthesis import baseline_mask, initial_phase_field

EXHAUSTIVE_LIMIT = 1 << 24
MAX_MUTATION_RATE = 0.5


def cell_phasors(scenario: Scenario, states: StateSet) -> np.ndarray:
    """Table ``(L, S)`` of each cell's contribution in each state, flattened row-major."""
    alpha = initial_phase_field(scenario.geometry, scenario.incident, scenario.target).values.reshape(-1)
    return np.exp(1j * alpha)[:, None] * states.relative_phasors()[None, :]


def _population_fitness(table: np.ndarray, population: np.ndarray) -> np.ndarray:
    picked = np.take_along_axis(table[None, :, :], population[:, :, None], axis=2)[:, :, 0]
    return np.abs(picked.sum(axis=1))


def evaluate_population(table: np.ndarray, population: np.ndarray, workers: int = 1) -> np.ndarray:
    """Fitness of each row of ``population``; row results do not depend on ``workers``."""
    if workers <= 1 or population.shape[0] < 2 * workers:
        return _population_fitness(table, population)
    chunks = np.array_split(population, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: _population_fitness(table, c), chunks))
    return np.concatenate(parts)


def _check(mask: StateMask, scenario: Scenario, states: StateSet) -> None:
    if mask.geometry != scenario.geometry:
        raise ValidationError("mask geometry does not match the scenario geometry", "geometry")
    mask.check(states)


def fitness(mask: StateMask, scenario: Scenario, states: StateSet) -> float:
    _check(mask, scenario, states)
    table = cell_phasors(scenario, states)
    return float(_population_fitness(table, mask.flat()[None, :])[0])


def exhaustive_optimize(scenario: Scenario, states: StateSet, chunk: int = 1 << 16) -> tuple[StateMask, float]:
    """Global optimum by full enumeration.

    Masks are enumerated in lexicographic order of the row-major state
    sequence; a later mask only wins with strictly larger fitness, beyond a
    1e-12 relative rounding allowance.
    """
    n_states, n_cells = len(states), scenario.geometry.n_cells
    total = n_states**n_cells
    if total > EXHAUSTIVE_LIMIT:
        raise UnsupportedError(
            f"{n_states}^{n_cells} masks exceed the enumeration limit of 2^24; use the genetic algorithm"
        )
    table = cell_phasors(scenario, states)
    place = n_states ** np.arange(n_cells - 1, -1, -1, dtype=np.int64)
    best_f, best_i = -math.inf, 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        pop = (idx[:, None] // place[None, :]) % n_states
        f = _population_fitness(table, pop)
        top = float(f.max())
        j = int(np.argmax(f >= top - _tie_tol(top)))
        if f[j] > best_f + _tie_tol(best_f):
            best_f, best_i = float(f[j]), int(idx[j])
    flat = (best_i // place) % n_states
    return StateMask(scenario.geometry, flat.reshape(scenario.geometry.shape)), best_f


def _tie_tol(value: float) -> float:
    return 1e-12 * max(1.0, abs(value)) if math.isfinite(value) else 0.0


@dataclass(frozen=True)
class GaConfig:
    """Genetic-algorithm settings; ``None`` fields are derived from the chromosome length L."""

    population_size: int | None = None  # max(50, 2L)
    tournament_size: int = 3
    crossover_probability: float = 0.9
    base_mutation_rate: float | None = None  # 1/L
    mutation_boost_factor: float = 2.0
    mutation_rate_cap: float | None = None  # min(10/L, 0.5)
    stagnation_boost_after: int = 20
    elite_count: int = 2
    max_generations: int = 2000
    stagnation_stop_after: int = 100
    improvement_epsilon: float = 1e-9
    seed: int = 0

    def resolved(self, n_cells: int) -> "GaConfig":
        cfg = replace(
            self,
            population_size=self.population_size if self.population_size is not None else max(50, 2 * n_cells),
            base_mutation_rate=(
                self.base_mutation_rate if self.base_mutation_rate is not None else min(1.0 / n_cells, MAX_MUTATION_RATE)
            ),
            mutation_rate_cap=(
                self.mutation_rate_cap if self.mutation_rate_cap is not None else min(10.0 / n_cells, MAX_MUTATION_RATE)
            ),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        def bad(name, why):
            raise ValidationError(f"GaConfig.{name} {why}", name)

        ints = ("tournament_size", "elite_count", "max_generations", "stagnation_stop_after", "stagnation_boost_after")
        for name in ints + ("population_size",):
            v = getattr(self, name)
            if v is None:
                continue
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                bad(name, f"must be an integer, got {v!r}")
        if self.population_size is not None and self.population_size < 2:
            bad("population_size", "must be >= 2")
        if self.tournament_size < 2:
            bad("tournament_size", "must be >= 2")
        if self.elite_count < 0:
            bad("elite_count", "must be >= 0")
        if self.population_size is not None and self.elite_count >= self.population_size:
            bad("elite_count", "must be smaller than population_size")
        if self.max_generations < 1:
            bad("max_generations", "must be >= 1")
        if self.stagnation_stop_after < 1 or self.stagnation_boost_after < 1:
            bad("stagnation_stop_after", "and stagnation_boost_after must be >= 1")
        for name in ("crossover_probability", "base_mutation_rate", "mutation_rate_cap"):
            v = getattr(self, name)
            if v is not None and not (0.0 <= v <= 1.0):
                bad(name, f"must lie in [0, 1], got {v!r}")
        if not (self.mutation_boost_factor >= 1.0 and math.isfinite(self.mutation_boost_factor)):
            bad("mutation_boost_factor", "must be finite and >= 1")
        if not self.improvement_epsilon >= 0:
            bad("improvement_epsilon", "must be >= 0")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            bad("seed", "must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True, eq=False)
class GaResult:
    best_mask: StateMask
    best_fitness: float
    baseline_fitness: float
    generations_run: int
    fitness_history: tuple[float, ...] = field(default_factory=tuple)
    seed: int = 0


def _rank(fit: np.ndarray) -> np.ndarray:
    return np.argsort(-fit, kind="stable")


def ga_optimize(scenario: Scenario, states: StateSet, config: GaConfig | None = None, workers: int = 1) -> GaResult:
    """Maximize fitness over binary masks with a generational GA.

    The initial population holds the nearest-state baseline, its bitwise
    complement and random masks. The elite individuals are carried over
    unchanged; the rest come from tournament selection, single-point
    crossover on the flattened chromosome and per-gene bit flips. The
    mutation rate is boosted after repeated stagnant generations and reset
    on improvement.
    """
    if len(states) != 2:
        raise UnsupportedError(f"the genetic algorithm handles two-state sets only, got {len(states)} states")
    geometry = scenario.geometry
    n_cells = geometry.n_cells
    cfg = (config or GaConfig()).resolved(n_cells)
    pop_size = cfg.population_size
    rng = np.random.default_rng(cfg.seed)
    table = cell_phasors(scenario, states)

    base = baseline_mask(scenario, states).flat().astype(np.int64)
    population = np.empty((pop_size, n_cells), dtype=np.int64)
    population[0] = base
    population[1] = 1 - base
    population[2:] = rng.integers(0, 2, size=(pop_size - 2, n_cells))

    baseline_fitness = float(_population_fitness(table, base[None, :])[0])
    best_fit = -math.inf
    best = base.copy()
    history: list[float] = []
    rate = cfg.base_mutation_rate
    stagnant = 0
    n_off = pop_size - cfg.elite_count
    n_pairs = (n_off + 1) // 2
    genes = np.arange(n_cells)
    generation = 0

    while True:
        fit = evaluate_population(table, population, workers)
        order = _rank(fit)
        population, fit = population[order], fit[order]
        if fit[0] > best_fit + cfg.improvement_epsilon:
            best_fit, best = float(fit[0]), population[0].copy()
            stagnant = 0
            rate = cfg.base_mutation_rate
        else:
            if fit[0] > best_fit:
                best_fit, best = float(fit[0]), population[0].copy()
            stagnant += 1
            if stagnant % cfg.stagnation_boost_after == 0:
                rate = min(rate * cfg.mutation_boost_factor, cfg.mutation_rate_cap)
        history.append(best_fit)
        generation += 1
        if generation >= cfg.max_generations or stagnant >= cfg.stagnation_stop_after:
            break

        # population is sorted best-first, so the lowest drawn index wins a tournament
        entrants = rng.integers(0, pop_size, size=(n_pairs * 2, cfg.tournament_size))
        winners = entrants.min(axis=1)
        p1, p2 = population[winners[0::2]], population[winners[1::2]]
        do_cross = rng.random(n_pairs) < cfg.crossover_probability
        cuts = rng.integers(1, max(n_cells, 2), size=n_pairs)
        cuts = np.where(do_cross, cuts, n_cells)
        head = genes[None, :] < cuts[:, None]
        c1 = np.where(head, p1, p2)
        c2 = np.where(head, p2, p1)
        children = np.empty((n_pairs * 2, n_cells), dtype=np.int64)
        children[0::2], children[1::2] = c1, c2
        children = children[:n_off]
        flips = rng.random((n_off, n_cells)) < rate
        children ^= flips

        nxt = np.empty_like(population)
        nxt[: cfg.elite_count] = population[: cfg.elite_count]
        nxt[cfg.elite_count :] = children
        population = nxt

    return GaResult(
        best_mask=StateMask(geometry, best.reshape(geometry.shape)),
        best_fitness=best_fit,
        baseline_fitness=baseline_fitness,
        generations_run=generation,
        fitness_history=tuple(history),
        seed=cfg.seed,
    )


def enumerate_masks(scenario: Scenario, n_states: int):
    """Yield every mask of ``scenario`` in lexicographic order (small arrays only)."""
    geom = scenario.geometry
    for seq in itertools.product(range(n_states), repeat=geom.n_cells):
        yield StateMask(geom, np.array(seq).reshape(geom.shape))


__all__ = [
    "EXHAUSTIVE_LIMIT",
    "GaConfig",
    "GaResult",
    "cell_phasors",
    "enumerate_masks",
    "evaluate_population",
    "exhaustive_optimize",
    "fitness",
    "ga_optimize",
]
