import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rismask.core import RisGeometry, Scenario, StateMask, UnsupportedError, ValidationError, direction_from_degrees
from rismask.optimizer import (
    GaConfig,
    cell_phasors,
    evaluate_population,
    exhaustive_optimize,
    fitness,
    ga_optimize,
)
from rismask.synthesis import baseline_mask, initial_phase_field, two_state_set, uniform_state_set

deg = direction_from_degrees
# 1x2 array with kappa*d = pi and a 90 degree target gives alpha* = {0, pi}
PAIR = Scenario(RisGeometry(2, 1, 0.5, 0.5, 1.0), deg(0), deg(90))

# frozen from a pure-Python enumeration of all 512 masks (see test_small_exhaustive_regression)
OPT_3X3 = {180: 8.476345188613069, 110: 7.0872052900072795, 50: 4.227244448006721}


def brute_force(scenario, states):
    """Independent oracle: plain loops over every state sequence."""
    alpha = initial_phase_field(scenario.geometry, scenario.incident, scenario.target).values.reshape(-1)
    coeff = list(states.coefficients)
    best, best_seq = -1.0, None
    for seq in itertools.product(range(len(coeff)), repeat=alpha.size):
        val = abs(sum(coeff[s] * cmath.exp(1j * a) for s, a in zip(seq, alpha)))
        if val > best + 1e-12:
            best, best_seq = val, seq
    return best, best_seq


def test_fitness_examples(ideal_1bit):
    g = RisGeometry(3, 3, 0.5, 0.5, 1.0)
    flat = Scenario(g, deg(0), deg(0))
    assert fitness(StateMask(g, np.zeros((3, 3), int)), flat, ideal_1bit) == pytest.approx(9)
    assert fitness(StateMask(PAIR.geometry, [[0, 1]]), PAIR, ideal_1bit) == pytest.approx(2.0)
    s90 = two_state_set(0.0, math.pi / 2)
    vals = {seq: fitness(StateMask(PAIR.geometry, [list(seq)]), PAIR, s90) for seq in itertools.product((0, 1), repeat=2)}
    assert max(vals.values()) == pytest.approx(math.sqrt(2))
    assert vals[(0, 1)] == pytest.approx(math.sqrt(2)) and vals[(1, 0)] == pytest.approx(math.sqrt(2))


def test_fitness_equals_eq10_sum(scenario):
    psi = math.radians(134)
    states = two_state_set(0.0, psi)
    mask = baseline_mask(scenario, states)
    alpha = initial_phase_field(scenario.geometry, scenario.incident, scenario.target).values
    want = abs(np.exp(1j * (alpha + psi * mask.states)).sum())
    assert fitness(mask, scenario, states) == pytest.approx(want, rel=1e-12)


def test_fitness_geometry_mismatch(scenario, ideal_1bit):
    with pytest.raises(ValidationError):
        fitness(StateMask(PAIR.geometry, [[0, 1]]), scenario, ideal_1bit)


def test_exhaustive_examples(ideal_1bit):
    one = Scenario(RisGeometry(1, 1, 0.5, 0.5, 1.0), deg(0), deg(30))
    mask, f = exhaustive_optimize(one, ideal_1bit)
    assert f == pytest.approx(1.0) and int(mask.states[0, 0]) == 0
    _, f = exhaustive_optimize(PAIR, two_state_set(0.0, math.pi / 2))
    assert f == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("psi", [180, 110, 50])
def test_small_exhaustive_regression(psi):
    sc = Scenario(RisGeometry(3, 3, 0.5, 0.5, 1.0), deg(0), deg(60))
    states = two_state_set(0.0, math.radians(psi))
    mask, f = exhaustive_optimize(sc, states)
    oracle, seq = brute_force(sc, states)
    assert f == pytest.approx(oracle, abs=1e-9)
    assert f == pytest.approx(OPT_3X3[psi], abs=1e-9)
    assert tuple(mask.flat()) == seq


def test_exhaustive_multistate_against_oracle():
    sc = Scenario(RisGeometry(2, 2, 0.004, 0.006, 0.01), deg(20, 45), deg(50, 300))
    states = uniform_state_set(2)
    _, f = exhaustive_optimize(sc, states)
    assert f == pytest.approx(brute_force(sc, states)[0], abs=1e-9)


def test_exhaustive_guard(scenario, ideal_1bit):
    with pytest.raises(UnsupportedError, match="genetic algorithm"):
        exhaustive_optimize(scenario, ideal_1bit)


def test_ga_rejects_multistate(scenario):
    with pytest.raises(UnsupportedError):
        ga_optimize(scenario, uniform_state_set(2), GaConfig(seed=1))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"elite_count": 60, "population_size": 50},
        {"tournament_size": 1},
        {"crossover_probability": 1.5},
        {"base_mutation_rate": -0.1},
        {"seed": -1},
        {"max_generations": 0},
    ],
)
def test_ga_config_validation(kwargs, scenario, ideal_1bit):
    with pytest.raises(ValidationError):
        ga_optimize(scenario, ideal_1bit, GaConfig(**kwargs))


def test_ga_defaults_derive_from_cells():
    cfg = GaConfig().resolved(121)
    assert cfg.population_size == 242
    assert cfg.base_mutation_rate == pytest.approx(1 / 121)
    assert cfg.mutation_rate_cap == pytest.approx(10 / 121)
    assert GaConfig().resolved(9).population_size == 50


@pytest.mark.parametrize("psi", [180, 110, 50])
def test_ga_matches_exhaustive_3x3(psi):
    sc = Scenario(RisGeometry(3, 3, 0.5, 0.5, 1.0), deg(0), deg(60))
    states = two_state_set(0.0, math.radians(psi))
    res = ga_optimize(sc, states, GaConfig(seed=1))
    assert res.best_fitness == pytest.approx(OPT_3X3[psi], abs=1e-9)


def test_ga_deterministic_and_worker_independent(scenario):
    states = two_state_set(0.0, math.radians(150))
    a = ga_optimize(scenario, states, GaConfig(seed=7))
    b = ga_optimize(scenario, states, GaConfig(seed=7), workers=4)
    assert a.best_mask == b.best_mask
    assert a.fitness_history == b.fitness_history
    assert a.generations_run == b.generations_run
    c = ga_optimize(scenario, states, GaConfig(seed=8))
    assert c.seed == 8


def test_population_eval_chunking_is_bitwise(scenario, ideal_1bit):
    table = cell_phasors(scenario, ideal_1bit)
    pop = np.random.default_rng(0).integers(0, 2, (97, 121))
    assert evaluate_population(table, pop, 1).tobytes() == evaluate_population(table, pop, 5).tobytes()


def test_ga_stops_early(scenario, ideal_1bit):
    res = ga_optimize(scenario, ideal_1bit, GaConfig(seed=1, stagnation_stop_after=10))
    assert res.generations_run < GaConfig().max_generations
    res = ga_optimize(scenario, ideal_1bit, GaConfig(seed=1, max_generations=3))
    assert res.generations_run == 3 and len(res.fitness_history) == 3


def _small_scenarios():
    geom = st.builds(
        lambda qx, qy, px, py: RisGeometry(qx, qy, px * 0.01, py * 0.01, 0.01),
        st.integers(1, 4),
        st.integers(1, 3),
        st.floats(0.2, 1.0),
        st.floats(0.2, 1.0),
    )
    d = st.builds(deg, st.floats(0, 90), st.floats(0, 360, exclude_max=True))
    return st.builds(Scenario, geom, d, d)


@settings(max_examples=100, deadline=None)
@given(_small_scenarios(), st.floats(0.1, math.pi), st.integers(0, 2**64 - 1))
def test_ga_invariants(sc, psi, seed):
    states = two_state_set(0.0, psi)
    cfg = GaConfig(seed=seed, max_generations=30)
    res = ga_optimize(sc, states, cfg)
    assert res.best_fitness >= res.baseline_fitness
    assert res.baseline_fitness == pytest.approx(fitness(baseline_mask(sc, states), sc, states), abs=0)
    assert all(b >= a for a, b in zip(res.fitness_history, res.fitness_history[1:]))
    assert res.best_fitness == pytest.approx(fitness(res.best_mask, sc, states), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(_small_scenarios(), st.floats(0.1, math.pi), st.floats(-10, 10), st.integers(0, 2**32 - 1))
def test_gamma_invariance(sc, psi, gamma, seed):
    s0, s1 = two_state_set(0.0, psi), two_state_set(gamma, psi)
    mask = StateMask(sc.geometry, np.random.default_rng(seed).integers(0, 2, sc.geometry.shape))
    assert fitness(mask, sc, s0) == fitness(mask, sc, s1)
    cfg = GaConfig(seed=seed, max_generations=25)
    a, b = ga_optimize(sc, s0, cfg), ga_optimize(sc, s1, cfg)
    assert a.best_mask == b.best_mask
    assert a.fitness_history == b.fitness_history


@settings(max_examples=100, deadline=None)
@given(_small_scenarios(), st.integers(0, 2**32 - 1))
def test_complement_symmetry(sc, seed):
    states = two_state_set(0.0, math.pi)
    bits = np.random.default_rng(seed).integers(0, 2, sc.geometry.shape)
    f = fitness(StateMask(sc.geometry, bits), sc, states)
    fc = fitness(StateMask(sc.geometry, 1 - bits), sc, states)
    assert math.isclose(f, fc, rel_tol=1e-12, abs_tol=1e-12)
