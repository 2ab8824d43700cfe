"""Real-coded genetic algorithm.

Tournament selection of size two, uniform crossover, Gaussian mutation with
sigma = 0.05 of the box width, and one elite carried over unchanged. Each
child draws from its own generator spawned from (seed, generation), so the
trajectory does not depend on how fitness evaluations are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MUTATION_SCALE = 0.05


@dataclass
class Population:
    x: np.ndarray  # (P, n)
    f: np.ndarray  # (P,)
    generation: int = 0

    def sorted(self) -> "Population":
        order = np.argsort(self.f, kind="stable")
        return Population(self.x[order], self.f[order], self.generation)

    @property
    def best(self):
        k = int(np.argmin(self.f))
        return self.x[k], float(self.f[k])


def child_rngs(seed: int, generation: int, n: int):
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, generation])
    return [np.random.default_rng(s) for s in ss.spawn(n)]


def random_population(lower, upper, size, seed):
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, 0xB0B]))
    return lower + (upper - lower) * rng.random((size, lower.size))


def make_child(rng, pop: Population, lower, upper, crossover_rate, mutation_rate, periodic):
    p = len(pop.f)

    def pick():
        a, b = rng.integers(p, size=2)
        return pop.x[a] if pop.f[a] <= pop.f[b] else pop.x[b]

    pa, pb = pick(), pick()
    if rng.random() < crossover_rate:
        mask = rng.random(pa.size) < 0.5
        child = np.where(mask, pa, pb)
    else:
        child = pa.copy()
    width = upper - lower
    mutate = rng.random(child.size) < mutation_rate
    child = child + mutate * rng.normal(0.0, MUTATION_SCALE, child.size) * width
    if periodic:
        return lower + np.mod(child - lower, width)
    return np.clip(child, lower, upper)


def next_generation(pop, lower, upper, seed, crossover_rate, mutation_rate, periodic=False):
    """Offspring array; row 0 is the elite."""
    size = len(pop.f)
    elite = pop.x[int(np.argmin(pop.f))]
    rngs = child_rngs(seed, pop.generation + 1, size - 1)
    kids = [make_child(r, pop, lower, upper, crossover_rate, mutation_rate, periodic) for r in rngs]
    return np.vstack([elite[None, :]] + kids) if kids else elite[None, :].copy()


def evaluate(f_batch, x, evaluator=None):
    return np.asarray(f_batch(x) if evaluator is None else evaluator(f_batch, x), dtype=float)


def genetic_search(
    f_batch,
    lower,
    upper,
    population_size=64,
    generations=100,
    crossover_rate=0.9,
    mutation_rate=0.2,
    seed=0,
    periodic=False,
    initial=None,
    evaluator=None,
    callback=None,
) -> Population:
    """Evolve a population in the box [lower, upper].

    ``f_batch`` maps an (m, n) array to m objective values. ``evaluator``
    may replace the direct call, e.g. to split the batch over threads.
    ``callback(pop)`` runs after every generation; returning True stops.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    if lower.shape != upper.shape or not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper)):
        raise ValueError("box bounds must be finite and of equal shape")
    if np.any(upper <= lower):
        raise ValueError("need upper > lower in every coordinate")
    if population_size < 2:
        raise ValueError("population needs at least two members")
    x = random_population(lower, upper, population_size, seed) if initial is None else np.array(initial, float)
    pop = Population(x, evaluate(f_batch, x, evaluator), 0)
    for g in range(generations):
        kids = next_generation(pop, lower, upper, seed, crossover_rate, mutation_rate, periodic)
        fk = evaluate(f_batch, kids[1:], evaluator)
        pop = Population(kids, np.concatenate([[pop.f.min()], fk]), g + 1)
        if callback is not None and callback(pop):
            break
    return pop
