"""Hybrid genetic / simplex search for exchange sequences."""

from __future__ import annotations

import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares

from ..encoded import CNOT, GateSequence, canonical_tau, evolve_columns
from .genetic import Population, genetic_search
from .nelder_mead import nelder_mead
from .objectives import Objective, Target, batched_invariants

log = logging.getLogger(__name__)

THREADS_ENV = "HYBRIDQUBIT_THREADS"


@dataclass(frozen=True)
class SearchConfig:
    population_size: int = 48
    generations: int = 60
    nm_max_iters: int = 3000
    nm_tolerance: float = 1e-10
    mutation_rate: float = 0.2
    crossover_rate: float = 0.9
    seed: int = 0
    restarts: int = 20
    success_threshold: float = 1e-8
    polish_every: int = 20
    n_polish: int = 2
    refine: bool = True
    refine_max_evals: int = 2000
    time_budget: float | None = None
    threads: int = 1

    def __post_init__(self):
        ints = ("population_size", "generations", "nm_max_iters", "restarts", "polish_every", "n_polish", "threads")
        for name in ints:
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if not 0 < self.mutation_rate < 1:
            raise ValueError("mutation_rate must lie in (0, 1)")
        if not 0 <= self.crossover_rate <= 1:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if not (self.nm_tolerance > 0 and self.success_threshold > 0):
            raise ValueError("tolerances must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self):
        return asdict(self)


def thread_count(requested: int | None = None) -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, env)
    return max(1, requested or 1)


class ChunkedEvaluator:
    """Split a batch over threads; results are written back by index, so the
    output matches the serial evaluation exactly."""

    def __init__(self, threads: int):
        self.threads = threads
        self.pool = ThreadPoolExecutor(threads) if threads > 1 else None

    def __call__(self, f_batch, x):
        if self.pool is None or len(x) < 2 * self.threads:
            return f_batch(x)
        out = np.empty(len(x))
        chunks = np.array_split(np.arange(len(x)), self.threads)
        futures = [(idx, self.pool.submit(f_batch, x[idx])) for idx in chunks if len(idx)]
        for idx, fut in futures:
            out[idx] = fut.result()
        return out

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


# --------------------------------------------------------------------------
# residual form used by the final refinement


def residuals(obj: Objective, taus) -> np.ndarray:
    """Vector r(tau) with |r|^2 = 0 exactly where the objective vanishes.

    The components are the part of U L outside the code space and the
    deviation of the invariants of the logical block from the target.
    """
    taus = np.asarray(taus, dtype=float)
    L = obj.encoding.logical_basis
    cols = evolve_columns(L, obj.template, taus, obj.encoding.space)
    m = L.T @ cols
    out = cols - L @ m
    parts = [out.real.ravel(), out.imag.ravel()]
    if obj.target is Target.CNOT_CLASS:
        g1, g2 = batched_invariants(m[None])
        parts.append(np.array([g1[0].real, g1[0].imag, (g2[0].real - 1) / 3, g2[0].imag / 3]))
    else:
        ov = np.vdot(CNOT, m)
        phase = ov / abs(ov) if abs(ov) > 0 else 1.0
        d = m - phase * CNOT
        parts += [d.real.ravel(), d.imag.ravel()]
    return np.concatenate(parts)


def refine(obj: Objective, x0, max_evals=2000):
    res = least_squares(
        lambda t: residuals(obj, t),
        np.asarray(x0, dtype=float),
        method="trf",
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=max_evals,
    )
    return res.x, res.nfev


# --------------------------------------------------------------------------


@dataclass
class SearchResult:
    sequence: GateSequence
    objective_value: float
    success: bool
    restarts_used: int
    evaluations: int
    wall_time: float
    history: list = field(default_factory=list)

    @property
    def taus(self):
        return self.sequence.taus


def _progress(msg):
    print(msg, file=sys.stderr, flush=True)


def _polish(obj, x, config, f_target):
    r = nelder_mead(obj, x, config.nm_max_iters, config.nm_tolerance, step=0.05, f_target=f_target)
    return r.x, r.fun, r.n_eval


def _single_run(obj, config, seed, evaluator, deadline, progress):
    n = obj.dim
    lower, upper = np.zeros(n), np.ones(n)
    evals = [0]
    threshold = config.success_threshold

    def f_batch(x):
        evals[0] += len(x)
        return obj.batch(x)

    def callback(pop: Population):
        if progress:
            _progress(f"seed {seed} gen {pop.generation} best {pop.f.min():.3e}")
        if pop.generation % config.polish_every == 0 or pop.generation == config.generations:
            order = np.argsort(pop.f, kind="stable")[: config.n_polish]
            for k in order:
                x, fx, ne = _polish(obj, pop.x[k], config, threshold / 10)
                evals[0] += ne
                x = np.mod(x, 1.0)
                fx = obj(x)
                if fx < pop.f[k]:
                    pop.x[k], pop.f[k] = x, fx
        if pop.f.min() < threshold / 10:
            return True
        if deadline is not None and time.monotonic() > deadline:
            return True
        return False

    pop = genetic_search(
        f_batch,
        lower,
        upper,
        config.population_size,
        config.generations,
        config.crossover_rate,
        config.mutation_rate,
        seed,
        periodic=True,
        evaluator=evaluator,
        callback=callback,
    )
    x, fx = pop.best
    if config.refine and fx >= threshold / 10:
        xr, ne = refine(obj, x, config.refine_max_evals)
        fr = obj(np.mod(xr, 1.0))
        evals[0] += ne
        if fr < fx:
            x, fx = xr, fr
    x = np.array([canonical_tau(t) for t in x])
    return x, obj(x), evals[0]


def restart_seed(seed: int, restart: int) -> int:
    return int(np.random.SeedSequence([seed, restart]).generate_state(1, np.uint64)[0])


def hybrid_search(obj: Objective, config: SearchConfig = SearchConfig(), progress=False, graph_name=None):
    """Search durations for ``obj.template``; restarts use derived seeds."""
    if obj.dim < 1:
        raise ValueError("pulse template must contain at least one pulse")
    t0 = time.monotonic()
    deadline = None if config.time_budget is None else t0 + config.time_budget
    evaluator = ChunkedEvaluator(thread_count(config.threads))
    best_x, best_f, total = None, math.inf, 0
    history = []
    used = 0
    try:
        for r in range(config.restarts):
            used = r + 1
            x, fx, ne = _single_run(obj, config, restart_seed(config.seed, r), evaluator, deadline, progress)
            total += ne
            history.append(float(fx))
            if progress:
                _progress(f"restart {r} objective {fx:.3e}")
            if fx < best_f:
                best_x, best_f = x, fx
            if best_f < config.success_threshold:
                break
            if deadline is not None and time.monotonic() > deadline:
                break
    finally:
        evaluator.close()
    seq = obj.sequence(best_x, graph=graph_name or obj.graph.label, seed=config.seed, objective_value=float(best_f))
    return SearchResult(seq, float(best_f), bool(best_f < config.success_threshold), used, total,
                        time.monotonic() - t0, history)


# --------------------------------------------------------------------------
# rational durations


def rationalize(obj: Objective, taus, max_denominator=24, tolerance=1e-6):
    """Snap each duration to the nearest p/q (q <= max_denominator) when it
    lies within ``tolerance``; returns (taus, objective) after the snap."""
    out = []
    for t in np.asarray(taus, dtype=float):
        fr = Fraction(float(t)).limit_denominator(max_denominator)
        out.append(float(fr) if abs(float(fr) - t) < tolerance else float(t))
    out = np.array([canonical_tau(t) for t in out])
    return out, obj(out)


def as_fractions(taus, max_denominator=24, tolerance=1e-9):
    res = []
    for t in taus:
        fr = Fraction(float(t)).limit_denominator(max_denominator)
        res.append(f"{fr.numerator}/{fr.denominator}" if abs(float(fr) - t) < tolerance else None)
    return res


def with_config(config: SearchConfig, **kw) -> SearchConfig:
    return replace(config, **kw)
