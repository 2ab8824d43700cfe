"""Plain Nelder-Mead simplex search."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ALPHA, GAMMA, RHO, SIGMA = 1.0, 2.0, 0.5, 0.5


@dataclass
class NMResult:
    x: np.ndarray
    fun: float
    n_iter: int
    n_eval: int
    converged: bool
    history: list = field(default_factory=list)


def initial_simplex(x0, step):
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    sim = np.tile(x0, (n + 1, 1))
    steps = np.broadcast_to(np.asarray(step, dtype=float), (n,))
    sim[1:] += np.diag(steps)
    return sim


def nelder_mead(f, x0, max_iters=2000, tolerance=1e-10, step=0.05, f_target=None, simplex=None) -> NMResult:
    """Minimize ``f`` from ``x0``.

    Stops when every vertex lies within ``tolerance`` (max-norm) of the best
    one, after ``max_iters`` iterations, or as soon as the best value drops
    below ``f_target``.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.ndim != 1 or x0.size < 1:
        raise ValueError("x0 must be a non-empty vector")
    sim = initial_simplex(x0, step) if simplex is None else np.array(simplex, dtype=float)
    n = x0.size
    if sim.shape != (n + 1, n):
        raise ValueError(f"simplex must have shape {(n + 1, n)}")
    fs = np.array([f(v) for v in sim], dtype=float)
    n_eval = n + 1
    history = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        history.append(float(fs[0]))
        if f_target is not None and fs[0] < f_target:
            converged = True
            break
        if np.max(np.abs(sim[1:] - sim[0])) < tolerance:
            converged = True
            break
        centroid = sim[:-1].mean(axis=0)
        xr = centroid + ALPHA * (centroid - sim[-1])
        fr = f(xr)
        n_eval += 1
        if fr < fs[0]:
            xe = centroid + GAMMA * (xr - centroid)
            fe = f(xe)
            n_eval += 1
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
            continue
        outside = fr < fs[-1]
        if outside:
            xc = centroid + RHO * (xr - centroid)
        else:
            xc = centroid + RHO * (sim[-1] - centroid)
        fc = f(xc)
        n_eval += 1
        if (outside and fc <= fr) or (not outside and fc < fs[-1]):
            sim[-1], fs[-1] = xc, fc
            continue
        # shrink toward the best vertex
        sim[1:] = sim[0] + SIGMA * (sim[1:] - sim[0])
        fs[1:] = [f(v) for v in sim[1:]]
        n_eval += n
    best = int(np.argmin(fs))
    return NMResult(sim[best].copy(), float(fs[best]), it, n_eval, converged, history)
