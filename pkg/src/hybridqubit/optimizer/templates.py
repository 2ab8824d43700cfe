"""Edge orderings for the duration search.

The shipped 19-pulse ordering was found offline by random search over
block-structured orderings (a qubit-coupling pulse between three-pulse
blocks on one qubit), then checked with ``solve_template``. It only uses
chain edges, so it is valid on both ``d`` and ``e``. ``prune_template``
shortens a solvable ordering by deleting pulses.
"""

from __future__ import annotations

import numpy as np

from ..encoded import ConnectivityGraph, _edge
from .objectives import Objective
from .search import refine, residuals

_A3 = [(1, 2), (0, 1), (1, 2)]
_B3 = [(3, 4), (4, 5), (3, 4)]
_I = [(2, 3)]
_ORDER19 = _I + _A3 + _B3 + _I + _B3 + _I + _A3 + _B3 + _I

# (graph preset, length) -> ordering
TEMPLATES: dict = {("d", 19): _ORDER19, ("e", 19): _ORDER19}


def preset_template(graph: str, length: int):
    return TEMPLATES.get((graph, int(length)))


def random_template(graph: ConnectivityGraph, length: int, rng: np.random.Generator):
    """Random ordering without immediate repeats; even slots favour pulses
    that couple the two qubits."""
    edges = graph.sorted_edges()
    inter = [e for e in edges if not graph.intra_qubit(e)] or edges
    out = []
    while len(out) < length:
        pool = inter if len(out) % 3 == 0 else edges
        e = pool[rng.integers(len(pool))]
        if out and out[-1] == e and len(edges) > 1:
            continue
        out.append(e)
    return [tuple(e) for e in out]


def solve_template(obj: Objective, rng, attempts=4, threshold=1e-20, max_evals=800):
    """Least-squares solve from random durations; returns taus or None."""
    for _ in range(attempts):
        x, _ = refine(obj, rng.random(obj.dim), max_evals)
        r = residuals(obj, x)
        if float(r @ r) < threshold:
            return np.mod(x, 1.0)
    return None


def prune_template(graph, encoding, template, target_length, seed=0, attempts=4, rounds=3):
    """Greedily delete pulses while the ordering stays solvable.

    Returns (ordering, taus) of the shortest ordering reached.
    """
    rng = np.random.default_rng(seed)
    tmpl = [_edge(e) for e in template]
    taus = solve_template(Objective(graph, tmpl, encoding), rng, attempts)
    if taus is None:
        raise ValueError("starting ordering has no solution")
    while len(tmpl) > target_length:
        found = False
        for _ in range(rounds):
            for j in rng.permutation(len(tmpl)):
                cand = tmpl[:j] + tmpl[j + 1 :]
                x = solve_template(Objective(graph, cand, encoding), rng, attempts)
                if x is not None:
                    tmpl, taus, found = cand, x, True
                    break
            if found:
                break
        if not found:
            break
    return tmpl, taus
