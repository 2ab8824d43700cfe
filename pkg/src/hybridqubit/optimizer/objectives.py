"""Gate-search objectives over pulse durations."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .. import encoded as enc_mod
from ..encoded import CNOT, MAGIC, ConnectivityGraph, GateSequence, LogicalEncoding


class Target(enum.Enum):
    CNOT_CLASS = "class"
    EXACT_CNOT = "exact"


@dataclass(frozen=True)
class Weights:
    leak: float = 1.0
    inv: float = 1.0

    def __post_init__(self):
        if not (self.leak > 0 and self.inv > 0):
            raise ValueError("objective weights must be positive")


def batched_invariants(m: np.ndarray):
    """Makhlin (G1, G2) for a stack of unitaries (P, 4, 4); G2 keeps its
    (numerically tiny) imaginary part so callers can penalize it."""
    det = np.linalg.det(m)
    mb = MAGIC.conj().T @ m @ MAGIC
    mm = np.swapaxes(mb, -1, -2) @ mb
    tr = np.trace(mm, axis1=-2, axis2=-1)
    tr2 = np.trace(mm @ mm, axis1=-2, axis2=-1)
    return tr * tr / (16 * det), (tr * tr - tr2) / (4 * det)


def batched_polar(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


@dataclass(frozen=True, eq=False)
class Objective:
    """Objective for a fixed ordered list of edges; the free variables are
    the pulse durations."""

    graph: ConnectivityGraph
    template: tuple
    encoding: LogicalEncoding
    target: Target = Target.CNOT_CLASS
    weights: Weights = Weights()

    def __post_init__(self):
        tmpl = tuple(enc_mod._edge(e) for e in self.template)
        GateSequence.from_arrays(tmpl, [0.0] * len(tmpl)).validate(self.graph)
        object.__setattr__(self, "template", tmpl)
        if isinstance(self.target, str):
            object.__setattr__(self, "target", Target(self.target))

    @property
    def dim(self) -> int:
        return len(self.template)

    def blocks(self, taus: np.ndarray):
        """Logical blocks (P, 4, 4) and leakages (P,) for a batch of durations."""
        taus = np.atleast_2d(np.asarray(taus, dtype=float))
        L = self.encoding.logical_basis
        cols = enc_mod.evolve_columns(L, self.template, taus, self.encoding.space)
        m = np.einsum("dk,pdl->pkl", L, cols)
        leak = np.clip(1.0 - np.sum(np.abs(m) ** 2, axis=(1, 2)) / 4, 0.0, 1.0)
        return m, leak

    def batch(self, taus: np.ndarray) -> np.ndarray:
        m, leak = self.blocks(taus)
        if self.target is Target.CNOT_CLASS:
            g1, g2 = batched_invariants(batched_polar(m))
            inv = np.abs(g1) ** 2 + np.abs(g2 - 1) ** 2 / 9
            return self.weights.leak * leak + self.weights.inv * inv
        overlap = np.abs(np.einsum("kl,pkl->p", CNOT.conj(), m))
        sq = np.sum(np.abs(m) ** 2, axis=(1, 2)) + 4 - 2 * overlap
        return np.sqrt(np.maximum(sq, 0.0)) + self.weights.leak * leak

    def __call__(self, taus) -> float:
        return float(self.batch(np.asarray(taus, dtype=float)[None, :])[0])

    def sequence(self, taus, **kw) -> GateSequence:
        return GateSequence.from_arrays(self.template, list(np.asarray(taus, dtype=float)), **kw)


def objective_cnot_class(seq: GateSequence, graph, enc, weights=Weights()) -> float:
    obj = Objective(graph, tuple(seq.edges), enc, Target.CNOT_CLASS, weights)
    return obj(seq.taus)


def objective_exact_cnot(seq: GateSequence, graph, enc, weights=Weights()) -> float:
    obj = Objective(graph, tuple(seq.edges), enc, Target.EXACT_CNOT, weights)
    return obj(seq.taus)
