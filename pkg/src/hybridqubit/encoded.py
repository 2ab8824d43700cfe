"""Exchange-only two-qubit registers built from three-spin encoded qubits.

Spins are numbered 0..n-1 and a computational basis state is an integer
whose bit ``n - 1 - i`` is 1 when spin ``i`` points up. Exchange pulses
conserve total S^2 and S_z, so sequences are evaluated on the S_z = -1
block of six spins (15 states), where the two-qubit logical states live.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from pathlib import Path

import numpy as np

from . import kernels

TWO_PI = 2 * math.pi

# magic (Bell) basis used by the local invariants
MAGIC = np.array(
    [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]],
    dtype=complex,
) / math.sqrt(2)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP2 = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

UNITARITY_TOL = 1e-8


class EdgeNotInGraphError(ValueError):
    pass


class NonUnitaryError(ValueError):
    pass


# --------------------------------------------------------------------------
# spin spaces


@dataclass(frozen=True, eq=False)
class SpinSpace:
    """Computational states of ``n_spins`` spins, optionally one S_z sector."""

    n_spins: int
    states: tuple
    twice_sz: int | None = None
    index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "index", {s: k for k, s in enumerate(self.states)})

    @property
    def dim(self) -> int:
        return len(self.states)

    def bit(self, i: int) -> int:
        return 1 << (self.n_spins - 1 - i)

    def check_spin(self, i):
        if not (isinstance(i, (int, np.integer)) and 0 <= i < self.n_spins):
            raise IndexError(f"spin index {i!r} out of range for {self.n_spins} spins")

    def swap_permutation(self, i: int, j: int) -> np.ndarray:
        """perm[k] = index of the state with spins i and j exchanged."""
        return _swap_permutation(self, int(i), int(j))

    def embedding(self, full: "SpinSpace") -> np.ndarray:
        """Isometry (full.dim, self.dim) placing this space inside ``full``."""
        e = np.zeros((full.dim, self.dim))
        for k, s in enumerate(self.states):
            e[full.index[s], k] = 1.0
        return e


@lru_cache(maxsize=None)
def full_space(n_spins: int) -> SpinSpace:
    if n_spins < 1:
        raise ValueError("need at least one spin")
    return SpinSpace(n_spins, tuple(range(1 << n_spins)))


@lru_cache(maxsize=None)
def sz_block(n_spins: int, twice_sz: int) -> SpinSpace:
    if (n_spins + twice_sz) % 2 or abs(twice_sz) > n_spins:
        raise ValueError(f"no states with 2Sz={twice_sz} for {n_spins} spins")
    n_up = (n_spins + twice_sz) // 2
    states = sorted(sum(1 << (n_spins - 1 - i) for i in ups) for ups in combinations(range(n_spins), n_up))
    return SpinSpace(n_spins, tuple(states), twice_sz)


_PERM_CACHE: dict = {}


def _swap_permutation(space, i, j):
    key = (space.n_spins, space.twice_sz, i, j)
    if key not in _PERM_CACHE:
        space.check_spin(i)
        space.check_spin(j)
        bi, bj = space.bit(i), space.bit(j)
        perm = np.empty(space.dim, dtype=np.int64)
        for k, s in enumerate(space.states):
            t = s ^ bi ^ bj if bool(s & bi) != bool(s & bj) else s
            perm[k] = space.index[t]
        perm.setflags(write=False)
        _PERM_CACHE[key] = perm
    return _PERM_CACHE[key]


def swap_matrix(space: SpinSpace, i: int, j: int) -> np.ndarray:
    perm = space.swap_permutation(i, j)
    m = np.zeros((space.dim, space.dim))
    m[perm, np.arange(space.dim)] = 1.0
    return m


def heisenberg_coupling(i: int, j: int, n_spins: int | None = None, space: SpinSpace | None = None) -> np.ndarray:
    """S_i . S_j in units of hbar^2, as a dense matrix on ``space``."""
    if space is None:
        if n_spins is None:
            raise ValueError("give n_spins or space")
        space = full_space(n_spins)
    if i == j:
        raise IndexError("exchange needs two distinct spins")
    return 0.5 * swap_matrix(space, i, j) - 0.25 * np.eye(space.dim)


def spin_operators(space: SpinSpace):
    """(S_z, S^2) on ``space``; S^2 is built from the pair swaps."""
    n = space.n_spins
    sz = np.diag([(2 * bin(s).count("1") - n) / 2 for s in space.states]).astype(float)
    s2 = 0.75 * n * np.eye(space.dim)
    for i, j in combinations(range(n), 2):
        s2 += 2 * heisenberg_coupling(i, j, space=space)
    return sz, s2


# --------------------------------------------------------------------------
# graphs and sequences


def _edge(e) -> tuple:
    i, j = (int(x) for x in e)
    if i == j:
        raise ValueError(f"edge {e!r} joins a spin to itself")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class ConnectivityGraph:
    n_spins: int
    edges: frozenset
    label: str = "custom"
    qubit_groups: tuple = ((0, 1, 2), (3, 4, 5))

    def __post_init__(self):
        edges = frozenset(_edge(e) for e in self.edges)
        for i, j in edges:
            if not (0 <= i < self.n_spins and 0 <= j < self.n_spins):
                raise ValueError(f"edge {(i, j)} references a spin outside 0..{self.n_spins - 1}")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "qubit_groups", tuple(tuple(int(s) for s in g) for g in self.qubit_groups))

    def sorted_edges(self):
        return sorted(self.edges)

    def contains(self, e) -> bool:
        return _edge(e) in self.edges

    def intra_qubit(self, e) -> bool:
        e = set(_edge(e))
        return any(e <= set(g) for g in self.qubit_groups)

    def to_dict(self):
        return {
            "label": self.label,
            "n_spins": self.n_spins,
            "edges": [list(e) for e in self.sorted_edges()],
            "qubit_groups": [list(g) for g in self.qubit_groups],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            int(d["n_spins"]),
            frozenset(tuple(e) for e in d["edges"]),
            d.get("label", "custom"),
            tuple(tuple(g) for g in d.get("qubit_groups", ((0, 1, 2), (3, 4, 5)))),
        )


# Qubit A is spins (0, 1, 2) and B is (3, 4, 5). In every group the first two
# spins form the pair (the doubly occupied dot for the hybrid layouts) and the
# third is the gauge spin.
_TRIANGLES = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]

PRESETS = {
    # four dots in a row: A pair | A single | B pair | B single
    "d": ConnectivityGraph(6, frozenset(_TRIANGLES + [(2, 3), (2, 4)]), "HybridLinear_d"),
    # six single-spin dots in a row
    "e": ConnectivityGraph(6, frozenset([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]), "TripleDotLinear_e"),
    # the two pairs face each other; one spin of A's pair reaches both of B's
    "f": ConnectivityGraph(6, frozenset(_TRIANGLES + [(1, 3), (1, 4)]), "HybridAlt_f"),
}
PRESET_BY_LABEL = {g.label: g for g in PRESETS.values()}


def preset(name: str) -> ConnectivityGraph:
    if name in PRESETS:
        return PRESETS[name]
    if name in PRESET_BY_LABEL:
        return PRESET_BY_LABEL[name]
    raise KeyError(f"unknown graph preset {name!r}; choose from {sorted(PRESETS)}")


def canonical_tau(tau: float) -> float:
    t = float(tau) % 1.0
    return 0.0 if t >= 1.0 else t


@dataclass(frozen=True)
class Pulse:
    edge: tuple
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "edge", _edge(self.edge))
        if not math.isfinite(self.tau):
            raise ValueError("pulse duration must be finite")
        object.__setattr__(self, "tau", float(self.tau))


@dataclass(frozen=True)
class GateSequence:
    pulses: tuple = ()
    graph: str = "custom"
    seed: int | None = None
    objective_value: float | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "pulses", tuple(p if isinstance(p, Pulse) else Pulse(*p) for p in self.pulses)
        )

    @classmethod
    def from_arrays(cls, edges, taus, **kw):
        if len(edges) != len(taus):
            raise ValueError("edges and taus differ in length")
        return cls(tuple(Pulse(e, t) for e, t in zip(edges, taus)), **kw)

    def __len__(self):
        return len(self.pulses)

    @property
    def edges(self):
        return [p.edge for p in self.pulses]

    @property
    def taus(self) -> np.ndarray:
        return np.array([p.tau for p in self.pulses], dtype=float)

    def canonical(self) -> "GateSequence":
        return GateSequence(
            tuple(Pulse(p.edge, canonical_tau(p.tau)) for p in self.pulses), self.graph, self.seed, self.objective_value
        )

    def time_steps(self) -> list:
        return time_steps(self)

    def validate(self, graph: ConnectivityGraph):
        for k, p in enumerate(self.pulses):
            if not graph.contains(p.edge):
                raise EdgeNotInGraphError(f"pulse {k}: edge {list(p.edge)} is not in graph {graph.label}")

    def to_dict(self):
        d = {"graph": self.graph, "pulses": [{"edge": list(p.edge), "tau": p.tau} for p in self.pulses]}
        if self.seed is not None:
            d["seed"] = self.seed
        if self.objective_value is not None:
            d["objective_value"] = self.objective_value
        d["time_steps"] = len(self.time_steps())
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(
            tuple(Pulse(tuple(p["edge"]), p["tau"]) for p in d.get("pulses", [])),
            d.get("graph", "custom"),
            d.get("seed"),
            d.get("objective_value"),
        )

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))


def time_steps(seq: GateSequence) -> list:
    """Greedy layering: each pulse goes into the earliest layer after the last
    layer that touches one of its spins."""
    layers: list[list[int]] = []
    last_for_spin: dict[int, int] = {}
    for k, p in enumerate(seq.pulses):
        layer = 1 + max((last_for_spin.get(s, -1) for s in p.edge), default=-1)
        if layer == len(layers):
            layers.append([])
        layers[layer].append(k)
        for s in p.edge:
            last_for_spin[s] = layer
    return layers


# --------------------------------------------------------------------------
# unitaries


def exchange_unitary(edge, tau: float, space: SpinSpace) -> np.ndarray:
    """exp(-2 pi i tau S_i.S_j), using S_i.S_j = SWAP/2 - 1/4."""
    i, j = _edge(edge)
    a = math.pi * tau
    swap = swap_matrix(space, i, j)
    phase = np.exp(0.5j * a)
    return phase * (math.cos(a) * np.eye(space.dim) - 1j * math.sin(a) * swap)


def sequence_unitary(seq: GateSequence, graph: ConnectivityGraph | None = None, space: SpinSpace | None = None):
    """Product of exchange unitaries; the first pulse acts first."""
    if graph is not None:
        seq.validate(graph)
    if space is None:
        n = graph.n_spins if graph is not None else 6
        space = sz_block(n, -2) if n == 6 else full_space(n)
    u = np.eye(space.dim, dtype=complex)
    for p in seq.pulses:
        u = exchange_unitary(p.edge, p.tau, space) @ u
    return u


def evolve_columns(cols: np.ndarray, edges, taus, space: SpinSpace) -> np.ndarray:
    """Apply pulses to the columns of ``cols`` (global phase dropped).

    ``taus`` may be (L,) or a batch (P, L); the result is (D, k) or (P, D, k).
    """
    taus = np.asarray(taus, dtype=float)
    single = taus.ndim == 1
    if len(edges) == 0:
        out = np.broadcast_to(cols.astype(complex), (1 if single else taus.shape[0],) + cols.shape).copy()
    else:
        perms = np.stack([space.swap_permutation(*_edge(e)) for e in edges])
        out = kernels.evolve_columns(cols, perms, np.atleast_2d(taus))
    return out[0] if single else out


# --------------------------------------------------------------------------
# encoding


SQRT_1_6 = math.sqrt(1 / 6)
SQRT_2_3 = math.sqrt(2 / 3)
SQRT_1_2 = math.sqrt(0.5)

# amplitudes over (pair_a, pair_b, gauge), 1 = up
QUBIT_STATES = (
    {(1, 0, 0): SQRT_1_2, (0, 1, 0): -SQRT_1_2},
    {(1, 0, 0): SQRT_1_6, (0, 1, 0): SQRT_1_6, (0, 0, 1): -SQRT_2_3},
)


def three_spin_states() -> np.ndarray:
    """(8, 2) matrix of |0>_L, |1>_L in the three-spin space."""
    space = full_space(3)
    out = np.zeros((8, 2))
    for k, amps in enumerate(QUBIT_STATES):
        for bits, a in amps.items():
            s = sum(b << (2 - i) for i, b in enumerate(bits))
            out[space.index[s], k] = a
    return out


@dataclass(frozen=True, eq=False)
class LogicalEncoding:
    qubit_groups: tuple
    space: SpinSpace
    encoded_states: np.ndarray
    logical_basis: np.ndarray

    @property
    def n_spins(self):
        return self.space.n_spins


def logical_encoding(
    qubit_groups=((0, 1, 2), (3, 4, 5)), space: SpinSpace | None = None, n_spins: int | None = None
) -> LogicalEncoding:
    """Product logical states |ab>, a the first group's bit, ordered 00, 01, 10, 11.

    The default space is the six-spin S_z = -1 block.
    """
    groups = tuple(tuple(int(s) for s in g) for g in qubit_groups)
    if len(groups) != 2 or any(len(g) != 3 for g in groups):
        raise ValueError("need two three-spin groups")
    flat = [s for g in groups for s in g]
    if len(set(flat)) != 6:
        raise ValueError("qubit groups overlap")
    if space is None:
        if (n_spins or 6) != 6:
            raise ValueError("two encoded qubits occupy exactly six spins")
        space = sz_block(6, -2)
    basis = np.zeros((space.dim, 4))
    for a, qa in enumerate(QUBIT_STATES):
        for b, qb in enumerate(QUBIT_STATES):
            for ka, va in qa.items():
                for kb, vb in qb.items():
                    s = 0
                    for spin, up in zip(groups[0] + groups[1], ka + kb):
                        if up:
                            s |= space.bit(spin)
                    if s not in space.index:
                        raise ValueError("space does not contain the logical states")
                    basis[space.index[s], 2 * a + b] += va * vb
    return LogicalEncoding(groups, space, three_spin_states(), basis)


def encoding_for(graph: ConnectivityGraph, space: SpinSpace | None = None) -> LogicalEncoding:
    return logical_encoding(graph.qubit_groups, space, graph.n_spins)


def logical_block(u: np.ndarray, enc: LogicalEncoding):
    """(M, leakage) with M = L^dag U L and leakage = 1 - |M|_F^2 / 4."""
    m = enc.logical_basis.T @ u @ enc.logical_basis
    return m, leakage_of(m)


def leakage_of(m: np.ndarray) -> float:
    return float(min(1.0, max(0.0, 1.0 - np.vdot(m, m).real / 4)))


def block_from_columns(cols: np.ndarray, enc: LogicalEncoding):
    """Same as ``logical_block`` given the evolved logical columns U L."""
    m = enc.logical_basis.T @ cols
    return m, leakage_of(m)


# --------------------------------------------------------------------------
# local invariants


def is_unitary(m, tol=UNITARITY_TOL) -> bool:
    m = np.asarray(m)
    return np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])) < tol


def makhlin_invariants(m: np.ndarray, tol: float = UNITARITY_TOL):
    """(G1 complex, G2 real) of a 4x4 unitary."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError("need a 4x4 matrix")
    if not is_unitary(m, tol):
        raise NonUnitaryError("Makhlin invariants need a unitary matrix")
    return _invariants(m)


def _invariants(m):
    det = np.linalg.det(m)
    mb = MAGIC.conj().T @ m @ MAGIC
    mm = mb.T @ mb
    tr = np.trace(mm)
    g1 = tr * tr / (16 * det)
    g2 = (tr * tr - np.trace(mm @ mm)) / (4 * det)
    return complex(g1), float(g2.real)


def closest_unitary(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """min over phi of |a - e^{i phi} b|_F."""
    ov = np.vdot(b, a)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))


def cnot_class_residual(g1: complex, g2: float) -> float:
    return abs(g1) ** 2 + (g2 - 1.0) ** 2 / 9


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_local(rng: np.random.Generator) -> np.ndarray:
    return np.kron(random_unitary(2, rng), random_unitary(2, rng))
