"""Second-quantized fermion basis and operators for small electron numbers.

Mode ordering
-------------
Spin-orbitals are numbered dot-major, orbital-next, spin-last::

    0: (L, 1, up)   1: (L, 1, down)   2: (L, 2, up)   3: (L, 2, down)
    4: (R, 1, up)   5: (R, 1, down)   6: (R, 2, up)   7: (R, 2, down)

For a generic ``n_modes`` the same rule applies: mode ``k`` belongs to the
spatial orbital ``k // 2`` and has spin up when ``k`` is even. The left dot
owns the first half of the modes. A Fock state is a bitmask with bit ``k``
set when mode ``k`` is occupied, and

    c^dag_k |n> = (-1)^(number of occupied modes j < k) |n + e_k>

This is the only place the sign convention is defined; everything else
(Slater determinants, Hubbard terms, spin operators) goes through it.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

MAX_MODES = 62


class Dot(enum.IntEnum):
    LEFT = 0
    RIGHT = 1


class Spin(enum.IntEnum):
    UP = 0
    DOWN = 1


class Kind(enum.Enum):
    CREATE = "create"
    ANNIHILATE = "annihilate"


@dataclass(frozen=True, order=True)
class SpinOrbital:
    """One of the 8 spin-orbitals of the double-dot model."""

    dot: Dot
    orbital: int
    spin: Spin

    def __post_init__(self):
        if self.orbital not in (1, 2):
            raise ValueError(f"orbital must be 1 or 2, got {self.orbital}")

    @property
    def index(self) -> int:
        return 4 * int(self.dot) + 2 * (self.orbital - 1) + int(self.spin)

    @classmethod
    def from_index(cls, k: int) -> "SpinOrbital":
        if not 0 <= k < 8:
            raise ValueError(f"spin-orbital index out of range: {k}")
        return cls(Dot(k // 4), (k % 4) // 2 + 1, Spin(k % 2))

    def __str__(self):
        arrow = "u" if self.spin is Spin.UP else "d"
        return f"{'LR'[self.dot]}{self.orbital}{arrow}"


SPIN_ORBITALS = tuple(SpinOrbital.from_index(k) for k in range(8))


def mode(dot: str | Dot, orbital: int, spin: str | Spin) -> int:
    """Mode index from loose labels, e.g. ``mode("L", 1, "u")``."""
    if isinstance(dot, str):
        dot = {"L": Dot.LEFT, "R": Dot.RIGHT}[dot.upper()[0]]
    if isinstance(spin, str):
        spin = {"u": Spin.UP, "d": Spin.DOWN}[spin.lower()[0]]
    return SpinOrbital(Dot(dot), orbital, Spin(spin)).index


def _mode_index(m) -> int:
    return m.index if isinstance(m, SpinOrbital) else int(m)


@dataclass(frozen=True)
class FockState:
    occupation: int
    n_modes: int

    @property
    def occupied(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.n_modes) if self.occupation >> k & 1)

    @property
    def n_electrons(self) -> int:
        return bin(self.occupation).count("1")

    @property
    def charge_config(self) -> tuple[int, int]:
        half = self.n_modes // 2
        left = bin(self.occupation & ((1 << half) - 1)).count("1")
        return left, self.n_electrons - left

    @property
    def twice_sz(self) -> int:
        """2*Sz, i.e. n_up - n_down."""
        up = sum(1 for k in self.occupied if k % 2 == 0)
        return up - (self.n_electrons - up)

    @property
    def sz(self) -> float:
        return self.twice_sz / 2

    def site_occupations(self) -> tuple[int, ...]:
        return tuple(
            (self.occupation >> (2 * p) & 1) + (self.occupation >> (2 * p + 1) & 1)
            for p in range(self.n_modes // 2)
        )

    def label(self) -> str:
        if self.n_modes == 8:
            return " ".join(str(SPIN_ORBITALS[k]) for k in self.occupied) or "vac"
        return "".join("1" if self.occupation >> k & 1 else "0" for k in range(self.n_modes))


@dataclass(frozen=True)
class FockBasis:
    states: tuple[FockState, ...]
    n_modes: int
    index: dict[int, int] = field(repr=False, compare=False)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def position(self, occupation: int) -> int | None:
        return self.index.get(occupation)

    def restrict(self, predicate: Callable[[FockState], bool]) -> "FockBasis":
        """Sub-basis of the states satisfying ``predicate``, order preserved."""
        kept = tuple(s for s in self.states if predicate(s))
        if not kept:
            raise ValueError("restriction selects no states")
        return FockBasis(kept, self.n_modes, {s.occupation: i for i, s in enumerate(kept)})

    def embedding(self, parent: "FockBasis") -> np.ndarray:
        """Isometry (len(parent) x len(self)) placing this basis inside ``parent``."""
        emb = np.zeros((len(parent), len(self)))
        for j, s in enumerate(self.states):
            i = parent.position(s.occupation)
            if i is None:
                raise ValueError(f"state {s.label()} missing from parent basis")
            emb[i, j] = 1.0
        return emb


def build_basis(n_modes: int, n_electrons: int) -> FockBasis:
    """All ``C(n_modes, n_electrons)`` Fock states.

    States are ordered lexicographically by their tuple of occupied modes,
    which is the order produced by ``itertools.combinations``.
    """
    if not (0 <= n_electrons <= n_modes <= MAX_MODES):
        raise ValueError(
            f"need 0 <= n_electrons <= n_modes <= {MAX_MODES}, got ({n_modes}, {n_electrons})"
        )
    states = []
    for occ in itertools.combinations(range(n_modes), n_electrons):
        bits = 0
        for k in occ:
            bits |= 1 << k
        states.append(FockState(bits, n_modes))
    states = tuple(states)
    return FockBasis(states, n_modes, {s.occupation: i for i, s in enumerate(states)})


def apply_fermion(state: FockState, m, kind: Kind) -> tuple[FockState, int] | None:
    """Apply a single creation or annihilation operator.

    Returns ``None`` when the result vanishes, else the new state and the
    sign ``(-1)**(occupied modes before m)``.
    """
    k = _mode_index(m)
    if not 0 <= k < state.n_modes:
        raise ValueError(f"mode {k} out of range for {state.n_modes} modes")
    occupied = state.occupation >> k & 1
    if kind is Kind.CREATE and occupied:
        return None
    if kind is Kind.ANNIHILATE and not occupied:
        return None
    sign = -1 if bin(state.occupation & ((1 << k) - 1)).count("1") % 2 else 1
    return FockState(state.occupation ^ (1 << k), state.n_modes), sign


@dataclass(frozen=True)
class Term:
    """``coef * op_1 op_2 ... op_n`` with each op a (mode, is_creation) pair.

    Operators act right to left, as written.
    """

    coef: complex
    ops: tuple[tuple[int, bool], ...]


def number(k, coef=1.0) -> Term:
    k = _mode_index(k)
    return Term(coef, ((k, True), (k, False)))


def hop(a, b, coef=1.0) -> Term:
    """``coef * c^dag_a c_b``."""
    return Term(coef, ((_mode_index(a), True), (_mode_index(b), False)))


def two_body(a, b, c, d, coef=1.0) -> Term:
    """``coef * c^dag_a c^dag_b c_c c_d``."""
    a, b, c, d = map(_mode_index, (a, b, c, d))
    return Term(coef, ((a, True), (b, True), (c, False), (d, False)))


def _apply_term(state: FockState, term: Term) -> tuple[FockState, int] | None:
    sign = 1
    for k, create in reversed(term.ops):
        out = apply_fermion(state, k, Kind.CREATE if create else Kind.ANNIHILATE)
        if out is None:
            return None
        state, s = out
        sign *= s
    return state, sign


@dataclass(frozen=True, eq=False)
class ManyBodyOperator:
    matrix: np.ndarray
    basis: FockBasis

    def __post_init__(self):
        n = len(self.basis)
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match basis size {n}")

    def __add__(self, other):
        self._check(other)
        return ManyBodyOperator(self.matrix + other.matrix, self.basis)

    def __sub__(self, other):
        self._check(other)
        return ManyBodyOperator(self.matrix - other.matrix, self.basis)

    def __matmul__(self, other):
        self._check(other)
        return ManyBodyOperator(self.matrix @ other.matrix, self.basis)

    def scale(self, c):
        return ManyBodyOperator(c * self.matrix, self.basis)

    def dagger(self):
        return ManyBodyOperator(self.matrix.conj().T, self.basis)

    def is_hermitian(self, atol=1e-12) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=atol))

    def commutator(self, other) -> "ManyBodyOperator":
        self._check(other)
        return ManyBodyOperator(
            self.matrix @ other.matrix - other.matrix @ self.matrix, self.basis
        )

    def _check(self, other):
        if len(other.basis) != len(self.basis) or other.basis.states != self.basis.states:
            raise ValueError("operators live on different bases")


def build_operator(basis: FockBasis, terms: Iterable[Term]) -> ManyBodyOperator:
    """Matrix of a sum of second-quantized terms on ``basis``.

    Terms that map a basis state outside ``basis`` are dropped, so on a
    sub-basis the result is the projected operator P H P.
    """
    terms = list(terms)
    for t in terms:
        if len(t.ops) not in (2, 4):
            raise ValueError(f"unsupported term with {len(t.ops)} operators")
        for k, _ in t.ops:
            if not 0 <= k < basis.n_modes:
                raise ValueError(f"term references invalid mode {k}")
    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for j, state in enumerate(basis.states):
        for t in terms:
            out = _apply_term(state, t)
            if out is None:
                continue
            new, sign = out
            i = basis.position(new.occupation)
            if i is not None:
                mat[i, j] += sign * t.coef
    return ManyBodyOperator(mat, basis)


def total_sz(basis: FockBasis) -> ManyBodyOperator:
    diag = np.array([s.twice_sz / 2 for s in basis.states], dtype=complex)
    return ManyBodyOperator(np.diag(diag), basis)


def spin_raising(basis: FockBasis) -> ManyBodyOperator:
    """S+ = sum_p c^dag_{p,up} c_{p,down}."""
    return build_operator(basis, [hop(2 * p, 2 * p + 1) for p in range(basis.n_modes // 2)])


def total_s_squared(basis: FockBasis) -> ManyBodyOperator:
    """S^2 = S- S+ + Sz^2 + Sz, in units of hbar^2."""
    sp = spin_raising(basis).matrix
    sz = total_sz(basis).matrix
    return ManyBodyOperator(sp.conj().T @ sp + sz @ sz + sz, basis)


@dataclass(frozen=True, eq=False)
class Subspace:
    columns: np.ndarray
    basis: FockBasis

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.columns @ self.columns.conj().T

    def restrict(self, op) -> np.ndarray:
        mat = op.matrix if isinstance(op, ManyBodyOperator) else op
        return self.columns.conj().T @ mat @ self.columns


def project(
    basis: FockBasis,
    predicate: Callable[[FockState], bool] | None = None,
    *,
    twice_s: int | None = None,
    twice_sz: int | None = None,
    tol: float = 1e-8,
) -> Subspace:
    """Orthonormal basis of a subspace selected by Fock labels and/or spin.

    ``predicate`` filters Fock states; ``twice_sz`` filters by 2*Sz (also a
    Fock label); ``twice_s`` keeps the S^2 eigenspace with S = twice_s / 2.
    """
    keep = [
        i
        for i, s in enumerate(basis.states)
        if (predicate is None or predicate(s)) and (twice_sz is None or s.twice_sz == twice_sz)
    ]
    if not keep:
        raise ValueError("empty subspace: no Fock state satisfies the selection")
    cols = np.zeros((len(basis), len(keep)), dtype=complex)
    cols[keep, range(len(keep))] = 1.0
    if twice_s is not None:
        s2 = cols.conj().T @ total_s_squared(basis).matrix @ cols
        vals, vecs = np.linalg.eigh(s2)
        target = twice_s / 2 * (twice_s / 2 + 1)
        sel = np.abs(vals - target) < tol
        if not sel.any():
            raise ValueError(f"empty subspace: no S={twice_s}/2 states in selection")
        cols = cols @ vecs[:, sel]
    return Subspace(cols, basis)


def slater(basis: FockBasis, modes: Sequence[int]) -> np.ndarray:
    """Vector of c^dag_{m1} c^dag_{m2} ... |vac> with the documented sign convention."""
    state = FockState(0, basis.n_modes)
    sign = 1
    for k in reversed(list(modes)):
        out = apply_fermion(state, k, Kind.CREATE)
        if out is None:
            raise ValueError(f"Pauli-blocked Slater determinant {modes}")
        state, s = out
        sign *= s
    vec = np.zeros(len(basis), dtype=complex)
    i = basis.position(state.occupation)
    if i is None:
        raise ValueError("Slater determinant outside basis")
    vec[i] = sign
    return vec
