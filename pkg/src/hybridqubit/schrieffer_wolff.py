"""Effective two-level Hamiltonian of the hybrid qubit.

Two routes are provided and cross-checked against exact diagonalization
of the full 56-state Hamiltonian:

* the closed form: J1 = 2t^2/(E_S^R - E_S^L), J2 = 2t^2/(E_S^R - E_T^L),
  J' = (J1 + J2)/2 and

      H2 = [[-J1,            sqrt(3/2) J'],
            [sqrt(3/2) J',   E_ST - 3/2 (J1 + J2)]]

* a numeric canonical transformation on the (2,1) + (1,2) states with the
  generator iS = sum |n><n|T|m><m| / (U_n - U_m), projected on the logical
  kets.

The numeric route keeps the second-order term as 1/2 [iS, T] by default,
which is what the expansion of exp(iS) H exp(-iS) gives once
T + [iS, U] = 0. ``convention="full-commutator"`` uses U + [iS, T] instead,
which doubles every exchange term; it exists so both conventions can be
compared with the exact spectrum.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hubbard import HubbardParams, build_full_hamiltonian, dot_spectra, split_operators, three_electron_basis
from .many_body import FockBasis, ManyBodyOperator, mode, project, slater, total_s_squared, total_sz

log = logging.getLogger(__name__)

DEGENERACY_FLOOR = 1e-6  # meV


class NearDegeneracyError(ArithmeticError):
    """A tunneling-coupled pair of U-eigenstates is (nearly) degenerate."""

    def __init__(self, n, m, gap):
        self.pair = (n, m)
        self.gap = gap
        super().__init__(f"U-eigenstates {n} and {m} are coupled by T but split by only {gap:.3e} meV")


class RegimeError(ValueError):
    """Parameters outside the regime where the effective couplings are defined."""


class EqualTunnelingWarning(UserWarning):
    pass


def sw_basis(basis: FockBasis | None = None, include_triply_occupied: bool = False) -> FockBasis:
    """(2,1) + (1,2) states; (3,0) and (0,3) only on request."""
    basis = basis or three_electron_basis()
    keep = {(2, 1), (1, 2)}
    if include_triply_occupied:
        keep |= {(3, 0), (0, 3)}
    return basis.restrict(lambda s: s.charge_config in keep)


def _fix_phase(vecs):
    """Make the largest-magnitude component of every column real and positive."""
    idx = np.argmax(np.abs(vecs), axis=0)
    piv = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(piv) / piv)


@dataclass(frozen=True, eq=False)
class SWGenerator:
    iS: ManyBodyOperator
    energies: np.ndarray
    vectors: np.ndarray
    blocks: tuple

    @property
    def basis(self):
        return self.iS.basis


def sw_generator(U: ManyBodyOperator, T: ManyBodyOperator, degeneracy_floor=DEGENERACY_FLOOR) -> SWGenerator:
    basis = U.basis
    configs = [s.charge_config for s in basis.states]
    blocks = tuple(sorted(set(configs)))
    n = len(basis)
    off_block = np.array([[ci != cj for cj in configs] for ci in configs])
    if np.any(np.abs(U.matrix[off_block]) > 1e-12):
        raise ValueError("U couples different charge configurations")
    energies = np.zeros(n)
    vecs = np.zeros((n, n), dtype=complex)
    block_of = np.zeros(n, dtype=int)
    col = 0
    for b, cfg in enumerate(blocks):
        idx = [i for i, c in enumerate(configs) if c == cfg]
        w, v = np.linalg.eigh(U.matrix[np.ix_(idx, idx)])
        k = len(idx)
        energies[col : col + k] = w
        vecs[idx, col : col + k] = _fix_phase(v)
        block_of[col : col + k] = b
        col += k
    t_eig = vecs.conj().T @ T.matrix @ vecs
    gaps = energies[:, None] - energies[None, :]
    coupled = (block_of[:, None] != block_of[None, :]) & (np.abs(t_eig) > 1e-14)
    if np.any(coupled & (np.abs(gaps) < degeneracy_floor)):
        i, j = np.argwhere(coupled & (np.abs(gaps) < degeneracy_floor))[0]
        raise NearDegeneracyError(int(i), int(j), float(abs(gaps[i, j])))
    s_eig = np.zeros_like(t_eig)
    s_eig[coupled] = t_eig[coupled] / gaps[coupled]
    iS = vecs @ s_eig @ vecs.conj().T
    return SWGenerator(ManyBodyOperator(iS, basis), energies, vecs, blocks)


def second_order_block(gen: SWGenerator, T: ManyBodyOperator) -> ManyBodyOperator:
    """[iS, T]."""
    return gen.iS.commutator(T)


def second_order_elements(gen: SWGenerator, T: ManyBodyOperator) -> np.ndarray:
    """<k|[iS, T]|k'> in the U eigenbasis, summed term by term.

    sum_m T_km T_mk' / (U_k - U_m) - sum_m T_km T_mk' / (U_m - U_k')
    """
    t = gen.vectors.conj().T @ T.matrix @ gen.vectors
    u = gen.energies
    n = len(u)
    out = np.zeros((n, n), dtype=complex)
    for k in range(n):
        for kp in range(n):
            acc = 0j
            for m in range(n):
                amp = t[k, m] * t[m, kp]
                if amp == 0:
                    continue
                acc += amp / (u[k] - u[m]) - amp / (u[m] - u[kp])
            out[k, kp] = acc
    return out


@dataclass(frozen=True, eq=False)
class LogicalStates:
    ket0: np.ndarray
    ket1: np.ndarray
    basis: FockBasis

    @property
    def matrix(self) -> np.ndarray:
        return np.column_stack([self.ket0, self.ket1])


def logical_states(basis: FockBasis | None = None) -> LogicalStates:
    """|0>_L = |S>|down>, |1>_L = sqrt(1/3)|T0>|down> - sqrt(2/3)|T->|up>."""
    basis = basis or three_electron_basis()
    L1u, L1d, L2u, L2d = (mode("L", o, s) for o in (1, 2) for s in "ud")
    R1u, R1d = mode("R", 1, "u"), mode("R", 1, "d")
    ket0 = slater(basis, [L1u, L1d, R1d])
    ket1 = (
        math.sqrt(1 / 6) * (slater(basis, [L1u, L2d, R1d]) + slater(basis, [L1d, L2u, R1d]))
        - math.sqrt(2 / 3) * slater(basis, [L1d, L2d, R1u])
    )
    return LogicalStates(ket0, ket1, basis)


@dataclass(frozen=True, eq=False)
class EffectiveQubit:
    J1: float
    J2: float
    Jp: float
    E_ST_L: float
    H2: np.ndarray

    @classmethod
    def from_couplings(cls, J1, J2, Jp, E_ST_L):
        off = math.sqrt(1.5) * Jp
        H2 = np.array([[-J1, off], [off, E_ST_L - 1.5 * (J1 + J2)]])
        return cls(J1, J2, Jp, E_ST_L, H2)

    @property
    def gap(self) -> float:
        w = np.linalg.eigvalsh(self.H2)
        return float(w[1] - w[0])


def effective_couplings(params: HubbardParams, t: float | None = None):
    """(J1, J2, J') from the closed form, in meV.

    ``t`` overrides the tunneling amplitude; by default it is read from
    ``params`` and an EqualTunnelingWarning is issued when the inter-dot
    amplitudes differ (the first one is used).
    """
    if t is None:
        t = params.equal_tunneling()
        if t is None:
            warnings.warn(
                "inter-dot tunneling amplitudes differ; using t[L1,R1]", EqualTunnelingWarning, stacklevel=2
            )
            t = float(params.t_LR[0, 0])
    sp = dot_spectra(params)
    d1 = sp.E_S_R - sp.E_S_L
    d2 = sp.E_S_R - sp.E_T_L
    if d2 <= 0:
        raise RegimeError(f"need E_S^R - E_T^L > 0, got {d2:.6g} meV")
    if d1 <= 0:
        raise RegimeError(f"need E_S^R - E_S^L > 0, got {d1:.6g} meV")
    J1 = 2 * t * t / d1
    J2 = 2 * t * t / d2
    return J1, J2, (J1 + J2) / 2


def effective_hamiltonian_analytic(params: HubbardParams, t: float | None = None) -> EffectiveQubit:
    J1, J2, Jp = effective_couplings(params, t)
    return EffectiveQubit.from_couplings(J1, J2, Jp, dot_spectra(params).E_ST_L)


def effective_hamiltonian_numeric(
    params: HubbardParams,
    *,
    include_u1: bool = True,
    convention: str = "standard",
    degeneracy_floor: float = DEGENERACY_FLOOR,
    include_triply_occupied: bool = False,
    full_output: bool = False,
):
    """2x2 effective Hamiltonian in the {|0>_L, |1>_L} basis (meV).

    The energy zero is <0_L|U|0_L>. By default the (3,0) and (0,3) states are
    left out, which leaves an O(t^2) gap error from the (2,1) -> (3,0) virtual
    hop; ``include_triply_occupied=True`` keeps them as intermediate states.
    """
    if convention not in ("standard", "full-commutator"):
        raise ValueError(f"unknown convention {convention!r}")
    basis = sw_basis(include_triply_occupied=include_triply_occupied)
    u0, u1, T = split_operators(params, basis)
    U = u0 + u1 if include_u1 else u0
    gen = sw_generator(U, T, degeneracy_floor)
    second = second_order_block(gen, T).matrix
    weight = 0.5 if convention == "standard" else 1.0
    heff = U.matrix + weight * second
    heff = 0.5 * (heff + heff.conj().T)
    ls = logical_states(basis)
    L = ls.matrix
    h2 = L.conj().T @ heff @ L
    h2 = h2 - np.real(ls.ket0.conj() @ U.matrix @ ls.ket0) * np.eye(2)
    h2 = 0.5 * (h2 + h2.conj().T)
    if np.max(np.abs(h2.imag)) < 1e-15:
        h2 = h2.real
    if full_output:
        return h2, gen, ManyBodyOperator(heff, basis)
    return h2


def exact_doublet_levels(params: HubbardParams, n: int = 2) -> np.ndarray:
    """Lowest ``n`` S=1/2, Sz=-1/2 eigenvalues of the full 56-state Hamiltonian."""
    basis = three_electron_basis()
    H = build_full_hamiltonian(params, basis)
    sub = project(basis, twice_sz=-1, twice_s=1)
    return np.linalg.eigvalsh(sub.restrict(H))[:n]


def exact_gap(params: HubbardParams) -> float:
    e = exact_doublet_levels(params)
    return float(e[1] - e[0])


def gap_of(h2) -> float:
    w = np.linalg.eigvalsh(np.asarray(h2))
    return float(w[1] - w[0])


def spin_leakage(h: ManyBodyOperator) -> float:
    """Largest matrix element of ``h`` between S=1/2 and S=3/2 states."""
    basis = h.basis
    lo = project(basis, twice_s=1)
    hi = project(basis, twice_s=3)
    return float(np.max(np.abs(hi.columns.conj().T @ h.matrix @ lo.columns)))


def scaling_exponent(ts, errors) -> float:
    """Slope of log(error) against log(t) by least squares."""
    x = np.log(np.asarray(ts, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def charge_gap(params: HubbardParams) -> float:
    """Small denominator E_S^R - E_T^L used to express t/Delta."""
    sp = dot_spectra(params)
    return sp.E_S_R - sp.E_T_L


def check_logical_states(ls: LogicalStates, atol=1e-12) -> None:
    s2 = total_s_squared(ls.basis).matrix
    sz = total_sz(ls.basis).matrix
    for v in (ls.ket0, ls.ket1):
        if not np.allclose(s2 @ v, 0.75 * v, atol=atol) or not np.allclose(sz @ v, -0.5 * v, atol=atol):
            raise AssertionError("logical state is not an S=1/2, Sz=-1/2 eigenvector")
