"""Hubbard-like Hamiltonian of a two-orbital double quantum dot.

Spatial orbitals ("sites") are indexed L1=0, L2=1, R1=2, R2=3, i.e. site
``p`` owns modes ``2p`` (up) and ``2p + 1`` (down). The Coulomb part is

    1/2 sum_{pqrs} G[p,q,r,s] sum_{s,s'} c^dag_{p s} c^dag_{q s'} c_{r s'} c_{s s}

with G[p,q,q,p] = C[p,q], G[p,q,p,q] = K[p,q] for p != q, plus any extra
entries. K's diagonal is never used: G[p,p,p,p] is the on-site direct term
and comes from C alone. Coulomb and tunneling integrals are model inputs.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .many_body import FockBasis, ManyBodyOperator, Term, build_basis, build_operator, hop, number, two_body

log = logging.getLogger(__name__)

SITES = ("L1", "L2", "R1", "R2")
SITE_INDEX = {name: p for p, name in enumerate(SITES)}


def site_dot(p: int) -> int:
    return p // 2


@dataclass(frozen=True, eq=False)
class HubbardParams:
    """Model energies in meV.

    eps[dot][orbital-1], mu[dot], tun/C/K are 4x4 over sites, gamma is a
    tuple of ((p, q, r, s), value) extra Coulomb entries.
    """

    eps: np.ndarray
    mu: np.ndarray
    tun: np.ndarray
    C: np.ndarray
    K: np.ndarray
    gamma: tuple = ()

    def __post_init__(self):
        for name, shape in (("eps", (2, 2)), ("mu", (2,)), ("tun", (4, 4)), ("C", (4, 4)), ("K", (4, 4))):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not np.array_equal(self.tun, self.tun.T):
            raise ValueError("tun must be symmetric (Hermitian)")
        for a in (0, 1):
            block = self.tun[2 * a : 2 * a + 2, 2 * a : 2 * a + 2]
            if np.any(block != 0):
                raise ValueError("tun must vanish between orbitals of the same dot")
        for name in ("C", "K"):
            m = getattr(self, name)
            if not np.array_equal(m, m.T):
                raise ValueError(f"{name} must be symmetric")
        gamma = []
        for idx, val in self.gamma:
            idx = tuple(int(i) for i in idx)
            if len(idx) != 4 or not all(0 <= i < 4 for i in idx):
                raise ValueError(f"bad gamma index {idx}")
            if not math.isfinite(val):
                raise ValueError("gamma contains non-finite entries")
            n_left_out = sum(site_dot(i) == 0 for i in idx[:2])
            n_left_in = sum(site_dot(i) == 0 for i in idx[2:])
            if n_left_out != n_left_in:
                raise ValueError(f"gamma entry {idx} moves charge between dots; not supported")
            gamma.append((idx, float(val)))
        object.__setattr__(self, "gamma", tuple(gamma))
        g = self.coulomb_tensor()
        if not np.allclose(g, g.transpose(3, 2, 1, 0), rtol=0, atol=1e-14):
            raise ValueError("Coulomb tensor is not Hermitian: need G[p,q,r,s] == G[s,r,q,p]")

    @property
    def t_LR(self) -> np.ndarray:
        """2x2 block of tunneling amplitudes t[(L,i),(R,j)]."""
        return self.tun[:2, 2:]

    def equal_tunneling(self) -> float | None:
        """Common amplitude if every inter-dot orbital pair has the same t, else None."""
        block = self.t_LR
        return float(block[0, 0]) if np.all(block == block[0, 0]) else None

    def coulomb_tensor(self) -> np.ndarray:
        g = np.zeros((4, 4, 4, 4))
        for p in range(4):
            for q in range(4):
                g[p, q, q, p] = self.C[p, q]
                if p != q:
                    g[p, q, p, q] = self.K[p, q]
        for idx, val in self.gamma:
            g[idx] += val
        return g

    def replace(self, **changes) -> "HubbardParams":
        fields = {k: getattr(self, k) for k in ("eps", "mu", "tun", "C", "K", "gamma")}
        fields.update(changes)
        return HubbardParams(**fields)

    def with_tunneling(self, t: float) -> "HubbardParams":
        """Copy with every inter-dot amplitude set to ``t``."""
        tun = np.zeros((4, 4))
        tun[:2, 2:] = t
        tun[2:, :2] = t
        return self.replace(tun=tun)

    # JSON ---------------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "eps": self.eps.tolist(),
            "mu": self.mu.tolist(),
            "tun": self.tun.tolist(),
            "C": self.C.tolist(),
            "K": self.K.tolist(),
            "gamma": [
                {"index": [SITES[i] for i in idx], "value": val} for idx, val in self.gamma
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HubbardParams":
        missing = {"eps", "mu", "tun", "C", "K"} - set(d)
        if missing:
            raise ValueError(f"missing fields: {sorted(missing)}")
        gamma = []
        for k, entry in enumerate(d.get("gamma", [])):
            try:
                idx = tuple(SITE_INDEX[s] if isinstance(s, str) else int(s) for s in entry["index"])
                gamma.append((idx, float(entry["value"])))
            except (KeyError, TypeError) as exc:
                raise ValueError(f"gamma[{k}]: malformed entry ({exc})") from None
        return cls(
            eps=np.asarray(d["eps"], dtype=float),
            mu=np.asarray(d["mu"], dtype=float),
            tun=np.asarray(d["tun"], dtype=float),
            C=np.asarray(d["C"], dtype=float),
            K=np.asarray(d["K"], dtype=float),
            gamma=tuple(gamma),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "HubbardParams":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "HubbardParams":
        return cls.from_json(Path(path).read_text())


def default_params(t: float = 0.02) -> HubbardParams:
    """Illustrative parameter set (meV) with (2,1) as the ground configuration.

    Chosen so that the left-dot singlet-triplet splitting is 0.05 meV. The
    magnitudes of C, K and the detuning are not measured values.
    """
    eps = np.array([[0.0, 0.05], [0.0, 0.5]])
    mu = np.array([0.0, 0.5])
    C = np.array(
        [
            [1.0, 1.2, 0.0, 0.0],
            [1.2, 1.1, 0.0, 0.0],
            [0.0, 0.0, 1.5, 1.4],
            [0.0, 0.0, 1.4, 1.6],
        ]
    )
    K = np.zeros((4, 4))
    K[0, 1] = K[1, 0] = 0.2
    K[2, 3] = K[3, 2] = 0.1
    return HubbardParams(eps=eps, mu=mu, tun=np.zeros((4, 4)), C=C, K=K).with_tunneling(t)


@dataclass(frozen=True)
class DotSpectra:
    E_S_L: float
    E_S_R: float
    E_T_L: float
    E_T_R: float

    @property
    def E_ST_L(self) -> float:
        return self.E_T_L - self.E_S_L

    @property
    def E_ST_R(self) -> float:
        return self.E_T_R - self.E_S_R


def dot_spectra(params: HubbardParams) -> DotSpectra:
    e, mu, C, K = params.eps, params.mu, params.C, params.K
    spec = DotSpectra(
        E_S_L=2 * e[0, 0] + C[0, 0] + 2 * mu[0],
        E_S_R=2 * e[1, 0] + C[2, 2] + 2 * mu[1],
        E_T_L=e[0, 0] + e[0, 1] + C[0, 1] - K[0, 1] + 2 * mu[0],
        E_T_R=e[1, 0] + e[1, 1] + C[2, 3] - K[2, 3] + 2 * mu[1],
    )
    if spec.E_T_L < spec.E_S_L or spec.E_T_R < spec.E_S_R:
        log.warning("triplet below singlet in a dot: %s", spec)
    return spec


def _one_body_terms(params: HubbardParams) -> list[Term]:
    terms = []
    for p in range(4):
        a, i = divmod(p, 2)
        e = params.eps[a, i] + params.mu[a]
        if e:
            terms += [number(2 * p, e), number(2 * p + 1, e)]
    return terms


def _coulomb_terms(params: HubbardParams, select) -> list[Term]:
    g = params.coulomb_tensor()
    terms = []
    for p, q, r, s in zip(*np.nonzero(g)):
        if not select(p, q, r, s):
            continue
        val = 0.5 * g[p, q, r, s]
        for sg in (0, 1):
            for sg2 in (0, 1):
                a, b = 2 * p + sg, 2 * q + sg2
                c, d = 2 * r + sg2, 2 * s + sg
                if a == b or c == d:
                    continue
                terms.append(two_body(a, b, c, d, val))
    return terms


def _tunnel_terms(params: HubbardParams) -> list[Term]:
    terms = []
    for p in range(4):
        for q in range(4):
            t = params.tun[p, q]
            if t and site_dot(p) != site_dot(q):
                terms += [hop(2 * p, 2 * q, t), hop(2 * p + 1, 2 * q + 1, t)]
    return terms


def _same_dot(p, q, r, s):
    return site_dot(p) == site_dot(q) == site_dot(r) == site_dot(s)


def three_electron_basis() -> FockBasis:
    return build_basis(8, 3)


def _check_basis(basis: FockBasis):
    if basis.n_modes != 8:
        raise ValueError(f"Hubbard model needs an 8-mode basis, got {basis.n_modes}")


def split_operators(params: HubbardParams, basis: FockBasis | None = None):
    """(U0, U1, T): intra-dot energy, inter-dot Coulomb, and tunneling."""
    basis = basis or three_electron_basis()
    _check_basis(basis)
    u0 = build_operator(basis, _one_body_terms(params) + _coulomb_terms(params, _same_dot))
    u1 = build_operator(basis, _coulomb_terms(params, lambda *idx: not _same_dot(*idx)))
    t = build_operator(basis, _tunnel_terms(params))
    return u0, u1, t


def build_full_hamiltonian(params: HubbardParams, basis: FockBasis | None = None) -> ManyBodyOperator:
    basis = basis or three_electron_basis()
    _check_basis(basis)
    terms = _one_body_terms(params) + _coulomb_terms(params, lambda *idx: True) + _tunnel_terms(params)
    return build_operator(basis, terms)
