"""Independent reference implementations used only by the tests.

Nothing here imports the package's operator builders: the Hubbard oracle
uses Jordan-Wigner matrices on the full 256-dimensional Fock space, the
spin oracle uses Kronecker products of Pauli matrices, and the invariant
oracle works in the computational basis with sigma_y x sigma_y.
"""

from functools import reduce
from itertools import combinations

import numpy as np

I2 = np.eye(2)
Z2 = np.diag([1.0, -1.0])
LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1| with 1 = occupied
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


def jw_annihilators(n_modes):
    """Jordan-Wigner c_k on n_modes; mode 0 is the leftmost tensor factor."""
    ops = []
    for k in range(n_modes):
        factors = [Z2] * k + [LOWER] + [I2] * (n_modes - k - 1)
        ops.append(reduce(np.kron, factors))
    return ops


def jw_hubbard(eps, mu, tun, G):
    """Hubbard Hamiltonian on 8 modes (site p -> modes 2p up, 2p+1 down)."""
    c = jw_annihilators(8)
    cd = [x.T for x in c]
    dim = 256
    H = np.zeros((dim, dim))
    for p in range(4):
        a, i = divmod(p, 2)
        for s in (0, 1):
            k = 2 * p + s
            H += (eps[a][i] + mu[a]) * cd[k] @ c[k]
    for p in range(4):
        for q in range(4):
            if tun[p][q] and p // 2 != q // 2:
                for s in (0, 1):
                    H += tun[p][q] * cd[2 * p + s] @ c[2 * q + s]
    for p in range(4):
        for q in range(4):
            for r in range(4):
                for t in range(4):
                    g = G[p, q, r, t]
                    if g == 0:
                        continue
                    for s in (0, 1):
                        for s2 in (0, 1):
                            H += 0.5 * g * cd[2 * p + s] @ cd[2 * q + s2] @ c[2 * r + s2] @ c[2 * t + s]
    return H


def number_sector(H, n_modes, n):
    """Restrict H to fixed particle number; mode 0 is the most significant bit."""
    idx = [b for b in range(1 << n_modes) if bin(b).count("1") == n]
    return H[np.ix_(idx, idx)]


def pauli_on(op, site, n):
    return reduce(np.kron, [op if k == site else I2 for k in range(n)])


def kron_heisenberg(i, j, n):
    return sum(pauli_on(s, i, n) @ pauli_on(s, j, n) for s in (SX, SY, SZ)) / 4


def kron_total_spin(n):
    sx = sum(pauli_on(SX, k, n) for k in range(n)) / 2
    sy = sum(pauli_on(SY, k, n) for k in range(n)) / 2
    sz = sum(pauli_on(SZ, k, n) for k in range(n)) / 2
    return sz, sx @ sx + sy @ sy + sz @ sz


def brute_invariants(u):
    s = np.kron(SY, SY)
    m = u.T @ s @ u @ s
    d = np.linalg.det(u)
    tr = np.trace(m)
    return tr * tr / (16 * d), (tr * tr - np.trace(m @ m)) / (4 * d)


def power_iteration_ground(h, iters=20000, tol=1e-13, seed=0):
    """Lowest eigenvalue of a Hermitian h by power iteration on (shift - h)."""
    shift = np.sum(np.abs(h), axis=1).max()
    a = shift * np.eye(len(h)) - h
    v = np.random.default_rng(seed).standard_normal(len(h))
    lam = 0.0
    for _ in range(iters):
        w = a @ v
        new = np.linalg.norm(w)
        v = w / new
        if abs(new - lam) < tol * new:
            break
        lam = new
    return float(v @ h @ v)


def clebsch_gordan_counts(n):
    """Multiplicity of each total S (as 2S) for n spin-1/2 particles."""
    counts = {1: 1}
    for _ in range(n - 1):
        new = {}
        for ts, m in counts.items():
            for nt in (ts - 1, ts + 1):
                if nt >= 0:
                    new[nt] = new.get(nt, 0) + m
        counts = new
    return counts


def explicit_slater_sign(occupied, k):
    """Sign of c^dag_k acting on the ordered product c^dag_{o1} c^dag_{o2} ...
    obtained by sorting the new list into ascending order."""
    lst = [k] + sorted(occupied)
    sign = 1
    for a, b in combinations(range(len(lst)), 2):
        if lst[a] > lst[b]:
            sign = -sign
    return sign
