"""Hot inner loops, compiled with numba when available.

Set ``HYBRIDQUBIT_NO_NUMBA=1`` to force the pure-numpy implementations.
Both paths implement the same arithmetic and are checked against each other
in the test suite; ``benchmarks/bench_kernels.py`` times them.

Exchange pulses use S_i.S_j = SWAP_ij / 2 - 1/4, so up to the global phase
exp(i pi tau / 2)

    exp(-2 pi i tau S_i.S_j) ~ cos(pi tau) 1 - i sin(pi tau) SWAP_ij

and SWAP_ij is a permutation of the computational basis. Sequences are
therefore evaluated as a chain of "mix with the permuted rows" updates.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("HYBRIDQUBIT_NO_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# pulse sequences


def evolve_columns_numpy(cols, perms, taus):
    """Apply a pulse sequence to a batch of column sets.

    cols: (D, k) complex, perms: (L, D) int, taus: (P, L) float.
    Returns (P, D, k).
    """
    taus = np.atleast_2d(taus)
    out = np.broadcast_to(cols, (taus.shape[0],) + cols.shape).astype(complex)
    for l in range(perms.shape[0]):
        c = np.cos(np.pi * taus[:, l])[:, None, None]
        s = np.sin(np.pi * taus[:, l])[:, None, None]
        out = c * out - 1j * s * out[:, perms[l], :]
    return out


def _evolve_columns_loop(cols, perms, taus):
    n_pop, n_pulse = taus.shape
    dim, k = cols.shape
    out = np.empty((n_pop, dim, k), dtype=np.complex128)
    buf = np.empty((dim, k), dtype=np.complex128)
    cur = np.empty((dim, k), dtype=np.complex128)
    for p in range(n_pop):
        for i in range(dim):
            for j in range(k):
                cur[i, j] = cols[i, j]
        for l in range(n_pulse):
            c = np.cos(np.pi * taus[p, l])
            s = np.sin(np.pi * taus[p, l])
            for i in range(dim):
                src = perms[l, i]
                for j in range(k):
                    buf[i, j] = c * cur[i, j] - 1j * s * cur[src, j]
            for i in range(dim):
                for j in range(k):
                    cur[i, j] = buf[i, j]
        for i in range(dim):
            for j in range(k):
                out[p, i, j] = cur[i, j]
    return out


# --------------------------------------------------------------------------
# two-level propagation


def _step_unitary(h00, h11, h01, dt_over_hbar):
    """exp(-i H dt / hbar) for H = [[h00, h01], [conj(h01), h11]] via Pauli form."""
    h0 = 0.5 * (h00 + h11)
    hz = 0.5 * (h00 - h11)
    hx = h01.real
    hy = -h01.imag
    norm = np.sqrt(hx * hx + hy * hy + hz * hz)
    phase = np.exp(-1j * h0 * dt_over_hbar)
    c = np.cos(norm * dt_over_hbar)
    if norm > 0.0:
        s = np.sin(norm * dt_over_hbar) / norm
    else:
        s = dt_over_hbar
    u00 = phase * (c - 1j * s * hz)
    u11 = phase * (c + 1j * s * hz)
    u01 = phase * (-1j * s * (hx - 1j * hy))
    u10 = phase * (-1j * s * (hx + 1j * hy))
    return u00, u01, u10, u11


def _propagate_loop(h_static, h_mod, amplitude, omega, dt, n_steps, square, hbar, psi0):
    """Piecewise-constant propagation, modulation sampled at step midpoints.

    Returns the state after every step, shape (n_steps + 1, 2).
    """
    states = np.empty((n_steps + 1, 2), dtype=np.complex128)
    a = psi0[0]
    b = psi0[1]
    states[0, 0] = a
    states[0, 1] = b
    x = dt / hbar
    for n in range(n_steps):
        tm = (n + 0.5) * dt
        f = np.cos(omega * tm)
        if square:
            f = 1.0 if f >= 0.0 else -1.0
        h00 = h_static[0, 0] + amplitude * f * h_mod[0, 0]
        h11 = h_static[1, 1] + amplitude * f * h_mod[1, 1]
        h01 = h_static[0, 1] + amplitude * f * h_mod[0, 1]
        u00, u01, u10, u11 = _step_unitary(h00.real, h11.real, h01, x)
        na = u00 * a + u01 * b
        nb = u10 * a + u11 * b
        a = na
        b = nb
        states[n + 1, 0] = a
        states[n + 1, 1] = b
    return states


def propagate_numpy(h_static, h_mod, amplitude, omega, dt, n_steps, square, hbar, psi0):
    tm = (np.arange(n_steps) + 0.5) * dt
    f = np.cos(omega * tm)
    if square:
        f = np.where(f >= 0.0, 1.0, -1.0)
    h00 = (h_static[0, 0] + amplitude * f * h_mod[0, 0]).real
    h11 = (h_static[1, 1] + amplitude * f * h_mod[1, 1]).real
    h01 = h_static[0, 1] + amplitude * f * h_mod[0, 1]
    x = dt / hbar
    h0 = 0.5 * (h00 + h11)
    hz = 0.5 * (h00 - h11)
    hx, hy = h01.real, -h01.imag
    norm = np.sqrt(hx**2 + hy**2 + hz**2)
    phase = np.exp(-1j * h0 * x)
    c = np.cos(norm * x)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(norm > 0, np.sin(norm * x) / np.where(norm > 0, norm, 1.0), x)
    u = np.empty((n_steps, 2, 2), dtype=complex)
    u[:, 0, 0] = phase * (c - 1j * s * hz)
    u[:, 1, 1] = phase * (c + 1j * s * hz)
    u[:, 0, 1] = phase * (-1j * s * (hx - 1j * hy))
    u[:, 1, 0] = phase * (-1j * s * (hx + 1j * hy))
    states = np.empty((n_steps + 1, 2), dtype=complex)
    states[0] = psi0
    psi = np.asarray(psi0, dtype=complex)
    for n in range(n_steps):
        psi = u[n] @ psi
        states[n + 1] = psi
    return states


if HAVE_NUMBA:
    _step_unitary = njit(cache=True)(_step_unitary)
    evolve_columns = njit(cache=True)(_evolve_columns_loop)
    _propagate_jit = njit(cache=True)(_propagate_loop)

    def propagate(h_static, h_mod, amplitude, omega, dt, n_steps, square, hbar, psi0):
        return _propagate_jit(
            np.ascontiguousarray(h_static, dtype=np.complex128),
            np.ascontiguousarray(h_mod, dtype=np.complex128),
            float(amplitude),
            float(omega),
            float(dt),
            int(n_steps),
            bool(square),
            float(hbar),
            np.ascontiguousarray(psi0, dtype=np.complex128),
        )

    _evolve_jit = evolve_columns

    def evolve_columns(cols, perms, taus):  # noqa: F811
        return _evolve_jit(
            np.ascontiguousarray(cols, dtype=np.complex128),
            np.ascontiguousarray(perms, dtype=np.int64),
            np.ascontiguousarray(np.atleast_2d(taus), dtype=np.float64),
        )

else:
    evolve_columns = evolve_columns_numpy
    propagate = propagate_numpy
