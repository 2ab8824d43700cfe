"""Driven dynamics of the two-level hybrid qubit."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from . import kernels
from .constants import HBAR_MEV_S, PLANCK_MEV_S, mev_to_ghz
from .schrieffer_wolff import EffectiveQubit

#: Minimum samples per period of the fastest energy scale.
MIN_STEPS_PER_PERIOD = 50
DEFAULT_STEPS_PER_PERIOD = 200

SQRT_3_2 = math.sqrt(1.5)


class TimestepTooCoarseError(ValueError):
    pass


class ModulatedTerm(enum.Enum):
    OFF_DIAGONAL = "off-diagonal"
    DETUNING = "detuning"


def modulation_matrix(term: ModulatedTerm) -> np.ndarray:
    """Operator multiplied by ``amplitude * f(t)``.

    Off-diagonal driving modulates J' and so enters as sqrt(3/2) sigma_x;
    detuning driving shifts the |1>_L energy.
    """
    if term is ModulatedTerm.OFF_DIAGONAL:
        return np.array([[0.0, SQRT_3_2], [SQRT_3_2, 0.0]], dtype=complex)
    return np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


def _as_h2(base) -> np.ndarray:
    h = base.H2 if isinstance(base, EffectiveQubit) else base
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2) or not np.allclose(h, h.conj().T, atol=1e-15):
        raise ValueError("base Hamiltonian must be a Hermitian 2x2 matrix")
    return h


def energy_gap(h2) -> float:
    w = np.linalg.eigvalsh(_as_h2(h2))
    return float(w[1] - w[0])


def resonance_frequency(q) -> float:
    """Qubit transition frequency (E+ - E-) / h in GHz."""
    return mev_to_ghz(energy_gap(q))


def fastest_scale(h2, angular_frequency, amplitude=0.0) -> float:
    """Largest energy scale (meV) the integrator must resolve."""
    return max(energy_gap(h2), HBAR_MEV_S * abs(angular_frequency), abs(amplitude) * SQRT_3_2, 1e-300)


def max_timestep(h2, angular_frequency) -> float:
    """period / 50 of max(gap, hbar * omega)."""
    return PLANCK_MEV_S / fastest_scale(h2, angular_frequency) / MIN_STEPS_PER_PERIOD


def default_timestep(h2, amplitude=0.0, angular_frequency=0.0) -> float:
    """period / 200, with the drive strength counted as a scale too."""
    period = PLANCK_MEV_S / fastest_scale(h2, angular_frequency, amplitude)
    return period / DEFAULT_STEPS_PER_PERIOD


@dataclass(frozen=True, eq=False)
class DriveSpec:
    base: object
    modulated_term: ModulatedTerm = ModulatedTerm.OFF_DIAGONAL
    amplitude: float = 0.0
    angular_frequency: float = 0.0
    duration: float = 1e-9
    timestep: float | None = None
    square: bool = False

    def __post_init__(self):
        if isinstance(self.modulated_term, str):
            object.__setattr__(self, "modulated_term", ModulatedTerm(self.modulated_term))
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        h2 = _as_h2(self.base)
        if self.timestep is None:
            object.__setattr__(self, "timestep", default_timestep(h2, self.amplitude, self.angular_frequency))
        limit = max_timestep(h2, self.angular_frequency)
        if not 0 < self.timestep <= limit * (1 + 1e-12):
            raise TimestepTooCoarseError(
                f"timestep {self.timestep:.3e} s exceeds period/{MIN_STEPS_PER_PERIOD} = {limit:.3e} s"
            )

    @property
    def h2(self) -> np.ndarray:
        return _as_h2(self.base)

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.duration / self.timestep)))


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    times: np.ndarray
    populations: np.ndarray
    norm: np.ndarray

    @property
    def p0(self):
        return self.populations[:, 0]

    @property
    def p1(self):
        return self.populations[:, 1]


def propagate(drive: DriveSpec, initial=(1.0, 0.0)) -> EvolutionTrace:
    """Evolve ``initial`` with exact 2x2 exponentials per step."""
    psi0 = np.asarray(initial, dtype=complex)
    if psi0.shape != (2,) or abs(np.vdot(psi0, psi0) - 1) > 1e-12:
        raise ValueError("initial state must be a normalized 2-vector")
    n = drive.n_steps
    dt = drive.duration / n
    states = kernels.propagate(
        drive.h2,
        modulation_matrix(drive.modulated_term),
        drive.amplitude,
        drive.angular_frequency,
        dt,
        n,
        drive.square,
        HBAR_MEV_S,
        psi0,
    )
    pops = np.abs(states) ** 2
    norm = pops.sum(axis=1)
    return EvolutionTrace(np.arange(n + 1) * dt, pops / norm[:, None], norm)


def rwa_rabi_rate(amplitude) -> float:
    """Rate r (rad/s) with p1 = sin^2(r t) for resonant off-diagonal driving."""
    return SQRT_3_2 * abs(amplitude) / (2 * HBAR_MEV_S)


def resonant_drive(q, amplitude, duration, **kw) -> DriveSpec:
    h2 = _as_h2(q)
    omega = energy_gap(h2) / HBAR_MEV_S
    return DriveSpec(h2, ModulatedTerm.OFF_DIAGONAL, amplitude, omega, duration, **kw)


def eigenbasis_drive(q) -> np.ndarray:
    """H2 rotated into its own eigenbasis (lower level first)."""
    h = _as_h2(q)
    _, v = np.linalg.eigh(h)
    return v.conj().T @ h @ v


def fit_rabi_rate(trace: EvolutionTrace) -> float:
    """Fit p1(t) = a sin^2(r t) + c and return r in rad/s."""
    t = trace.times
    p1 = trace.p1
    spec = np.abs(np.fft.rfft(p1 - p1.mean()))
    freqs = np.fft.rfftfreq(len(t), t[1] - t[0])
    f0 = freqs[1 + np.argmax(spec[1:])]
    r0 = math.pi * f0

    def model(tt, a, r, c):
        return a * np.sin(r * tt) ** 2 + c

    popt, _ = curve_fit(model, t, p1, p0=(p1.max() - p1.min(), r0, p1.min()), maxfev=20000)
    return abs(float(popt[1]))


def contrast_sweep(q, amplitude, angular_frequencies, duration, **kw) -> np.ndarray:
    """Maximum excited-state population over ``duration`` for each drive frequency."""
    h = eigenbasis_drive(q)
    out = []
    for w in angular_frequencies:
        d = DriveSpec(h, ModulatedTerm.OFF_DIAGONAL, amplitude, w, duration, **kw)
        out.append(propagate(d).p1.max())
    return np.array(out)
