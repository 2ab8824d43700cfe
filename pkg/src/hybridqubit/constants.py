"""Physical constants and unit conversions.

All model energies are in meV. Every conversion between energy, frequency
and time goes through this module.
"""

import math

#: Planck constant in meV*s (CODATA 2018, exact).
PLANCK_MEV_S = 4.135667696e-12
#: Reduced Planck constant in meV*s.
HBAR_MEV_S = PLANCK_MEV_S / (2.0 * math.pi)


def mev_to_hz(energy_mev):
    return energy_mev / PLANCK_MEV_S


def mev_to_ghz(energy_mev):
    return mev_to_hz(energy_mev) * 1e-9


def ghz_to_mev(freq_ghz):
    return freq_ghz * 1e9 * PLANCK_MEV_S


def mev_to_angular(energy_mev):
    """Angular frequency (rad/s) of an energy splitting, E / hbar."""
    return energy_mev / HBAR_MEV_S
