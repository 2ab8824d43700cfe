"""Hybrid double-dot spin qubit: effective Hamiltonian, dynamics and
exchange-gate search."""

from .hubbard import HubbardParams, default_params
from .schrieffer_wolff import (
    EffectiveQubit,
    effective_couplings,
    effective_hamiltonian_analytic,
    effective_hamiltonian_numeric,
)

__version__ = "0.1.0"

__all__ = [
    "EffectiveQubit",
    "HubbardParams",
    "default_params",
    "effective_couplings",
    "effective_hamiltonian_analytic",
    "effective_hamiltonian_numeric",
]
