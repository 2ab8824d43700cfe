"""Random parameter sets for the perturbative regime."""

import numpy as np

from hybridqubit.hubbard import default_params, dot_spectra

T_OVER_DELTA = (0.02, 0.05, 0.1)


def regime_params(rng):
    """Perturb the default set, then pin the left singlet-triplet splitting
    to a random value in [0.03, 0.08] meV so (2,1) stays a doublet pair
    below the charge-excited states."""
    p = default_params(0.0)
    C = p.C * rng.uniform(0.9, 1.1, (4, 4))
    C[:2, :2] = p.C[:2, :2] * rng.uniform(0.9, 1.1)  # common factor keeps the left splitting small
    C = (C + C.T) / 2
    K = p.K * rng.uniform(0.8, 1.2)
    eps = p.eps.copy()
    eps[1, 1] = rng.uniform(0.3, 0.7)
    mu = p.mu.copy()
    mu[1] = rng.uniform(0.3, 0.7)
    q = p.replace(eps=eps, mu=mu, C=C, K=K)
    eps[0, 1] += rng.uniform(0.03, 0.08) - dot_spectra(q).E_ST_L
    return q.replace(eps=eps)
