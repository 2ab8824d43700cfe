import os
import subprocess
import sys

import numpy as np
import pytest

from hybridqubit import kernels
from hybridqubit.encoded import sz_block


def random_case(rng, n_pulse=7, n_pop=5):
    space = sz_block(6, -2)
    pairs = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (1, 4)]
    perms = np.array([space.swap_permutation(*pairs[k]) for k in rng.integers(0, len(pairs), n_pulse)])
    cols = rng.standard_normal((space.dim, 4)) + 1j * rng.standard_normal((space.dim, 4))
    return cols, perms, rng.random((n_pop, n_pulse))


def test_python_loop_matches_vectorized():
    cols, perms, taus = random_case(np.random.default_rng(0))
    ref = kernels.evolve_columns_numpy(cols, perms, taus)
    assert np.allclose(kernels._evolve_columns_loop(cols, perms, taus), ref, atol=1e-13)


def test_dispatch_matches_numpy():
    cols, perms, taus = random_case(np.random.default_rng(1), n_pulse=20, n_pop=9)
    assert np.allclose(kernels.evolve_columns(cols, perms, taus), kernels.evolve_columns_numpy(cols, perms, taus), atol=1e-12)


def test_evolution_preserves_norm():
    cols, perms, taus = random_case(np.random.default_rng(2))
    out = kernels.evolve_columns(cols, perms, taus)
    assert np.allclose(np.linalg.norm(out, axis=1), np.linalg.norm(cols, axis=0)[None, :])


@pytest.mark.parametrize("square", [False, True])
def test_propagators_agree(square):
    h = np.array([[0.0, 0.01 + 0.002j], [0.01 - 0.002j, 0.05]])
    m = np.array([[0.0, 1.2], [1.2, 0.0]], dtype=complex)
    args = (h, m, 0.003, 7e10, 2e-13, 400, square, 6.582e-13, np.array([1.0, 0.0], dtype=complex))
    a = kernels.propagate(*args)
    b = kernels.propagate_numpy(*args)
    c = kernels._propagate_loop(*args)
    assert np.allclose(a, b, atol=1e-12) and np.allclose(b, c, atol=1e-12)


def test_env_flag_selects_numpy():
    env = dict(os.environ, HYBRIDQUBIT_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from hybridqubit import kernels; print(kernels.backend())"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
