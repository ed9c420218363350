import os
import subprocess
import sys

import numpy as np
import pytest

from jscc_exponents import _core_py, kernels

compiled = pytest.importorskip("jscc_exponents._core")


def test_arimoto_backends_agree(rng):
    for _ in range(5):
        W = rng.dirichlet(np.ones(4), size=3)
        rhos = np.linspace(0.1, 3.0, 12)
        p0 = np.full(3, 1 / 3)
        a = compiled.arimoto_sweep(rhos, W, p0, 1e-12, 500)
        b = _core_py.arimoto_sweep(rhos, W, p0, 1e-12, 500)
        np.testing.assert_allclose(a[0], b[0], atol=1e-13)
        np.testing.assert_allclose(a[1], b[1], atol=1e-10)
        np.testing.assert_array_equal(a[3], b[3])


def test_blahut_backends_agree(rng):
    W = rng.dirichlet(np.ones(3), size=4)
    p0 = np.full(4, 0.25)
    a = compiled.blahut_arimoto(W, p0, 1e-12, 100000)
    b = _core_py.blahut_arimoto(W, p0, 1e-12, 100000)
    assert a[0] == pytest.approx(b[0], abs=1e-13)
    assert a[2] <= 1e-12 and b[2] <= 1e-12


def test_simplex_grid_backends_agree(rng):
    A = rng.uniform(0, 1, size=(3, 3))
    M = A + A.T
    a = compiled.simplex_grid_min(M, 40)
    b = _core_py.simplex_grid_min(M, 40)
    assert a[0] == pytest.approx(b[0], abs=1e-14)
    # brute force over the same lattice
    best = min(np.array([i, j, 40 - i - j]) @ M @ np.array([i, j, 40 - i - j])
               for i in range(41) for j in range(41 - i)) / 1600
    assert a[0] == pytest.approx(best, abs=1e-14)


def test_use_backend_switches_and_restores():
    prev = kernels.use_backend("python")
    try:
        assert kernels.BACKEND == "python"
        assert kernels.arimoto_sweep is _core_py.arimoto_sweep
    finally:
        kernels.use_backend(prev)
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


def test_env_var_forces_fallback():
    env = dict(os.environ, JSCC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import jscc_exponents as j; print(j.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
