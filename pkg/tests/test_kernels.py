import os
import subprocess
import sys

import numpy as np
import pytest

from pdet import _kernels as k
from pdet.diffop import bundled_operator
from pdet.monodromy import operator_polys


@pytest.mark.parametrize("seed", range(5))
def test_bareiss_backends_agree(seed):
    rng = np.random.default_rng(seed)
    p = 11
    n = 6
    M = np.zeros((n, n, 2 * n * 3 + 2), dtype=np.int64)
    M[:, :, :3] = rng.integers(0, p, size=(n, n, 3))
    a = k._bareiss_modp_nb(M, np.int64(p))
    b = k._bareiss_modp_np(M, p)
    assert np.array_equal(a % p, b % p)


def test_holonomy_backends_agree():
    C = np.ascontiguousarray(operator_polys(bundled_operator("intro"), 0.01), dtype=np.complex128)
    a = k._holonomy_nb(C, 0.5, 512)
    b = k._holonomy_np(C, 0.5, 512)
    assert np.allclose(a, b, atol=1e-10)


def test_empty_matrix_determinant():
    assert k.bareiss_modp(np.zeros((0, 0, 1), dtype=np.int64), 5)[0] == 1


def test_env_flag_selects_numpy():
    code = "from pdet import _kernels as k; print(k.backend())"
    env = dict(os.environ, PDET_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "numpy"
    env["PDET_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "numba"


def test_numpy_backend_end_to_end():
    code = ("from pdet.diffop import bundled_operator, detp;"
            "print(detp(bundled_operator('intro'), 7).residues())")
    env = dict(os.environ, PDET_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "[0, 0, 2, 5, 5, 2]"
