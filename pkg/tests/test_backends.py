import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from padic_hl.kernels import HAS_NUMBA, draw_limit, get_backend, init_states

ROOT = Path(__file__).resolve().parents[1]


def test_env_flag_selects_backend():
    code = "from padic_hl.kernels import BACKEND; print(BACKEND)"
    for name in ["numpy"] + (["numba"] if HAS_NUMBA else []):
        env = {**os.environ, "PADIC_HL_BACKEND": name}
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        assert res.stdout.strip() == name


def test_unknown_backend_is_rejected():
    with pytest.raises(ValueError):
        get_backend("fortran")


@pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("m", [3, 9, 27, 3**8, 8])
def test_draws_match_across_backends(m):
    a, b = init_states(4, 100, 500), init_states(4, 100, 500)
    x = get_backend("numpy").draw(a, m, draw_limit(m), 7)
    y = get_backend("numba").draw(b, m, draw_limit(m), 7)
    assert np.array_equal(x, y) and np.array_equal(a, b)
    assert x.min() >= 0 and x.max() < m


def test_benchmark_runs():
    res = subprocess.run(
        [sys.executable, str(ROOT / "benchmarks" / "bench_kernels.py"), "--batch", "200", "--repeat", "1"],
        capture_output=True,
        text=True,
        timeout=600,
    )
    assert res.returncode == 0, res.stderr
    assert "haar her n=2" in res.stdout
    if HAS_NUMBA:
        assert "backends draw identical matrices: True" in res.stdout
