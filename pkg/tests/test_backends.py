"""Compiled vs pure-numpy memory-convolution backends."""

import numpy as np
import pytest

from fracsteer.backend import (BACKEND_NAME, HAVE_COMPILED, _convolve_numpy,
                               memory_convolve)
from fracsteer.errors import GridMismatchError
from fracsteer.fractional import convolution_kernel


def _random_case(n=64, modes=8, seed=0):
    rng = np.random.default_rng(seed)
    kern = convolution_kernel(0.5, n, 1.0 / n)
    efac = rng.random((n + 1, modes))
    g = rng.standard_normal((n + 1, modes))
    return kern, efac, g


def test_backend_name_consistent():
    assert BACKEND_NAME in ("compiled", "numpy")
    assert (BACKEND_NAME == "compiled") == HAVE_COMPILED


def test_dispatch_matches_numpy_reference():
    kern, efac, g = _random_case()
    got = memory_convolve(kern.first_node, kern.lag, kern.last_node, efac, g)
    ref = _convolve_numpy(kern.first_node, kern.lag, kern.last_node, efac, g)
    assert np.allclose(got, ref, rtol=1e-13, atol=1e-14)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled extension unavailable")
def test_compiled_matches_numpy_across_sizes():
    from fracsteer import _memcore
    for n, modes, seed in ((16, 1, 1), (64, 8, 2), (256, 32, 3)):
        kern, efac, g = _random_case(n, modes, seed)
        call = (kern.first_node, kern.lag, kern.last_node, efac, g)
        assert np.allclose(_memcore.memory_convolve(*call),
                           _convolve_numpy(*call), rtol=1e-13, atol=1e-14)


def test_shape_validation():
    kern, efac, g = _random_case()
    with pytest.raises(GridMismatchError):
        memory_convolve(kern.first_node, kern.lag, kern.last_node,
                        efac[:-1], g)
    with pytest.raises(GridMismatchError):
        memory_convolve(kern.first_node, kern.lag, kern.last_node,
                        efac, g[:, 0])
    with pytest.raises(GridMismatchError):
        memory_convolve(kern.first_node[:-1], kern.lag, kern.last_node,
                        efac, g)


def test_pure_python_env_override():
    import os
    import subprocess
    import sys
    code = ("from fracsteer.backend import BACKEND_NAME; "
            "print(BACKEND_NAME)")
    env = dict(os.environ, FRACSTEER_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
