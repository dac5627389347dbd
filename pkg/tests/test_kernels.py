"""Hot kernels: the jit build must agree with the numpy reference build."""

import os
import subprocess
import sys

import numpy as np
import pytest

from ultrabeta import kernels


def random_inputs(rng, n=64, ja=3, jp=4):
    lower = rng.uniform(-5, 5, size=(n, ja))
    upper = lower.max(axis=1, keepdims=True) + rng.uniform(0.5, 3.0, size=(n, jp))
    coef = rng.uniform(-2, 2, size=ja)
    return lower, upper, coef


class TestPairLogAbsSum:
    def test_matches_numpy_reference(self):
        rng = np.random.default_rng(0)
        lower, upper, coef = random_inputs(rng)
        got = kernels.pair_log_abs_sum(lower, upper, coef)
        ref = kernels.numpy_pair_log_abs_sum(lower, upper, coef)
        assert np.allclose(got, ref, rtol=1e-13, atol=1e-13)

    def test_single_pair(self):
        got = kernels.pair_log_abs_sum(
            np.array([[1.0]]), np.array([[3.0]]), np.array([2.0])
        )
        assert got[0] == pytest.approx(2 * np.log(2.0))


class TestVandermondeLogSum:
    def test_matches_numpy_reference(self):
        rng = np.random.default_rng(1)
        rows = np.sort(rng.uniform(-5, 5, size=(64, 5)), axis=1)
        coef = rng.uniform(-2, 2, size=(5, 5))
        got = kernels.vandermonde_log_sum(rows, coef)
        ref = kernels.numpy_vandermonde_log_sum(rows, coef)
        assert np.allclose(got, ref, rtol=1e-13, atol=1e-13)

    def test_two_points(self):
        coef = np.array([[0.0, 3.0], [0.0, 0.0]])
        got = kernels.vandermonde_log_sum(np.array([[0.0, 2.0]]), coef)
        assert got[0] == pytest.approx(3 * np.log(2.0))


def test_no_numba_env_flag_selects_numpy_build():
    env = dict(os.environ, ULTRABETA_NO_NUMBA="1")
    code = (
        "from ultrabeta import kernels\n"
        "assert not kernels.USE_NUMBA\n"
        "assert kernels.pair_log_abs_sum is not None\n"
        "import numpy as np\n"
        "out = kernels.pair_log_abs_sum(np.array([[1.0]]), np.array([[3.0]]), np.array([2.0]))\n"
        "assert abs(out[0] - 2 * np.log(2.0)) < 1e-13\n"
    )
    subprocess.run([sys.executable, "-c", code], env=env, check=True)


def test_integrand_identical_across_builds():
    # same triangle density through both kernel builds, via a subprocess
    env = dict(os.environ, ULTRABETA_NO_NUMBA="1")
    code = (
        "from ultrabeta.integrands import Family, UltraBetaParams, log_ultra_integrand\n"
        "from ultrabeta.patterns import RayleighTriangle\n"
        "p = UltraBetaParams(Family.BETA_PRIME, 2, sigma=(1.5, 2.0), tau=(4.0, 5.5), theta=((0.7,),))\n"
        "tri = RayleighTriangle([[1.0], [0.25, 3.0]])\n"
        "print(repr(complex(log_ultra_integrand(p, tri))))\n"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, check=True, capture_output=True, text=True
    ).stdout.strip()
    from ultrabeta.integrands import Family, UltraBetaParams, log_ultra_integrand
    from ultrabeta.patterns import RayleighTriangle

    p = UltraBetaParams(Family.BETA_PRIME, 2, sigma=(1.5, 2.0), tau=(4.0, 5.5), theta=((0.7,),))
    tri = RayleighTriangle([[1.0], [0.25, 3.0]])
    here = complex(log_ultra_integrand(p, tri))
    assert abs(complex(eval(out)) - here) < 1e-12
