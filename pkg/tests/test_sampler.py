"""Exact chain samplers: marginals, interlacing, density consistency."""

import math

import numpy as np
import pytest
from scipy import stats

from ultrabeta.errors import DivergentError, DomainError
from ultrabeta.integrands import Family, log_ultra_integrand_batch
from ultrabeta.montecarlo import two_sample_compare
from ultrabeta.patterns import validate
from ultrabeta.sampler import (
    CHAIN_FAMILIES,
    ChainSpec,
    extend_row,
    log_chain_density,
    log_chain_density_rows,
    pearson4_acceptance_rate,
    sample_first_row,
    sample_many,
    sample_rows,
    sample_triangle,
)

N = 40_000


def chain(family, n):
    theta = tuple(tuple(0.8 for _ in range(j)) for j in range(1, n))
    if family is Family.GAUSS_CHAIN:
        return ChainSpec(family, n, theta=theta, psi=(1.0,) * n)
    if family is Family.GAMMA_CHAIN:
        return ChainSpec(family, n, sigma=tuple(2.0 + j for j in range(n)),
                         theta=theta, psi=(1.0,) * n)
    if family is Family.BETA_PRIME:
        sigma = tuple(2.0 + j for j in range(n))
        tau = tuple(s + 4.0 + 0.8 * j for j, s in enumerate(sigma))
        return ChainSpec(family, n, sigma=sigma, tau=tau, theta=theta)
    sigma = tuple(2.0 + 0.4j + j for j in range(n))
    return ChainSpec(Family.CAYLEY, n, sigma=sigma, theta=theta)


class TestSpecValidation:
    def test_divergent_beta_prime(self):
        with pytest.raises(DivergentError):
            ChainSpec(Family.BETA_PRIME, 1, sigma=(1.0,), tau=(0.5,))

    def test_cayley_needs_conjugate_tau(self):
        with pytest.raises(DomainError):
            ChainSpec(Family.CAYLEY, 1, sigma=(2 + 1j,), tau=(2 + 1j,))

    def test_no_sampler_for_interval(self):
        with pytest.raises(DomainError):
            ChainSpec(Family.INTERVAL_BETA, 1, sigma=(1.0,), tau=(1.0,))

    def test_truncate(self):
        spec = chain(Family.BETA_PRIME, 3)
        assert spec.truncate(2).n == 2
        assert spec.truncate(2).sigma == spec.sigma[:2]


class TestFirstRow:
    def test_cauchy_median(self):
        spec = ChainSpec(Family.CAYLEY, 1, sigma=(1.0,))
        x = sample_rows(spec, N, seed=0)[0].ravel()
        assert abs(np.median(x)) < 3 * (math.pi / 2) / math.sqrt(N)
        p = stats.kstest(x, stats.cauchy.cdf).pvalue
        assert p > 1e-3

    def test_gauss_variance(self):
        spec = ChainSpec(Family.GAUSS_CHAIN, 1, psi=(4.0,))
        x = sample_rows(spec, N, seed=1)[0].ravel()
        assert np.var(x) == pytest.approx(0.25, rel=0.05)
        assert stats.kstest(x, stats.norm(scale=0.5).cdf).pvalue > 1e-3

    def test_beta_prime_law(self):
        spec = ChainSpec(Family.BETA_PRIME, 1, sigma=(1.0,), tau=(3.0,))
        x = sample_rows(spec, N, seed=2)[0].ravel()
        se = np.std(x) / math.sqrt(N)
        assert abs(np.mean(x) - 1.0) < 3 * se  # mean = sigma/(tau-sigma-1)
        assert stats.kstest(x, stats.betaprime(1.0, 2.0).cdf).pvalue > 1e-3

    def test_gamma_first_row(self):
        spec = ChainSpec(Family.GAMMA_CHAIN, 1, sigma=(2.5,), psi=(1.5,))
        x = sample_rows(spec, N, seed=3)[0].ravel()
        assert stats.kstest(x, stats.gamma(2.5, scale=1 / 1.5).cdf).pvalue > 1e-3

    def test_scalar_api(self):
        assert isinstance(sample_first_row(chain(Family.GAUSS_CHAIN, 2), seed=0), float)


class TestExtendRow:
    def test_gauss_arrowhead_structure(self):
        spec = ChainSpec(Family.GAUSS_CHAIN, 2, theta=((1.0,),), psi=(1.0, 1.0))
        out = extend_row(spec, [0.0], seed=5)
        assert out.shape == (2,)
        assert out[0] < 0.0 < out[1]

    def test_always_interlaces(self):
        rng = np.random.default_rng(6)
        for family in CHAIN_FAMILIES:
            spec = chain(family, 4)
            rows = sample_rows(spec, 200, seed=rng.integers(2**32))
            for j in range(3):
                lo, hi = rows[j], rows[j + 1]
                assert np.all(hi[:, : j + 1] <= lo) and np.all(lo <= hi[:, 1:])

    def test_triangles_validate(self):
        for family in CHAIN_FAMILIES:
            tri = sample_triangle(chain(family, 4), seed=7)
            assert validate(tri).ok

    def test_stream_deterministic(self):
        spec = chain(Family.BETA_PRIME, 3)
        a = [t.rows for t in sample_many(spec, 5, seed=8)]
        b = [t.rows for t in sample_many(spec, 5, seed=8)]
        assert a == b
        c = [t.rows for t in sample_many(spec, 5, seed=9)]
        assert a != c


class TestPearson4:
    def test_acceptance_rate_guard(self):
        for a, nu in ((1.0, 0.5), (2.5, 4.0), (10.0, -4.0), (6.0, 0.0)):
            assert pearson4_acceptance_rate(a, nu) >= 0.2

    def test_complex_sigma_first_row_moments(self):
        spec = ChainSpec(Family.CAYLEY, 1, sigma=(3.0 + 1.0j,))
        x = sample_rows(spec, N, seed=10)[0].ravel()
        grid = np.linspace(-60, 60, 120_001)
        dens = np.exp(log_chain_density_rows(spec, [grid[:, None]]))
        mass = np.trapezoid(dens, grid)
        assert mass == pytest.approx(1.0, rel=1e-6)
        mean = np.trapezoid(grid * dens, grid)
        assert np.mean(x) == pytest.approx(mean, abs=4 * np.std(x) / math.sqrt(N))


class TestChainDensity:
    def test_cayley_n1_density(self):
        spec = ChainSpec(Family.CAYLEY, 1, sigma=(1.0,))
        tri = sample_triangle(spec, seed=11)
        lam = tri.rows[0][0]
        expected = -math.log(math.pi * (1 + lam**2))
        assert log_chain_density(spec, tri) == pytest.approx(expected, rel=1e-12)

    def test_normalized_n1_gauss(self):
        spec = ChainSpec(Family.GAUSS_CHAIN, 1, psi=(2.0,))
        xs = np.linspace(-8, 8, 2001)
        dens = np.exp(log_chain_density_rows(spec, [xs[:, None]]))
        assert np.trapezoid(dens, xs) == pytest.approx(1.0, rel=1e-6)

    def test_weights_constant_across_sample(self):
        for family in CHAIN_FAMILIES:
            spec = chain(family, 3)
            rows = sample_rows(spec, 500, seed=12)
            logq = log_chain_density_rows(spec, rows)
            logf = np.asarray(log_ultra_integrand_batch(spec.to_params(), rows))
            w = np.exp(np.real(logf) - logq)
            assert np.ptp(w) / np.mean(w) < 1e-10


class TestProjectivity:
    @pytest.mark.parametrize("family", CHAIN_FAMILIES)
    def test_depth3_vs_truncated_depth4(self, family):
        spec = chain(family, 4)
        deep = sample_rows(spec, 20_000, seed=13)[:3]
        shallow = sample_rows(spec.truncate(3), 20_000, seed=14)
        a = np.concatenate([r for r in deep], axis=1)
        b = np.concatenate([r for r in shallow], axis=1)
        heavy = family in (Family.BETA_PRIME, Family.CAYLEY)
        verdict = two_sample_compare(a, b, z_max=4.5, compress_tails=heavy)
        assert verdict.ok, verdict.summary()
