"""Acceptance gate: one test per release criterion, each printing a single
PASS/FAIL line with its headline statistic and elapsed time.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats

from helpers import MARGIN, draw_selberg_row, draw_single_layer, draw_ultra
from ultrabeta.changevar import (
    anderson_forward,
    anderson_inverse_batch,
    anderson_jacobian,
    linear_factor_identity,
    simplex_forward,
    sum_of_squares_identity,
    wishart_coords,
)
from ultrabeta.cli import default_chain
from ultrabeta.integrands import (
    COMPLEX,
    QUATERNION,
    REAL,
    Family,
    SingleLayerKind,
    UltraBetaParams,
    convergence_violations,
    log_closed_form,
    log_selberg_rhs,
    log_single_layer_closed_form,
    log_ultra_integrand_batch,
)
from ultrabeta.matrixcheck import (
    corner_spectra_batch,
    corners_vs_chain,
    gaussian_hermitian_batch,
    gaussian_rect_batch,
    rowblock_spectra_batch,
)
from ultrabeta.montecarlo import mc_integrate, two_sample_compare
from ultrabeta.quadrature import QuadratureSpec, integrate_single_layer, integrate_ultra
from ultrabeta.sampler import (
    CHAIN_FAMILIES,
    ChainSpec,
    log_chain_density_rows,
    sample_rows,
)


def report(num: int, ok: bool, detail: str, elapsed: float) -> None:
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} — {detail} [{elapsed:.1f}s]")


def rel_err(value, truth) -> float:
    return abs(value - truth) / abs(truth)


def interlacing_pairs(rng, k: int, lo=-2.0, hi=3.0, min_gap=0.05):
    """(mu, lam) with mu size k+1 strictly interlacing lam size k."""
    while True:
        pts = np.sort(rng.uniform(lo, hi, size=2 * k + 1))
        if np.min(np.diff(pts)) > min_gap if pts.size > 1 else True:
            return pts[::2], pts[1::2]


def test_criterion_1_single_layer_closed_forms():
    t0 = time.time()
    rng = np.random.default_rng(1001)
    spec = QuadratureSpec(points=56, refine=False)
    worst = 0.0
    for kind in SingleLayerKind:
        for _ in range(50):
            n_var = int(rng.integers(1, 4))
            params, fixed = draw_single_layer(kind, n_var, rng)
            est = integrate_single_layer(params, fixed, spec)
            truth = np.exp(log_single_layer_closed_form(params, fixed))
            worst = max(worst, rel_err(est.value, truth))
    elapsed = time.time() - t0
    ok = worst < 1e-6 and elapsed < 300
    report(1, ok, f"6 kinds x 50 draws, max rel err {worst:.2e}", elapsed)
    assert worst < 1e-6
    assert elapsed < 300


def test_criterion_2_ultra_closed_forms_n2():
    t0 = time.time()
    rng = np.random.default_rng(1002)
    spec = QuadratureSpec(points=36, refine=False)
    worst = 0.0
    families = (
        Family.BETA_PRIME,
        Family.GAMMA_CHAIN,
        Family.GAUSS_CHAIN,
        Family.INTERVAL_BETA,
    )
    for family in families:
        for _ in range(25):
            p = draw_ultra(family, 2, rng)
            worst = max(
                worst, rel_err(integrate_ultra(p, spec).value, np.exp(log_closed_form(p)))
            )
    # base-row tower with one erased level below
    for _ in range(25):
        theta = (float(rng.uniform(MARGIN + 0.1, 1.4)),)
        sigma = tuple(rng.uniform(MARGIN + 0.1, 2.0, size=2))
        tau = (
            sigma[0] + rng.uniform(MARGIN + 0.3, 2.0),
            sigma[1] + theta[0] + rng.uniform(MARGIN + 0.3, 2.0),
        )
        p = UltraBetaParams(
            Family.TRAPEZOID, 2, m=1, sigma=sigma, tau=tau, theta=(theta,),
            kappa=float(rng.uniform(MARGIN + 0.1, 1.5)),
        )
        assert not convergence_violations(p, MARGIN)
        worst = max(
            worst, rel_err(integrate_ultra(p, spec).value, np.exp(log_closed_form(p)))
        )
    # fully erased tower: the one-row ordered integral
    for _ in range(25):
        p, args = draw_selberg_row(2, float(rng.uniform(0.4, 1.6)), rng)
        worst = max(
            worst,
            rel_err(integrate_ultra(p, spec).value, np.exp(log_selberg_rhs(*args))),
        )
    elapsed = time.time() - t0
    ok = worst < 1e-5 and elapsed < 600
    report(2, ok, f"4 families + 2 trapezoid shapes at n=2, max rel err {worst:.2e}",
           elapsed)
    assert worst < 1e-5
    assert elapsed < 600


def shifted_proposal(spec: ChainSpec) -> ChainSpec:
    if spec.family is Family.BETA_PRIME:
        return ChainSpec(spec.family, spec.n, sigma=spec.sigma,
                         tau=tuple(t - 0.3 for t in spec.tau), theta=spec.theta)
    if spec.family is Family.CAYLEY:
        return ChainSpec(spec.family, spec.n,
                         sigma=tuple(s + 0.2 for s in spec.sigma), theta=spec.theta)
    return ChainSpec(spec.family, spec.n, sigma=spec.sigma, theta=spec.theta,
                     psi=tuple(0.8 * p for p in spec.psi))


def test_criterion_3_ultra_n3_monte_carlo():
    t0 = time.time()
    worst_z = worst_rel_se = 0.0
    for i, family in enumerate(CHAIN_FAMILIES):
        chain = default_chain(family, 3)
        params = chain.to_params()
        est = mc_integrate(params, 1_000_000, seed=2000 + i,
                           proposal=shifted_proposal(chain))
        truth = math.exp(log_closed_form(params).real)
        worst_z = max(worst_z, abs(est.value - truth) / est.standard_error)
        worst_rel_se = max(worst_rel_se, est.standard_error / truth)
    elapsed = time.time() - t0
    ok = worst_z < 3 and worst_rel_se < 0.02 and elapsed < 600
    report(3, ok,
           f"4 families, 1e6 samples: max |z| {worst_z:.2f}, "
           f"max SE/value {worst_rel_se:.2e}", elapsed)
    assert worst_z < 3
    assert worst_rel_se < 0.02
    assert elapsed < 600


def test_criterion_4_selberg_cross_check():
    t0 = time.time()
    rng = np.random.default_rng(1004)
    spec = QuadratureSpec(points=40, refine=False)
    worst_rel = worst_z = 0.0
    for theta in (0.5, 1.0, 2.0):
        p, args = draw_selberg_row(2, theta, rng)
        worst_rel = max(
            worst_rel,
            rel_err(integrate_ultra(p, spec).value, np.exp(log_selberg_rhs(*args))),
        )
    n, count = 3, 400_000
    for theta in (0.5, 1.0, 2.0):
        p, (n_, sigma, tau, theta_) = draw_selberg_row(n, theta, rng)
        b = tau - sigma - 2.0 * theta * (n - 1)
        x = rng.gamma(sigma, size=(count, n)) / rng.gamma(b, size=(count, n))
        x.sort(axis=1)
        logq = stats.betaprime(sigma, b).logpdf(x).sum(axis=1) + math.log(math.factorial(n))
        logf = np.real(np.asarray(log_ultra_integrand_batch(p, [x])))
        w = np.exp(logf - logq)
        rhs = math.exp(log_selberg_rhs(n, sigma, tau, theta).real)
        se = w.std() / math.sqrt(count)
        worst_z = max(worst_z, abs(w.mean() - rhs) / se)
    elapsed = time.time() - t0
    ok = worst_rel < 1e-4 and worst_z < 3
    report(4, ok,
           f"theta in {{1/2,1,2}}: n=2 quadrature max rel err {worst_rel:.2e}, "
           f"n=3 MC max |z| {worst_z:.2f}", elapsed)
    assert worst_rel < 1e-4
    assert worst_z < 3


def test_criterion_5_projectivity():
    t0 = time.time()
    count = 100_000
    worst_z, worst_p = 0.0, 1.0
    for i, family in enumerate(CHAIN_FAMILIES):
        for n in (2, 3):
            deep = default_chain(family, n + 1)
            rows = sample_rows(deep, count, seed=3000 + i + 10 * n)[:n]
            shallow = sample_rows(deep.truncate(n), count, seed=4000 + i + 10 * n)
            heavy = family is not Family.GAUSS_CHAIN
            v = two_sample_compare(
                np.concatenate(rows, axis=1),
                np.concatenate(shallow, axis=1),
                z_max=4.0, p_min=1e-3, compress_tails=heavy,
            )
            worst_z = max(worst_z, float(np.abs(v.z_scores).max()))
            worst_p = min(worst_p, float(v.ks_pvalues.min()))
            assert v.ok, f"{family.value} n={n}: {v.summary()}"
    elapsed = time.time() - t0
    ok = worst_z < 4 and worst_p > 1e-3
    report(5, ok,
           f"4 families, n in {{2,3}}, N=1e5: max |z| {worst_z:.2f}, "
           f"min KS p {worst_p:.3g}", elapsed)
    assert ok


def test_criterion_6_gaussian_corners():
    t0 = time.time()
    count, n = 100_000, 3
    worst_z, interlace_frac = 0.0, 1.0
    for i, field in enumerate((REAL, COMPLEX, QUATERNION)):
        v = corners_vs_chain(field, n, None, 1.0, count, seed=5000 + i)
        assert v.ok, f"{field.tag}: {v.summary()}"
        worst_z = max(worst_z, float(np.abs(v.z_scores).max()))
        rng = np.random.default_rng(6000 + i)
        mats = gaussian_hermitian_batch(field, n, 1.0, count, rng)
        rows = corner_spectra_batch(field, mats)
        good = np.ones(count, dtype=bool)
        for j in range(n - 1):
            lo, hi = rows[j], rows[j + 1]
            good &= np.all(hi[:, : j + 1] <= lo, axis=1)
            good &= np.all(lo <= hi[:, 1:], axis=1)
        interlace_frac = min(interlace_frac, float(np.mean(good)))
    elapsed = time.time() - t0
    ok = interlace_frac == 1.0
    report(6, ok,
           f"3 ground fields, n=3, N=1e5: marginals max |z| {worst_z:.2f}, "
           f"interlacing fraction {interlace_frac:.6f}", elapsed)
    assert ok


def test_criterion_7_rect_row_blocks():
    t0 = time.time()
    count, n, m = 100_000, 2, 4
    v = corners_vs_chain(COMPLEX, n, m, 1.0, count, seed=7000)
    rng = np.random.default_rng(7001)
    mats = gaussian_rect_batch(COMPLEX, n, m, 1.0, count, rng)
    rows = rowblock_spectra_batch(COMPLEX, mats)
    nonneg = all(np.all(r >= -1e-10) for r in rows)
    elapsed = time.time() - t0
    ok = v.ok and nonneg
    report(7, ok,
           f"C, n=2, m=4, N=1e5: max |z| {float(np.abs(v.z_scores).max()):.2f}, "
           f"rows nonnegative {nonneg}", elapsed)
    assert v.ok, v.summary()
    assert nonneg


def test_criterion_8_change_of_variables_suite():
    t0 = time.time()
    rng = np.random.default_rng(1008)
    n_inst = 10_000
    worst_rt = worst_fd = worst_id = 0.0
    for _ in range(n_inst):
        k = int(rng.integers(1, 8))  # mu has k+1 <= 8 entries
        mu, lam = interlacing_pairs(rng, k)
        coords = anderson_forward(mu, lam)
        # bijection: residue coordinates back through the bordered eigenproblem
        back = anderson_inverse_batch(
            np.asarray(coords.xi)[None], np.array([coords.eta]), lam[None]
        )[0]
        worst_rt = max(worst_rt, float(np.max(np.abs(back - mu))) / np.max(np.abs(mu)))
        # identities
        lhs, rhs = linear_factor_identity(mu, lam, coords, a=float(rng.uniform(3.2, 5.0)))
        worst_id = max(worst_id, abs(lhs - rhs) / max(abs(lhs), 1e-30))
        lhs, rhs = sum_of_squares_identity(mu, lam, coords)
        worst_id = max(worst_id, abs(lhs - rhs) / abs(lhs))
        # squared-coordinate variant: sum rule against the plain map
        mu_p, lam_p = interlacing_pairs(rng, k, lo=0.05, hi=3.0)
        xi_p, eta_p = wishart_coords(mu_p, lam_p)
        lhs = eta_p + float(np.sum(xi_p))
        rhs = float(np.sum(mu_p) - np.sum(lam_p))
        worst_id = max(worst_id, abs(lhs - rhs) / abs(rhs))
        # barycentric map lands on the simplex
        zeta = np.asarray(simplex_forward(lam, mu).zeta)
        worst_id = max(worst_id, abs(float(zeta.sum()) - 1.0))
        assert np.all(zeta > 0)
    # Jacobian vs central finite differences
    h = 1e-5
    for _ in range(n_inst):
        k = int(rng.integers(1, 8))
        mu, lam = interlacing_pairs(rng, k, min_gap=0.08)
        jac = np.empty((k + 1, k + 1))
        for p in range(k + 1):
            up, dn = mu.copy(), mu.copy()
            up[p] += h
            dn[p] -= h
            cu, cd = anderson_forward(up, lam), anderson_forward(dn, lam)
            jac[:, p] = (
                np.array(list(cu.xi) + [cu.eta]) - np.array(list(cd.xi) + [cd.eta])
            ) / (2 * h)
        worst_fd = max(
            worst_fd,
            abs(abs(np.linalg.det(jac)) - anderson_jacobian(mu, lam))
            / anderson_jacobian(mu, lam),
        )
    elapsed = time.time() - t0
    ok = worst_rt < 1e-10 and worst_id < 1e-10 and worst_fd < 1e-6
    report(8, ok,
           f"1e4 instances, rows <= 8: round-trip {worst_rt:.2e}, "
           f"identities {worst_id:.2e}, Jacobian vs FD {worst_fd:.2e}", elapsed)
    assert worst_rt < 1e-10
    assert worst_id < 1e-10
    assert worst_fd < 1e-6


def test_criterion_9_sampler_density_consistency():
    t0 = time.time()
    count = 10_000
    worst = 0.0
    for i, family in enumerate(CHAIN_FAMILIES):
        spec = default_chain(family, 3)
        rows = sample_rows(spec, count, seed=9000 + i)
        logf = np.real(np.asarray(log_ultra_integrand_batch(spec.to_params(), rows)))
        w = np.exp(logf - log_chain_density_rows(spec, rows))
        worst = max(worst, float(w.var() / w.mean() ** 2))
    elapsed = time.time() - t0
    ok = worst < 1e-20
    report(9, ok, f"4 families, N=1e4: max relative weight variance {worst:.2e}",
           elapsed)
    assert worst < 1e-20
