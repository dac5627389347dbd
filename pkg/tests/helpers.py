"""Shared random-parameter generators for the verification tests.

All draws land strictly inside the convergence region of their family with
a configurable margin on every inequality.
"""

from __future__ import annotations

import math

import numpy as np

from ultrabeta.integrands import (
    Family,
    SingleLayerKind,
    SingleLayerParams,
    UltraBetaParams,
    convergence_violations,
)

MARGIN = 0.25


def draw_fixed_row(rng: np.random.Generator, size: int, lo: float, hi: float,
                   min_gap: float = 0.08) -> np.ndarray:
    """A strictly increasing row with a minimum spacing, inside (lo, hi)."""
    lo = lo if math.isfinite(lo) else -2.5
    hi = hi if math.isfinite(hi) else 3.0
    span = hi - lo
    pad = 0.05 * span
    while True:
        pts = np.sort(rng.uniform(lo + pad, hi - pad, size=size))
        if size < 2 or np.min(np.diff(pts)) > min_gap:
            return pts


def draw_single_layer(kind: SingleLayerKind, n_var: int, rng: np.random.Generator):
    """(params, fixed_row) with all convergence margins >= MARGIN."""
    n_fixed = n_var + 1 if kind is SingleLayerKind.FIXED_OUTER else n_var - 1
    theta = tuple(rng.uniform(MARGIN + 0.1, 1.6, size=n_fixed))
    tsum = float(sum(theta))
    window = None
    if kind is SingleLayerKind.BETA_PRIME:
        sigma = rng.uniform(MARGIN + 0.1, 2.5)
        tau = sigma + tsum + rng.uniform(MARGIN + 0.3, 2.5)
        p = SingleLayerParams(kind, theta, sigma=sigma, tau=tau)
        lo, hi = 0.05, 3.0
    elif kind is SingleLayerKind.CAYLEY:
        sigma = rng.uniform(0.5, 2.5)
        tau = 1.0 + tsum - sigma + rng.uniform(MARGIN + 0.3, 2.5)
        p = SingleLayerParams(kind, theta, sigma=sigma, tau=tau)
        lo, hi = -2.0, 2.0
    elif kind is SingleLayerKind.GAMMA:
        p = SingleLayerParams(
            kind, theta,
            sigma=rng.uniform(MARGIN + 0.1, 2.5),
            psi=rng.uniform(MARGIN + 0.1, 2.0),
        )
        lo, hi = 0.05, 3.0
    elif kind is SingleLayerKind.GAUSS:
        p = SingleLayerParams(kind, theta, psi=rng.uniform(MARGIN + 0.1, 2.0))
        lo, hi = -2.0, 2.0
    elif kind is SingleLayerKind.INTERVAL:
        a = rng.uniform(-1.0, 0.0)
        b = a + rng.uniform(0.8, 2.0)
        window = (a, b)
        p = SingleLayerParams(
            kind, theta,
            sigma=rng.uniform(MARGIN + 0.1, 2.5),
            tau=rng.uniform(MARGIN + 0.1, 2.5),
            window=window,
        )
        lo, hi = a, b
    else:  # FixedOuter: only theta, fixed row is the larger one
        p = SingleLayerParams(kind, theta)
        lo, hi = -1.5, 1.5
    assert not p.convergence_violations(MARGIN)
    fixed = draw_fixed_row(rng, n_fixed, lo, hi)
    return p, fixed


def draw_ultra(family: Family, n: int, rng: np.random.Generator) -> UltraBetaParams:
    """Triangle-family parameters with all convergence margins >= MARGIN."""
    theta = tuple(
        tuple(rng.uniform(MARGIN + 0.1, 1.4, size=j)) for j in range(1, n)
    )
    sums = [0.0] + [float(sum(row)) for row in theta]  # theta row below row j
    if family is Family.BETA_PRIME:
        sigma = tuple(rng.uniform(MARGIN + 0.1, 2.0, size=n))
        tau = tuple(
            sigma[j] + sums[j] + rng.uniform(MARGIN + 0.3, 2.0) for j in range(n)
        )
        p = UltraBetaParams(family, n, sigma=sigma, tau=tau, theta=theta)
    elif family is Family.CAYLEY:
        sigma = tuple(rng.uniform(0.5, 2.0, size=n))
        tau = tuple(
            1.0 + sums[j] - sigma[j] + rng.uniform(MARGIN + 0.3, 2.0)
            for j in range(n)
        )
        p = UltraBetaParams(family, n, sigma=sigma, tau=tau, theta=theta)
    elif family is Family.GAMMA_CHAIN:
        p = UltraBetaParams(
            family, n,
            sigma=tuple(rng.uniform(MARGIN + 0.1, 2.5, size=n)),
            psi=tuple(rng.uniform(MARGIN + 0.2, 2.0, size=n)),
            theta=theta,
        )
    elif family is Family.GAUSS_CHAIN:
        p = UltraBetaParams(
            family, n, theta=theta,
            psi=tuple(rng.uniform(MARGIN + 0.2, 2.0, size=n)),
        )
    elif family is Family.INTERVAL_BETA:
        a = rng.uniform(-1.0, 0.0)
        p = UltraBetaParams(
            family, n,
            sigma=tuple(rng.uniform(MARGIN + 0.1, 2.5, size=n)),
            tau=tuple(rng.uniform(MARGIN + 0.1, 2.5, size=n)),
            theta=theta,
            window=(a, a + rng.uniform(0.8, 2.0)),
        )
    else:
        raise ValueError(family)
    assert not convergence_violations(p, MARGIN)
    return p


def draw_selberg_row(n: int, theta: float, rng: np.random.Generator):
    """(params, rhs-args) for the single-ordered-row integral at depth n."""
    sigma = rng.uniform(MARGIN + 0.1, 2.0)
    tau = sigma + (2 * n - 2) * theta + rng.uniform(MARGIN + 0.3, 2.0)
    p = UltraBetaParams(
        Family.TRAPEZOID, n, m=n, sigma=(sigma,), tau=(tau,), kappa=theta
    )
    return p, (n, sigma, tau, theta)
