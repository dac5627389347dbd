"""Special-function kernel: complex log-gamma, Dirichlet integrals in closed
form, Euler beta, and the Cauchy determinant product formula.

Everything downstream works with log-space Gamma products, so all closed
forms here are also exposed as logs.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import gammaln, loggamma

from .errors import DivergentError, PoleError, SingularError

_POLE_TOL = 1e-14


def _check_pole(z: complex) -> None:
    zr, zi = np.real(z), np.imag(z)
    if abs(zi) < _POLE_TOL and zr <= 0.5:
        n = round(float(zr))
        if n <= 0 and abs(zr - n) < _POLE_TOL:
            raise PoleError(int(n))


def log_gamma(z: complex) -> complex:
    """Principal-branch log Gamma(z).

    Raises PoleError at non-positive integers (carrying the integer).
    """
    _check_pole(z)
    if np.imag(z) == 0:
        x = float(np.real(z))
        if x > 0:
            return complex(gammaln(x))
    return complex(loggamma(complex(z)))


def log_beta(a: complex, b: complex) -> complex:
    """log of Euler B(a, b)."""
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def _require(cond: bool, name: str) -> None:
    if not cond:
        raise DivergentError(f"divergent: requires {name}")


def log_dirichlet_simplex(x: Sequence[complex]) -> complex:
    """log of the simplex Dirichlet integral: prod Gamma(x_j) / Gamma(sum x_j).

    x has n+1 entries (the last exponent belongs to 1 - sum t_j).
    """
    xs = [complex(v) for v in x]
    for j, v in enumerate(xs):
        _require(v.real > 0, f"Re x_{j + 1} > 0")
    return sum(log_gamma(v) for v in xs) - log_gamma(sum(xs))


def dirichlet_simplex(x: Sequence[complex]) -> complex:
    return complex(np.exp(log_dirichlet_simplex(x)))


def log_dirichlet_halfspace(x: Sequence[complex], y: complex) -> complex:
    """log of the orthant integral with denominator (1 + sum t)^y:
    Gamma(y - sum x) prod Gamma(x_j) / Gamma(y).
    """
    xs = [complex(v) for v in x]
    y = complex(y)
    for j, v in enumerate(xs):
        _require(v.real > 0, f"Re x_{j + 1} > 0")
    _require(y.real > sum(v.real for v in xs), "Re y > sum Re x_j")
    return log_gamma(y - sum(xs)) + sum(log_gamma(v) for v in xs) - log_gamma(y)


def dirichlet_halfspace(x: Sequence[complex], y: complex) -> complex:
    return complex(np.exp(log_dirichlet_halfspace(x, y)))


def log_dirichlet_cayley(x: Sequence[complex], y: complex, z: complex) -> complex:
    """log of the mixed real-line/orthant integral with kernel
    (1+is+sum t)^-y (1-is+sum t)^-z:

        2^(2-y-z) pi Gamma(y+z-1-sum x) prod Gamma(x_j) / (Gamma(y) Gamma(z)).
    """
    xs = [complex(v) for v in x]
    y, z = complex(y), complex(z)
    for j, v in enumerate(xs):
        _require(v.real > 0, f"Re x_{j + 1} > 0")
    _require((y + z - 1 - sum(xs)).real > 0, "Re(y + z - 1 - sum x_j) > 0")
    return (
        (2 - y - z) * math.log(2.0)
        + math.log(math.pi)
        + log_gamma(y + z - 1 - sum(xs))
        + sum(log_gamma(v) for v in xs)
        - log_gamma(y)
        - log_gamma(z)
    )


def dirichlet_cayley(x: Sequence[complex], y: complex, z: complex) -> complex:
    return complex(np.exp(log_dirichlet_cayley(x, y, z)))


def cauchy_determinant(mu: Sequence[float], lam: Sequence[float]) -> float:
    """Product formula for det(1/(mu_p - lambda_l)) up to ordering sign:

        prod_{p<q}(mu_q - mu_p) prod_{a<b}(lam_b - lam_a) / prod_{p,a}(mu_p - lam_a)

    The value is compared against the direct determinant in absolute value only;
    row/column orderings flip signs (see tests).
    """
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if mu.shape != lam.shape or mu.ndim != 1:
        raise ValueError("mu and lambda must be equal-length 1-d sequences")
    diff = mu[:, None] - lam[None, :]
    if np.any(diff == 0.0):
        raise SingularError("coincident mu and lambda entries")
    num = 1.0
    n = len(mu)
    for p in range(n):
        for q in range(p + 1, n):
            num *= (mu[q] - mu[p]) * (lam[q] - lam[p])
    return num / float(np.prod(diff))


def signed_log_prod(factors: np.ndarray) -> tuple[float, float]:
    """(log|prod|, sign) of a product, computed without overflow."""
    factors = np.asarray(factors, dtype=float)
    if np.any(factors == 0.0):
        return -math.inf, 0.0
    sign = -1.0 if (np.count_nonzero(factors < 0) % 2) else 1.0
    return float(np.sum(np.log(np.abs(factors)))), sign
