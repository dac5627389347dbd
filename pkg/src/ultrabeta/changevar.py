"""Residue coordinates for an interlacing pair of rows and their inverses.

Given mu_1 < lam_1 < mu_2 < ... < lam_{n-1} < mu_n, the forward map sends mu
to (xi_1..xi_{n-1}, eta) with

    xi_a  = - prod_p (mu_p - lam_a) / prod_{b != a} (lam_b - lam_a)
    eta   = sum mu_p - sum lam_b

(xi_a is minus the residue of prod(x-mu)/prod(x-lam) at lam_a).  The inverse
recovers mu as the eigenvalues of the symmetric arrowhead matrix with
diagonal (lam_1..lam_{n-1}, eta) and border sqrt(xi); its characteristic
equation is exactly the rational-function root condition.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, SingularError

DEGENERATE_GAP = 1e-12


class ConditioningWarning(UserWarning):
    """Interlacing gap below DEGENERATE_GAP: downstream densities are extreme."""


@dataclass(frozen=True)
class AndersonCoords:
    """Residue coordinates (xi, eta); xi entries are positive on valid input."""

    xi: tuple[float, ...]
    eta: float


@dataclass(frozen=True)
class SimplexCoords:
    """Barycentric-type coordinates zeta, positive and summing to 1."""

    zeta: tuple[float, ...]


def _as_row(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise DomainError(f"{name} must be strictly increasing")
    return arr


def _check_interlacing(mu: np.ndarray, lam: np.ndarray) -> None:
    if mu.size != lam.size + 1:
        raise DomainError(f"need len(mu) == len(lambda) + 1, got {mu.size} and {lam.size}")
    if lam.size and not (np.all(mu[:-1] < lam) and np.all(lam < mu[1:])):
        raise DomainError("mu and lambda do not interlace strictly")
    if lam.size:
        gap = min(np.min(lam - mu[:-1]), np.min(mu[1:] - lam))
        if gap < DEGENERATE_GAP:
            warnings.warn(f"interlacing gap {gap:.3e} below {DEGENERATE_GAP:.0e}", ConditioningWarning)


def _signed_logprod(values: np.ndarray) -> tuple[float, float]:
    if np.any(values == 0.0):
        return -math.inf, 0.0
    sign = -1.0 if (np.count_nonzero(values < 0) % 2) else 1.0
    return float(np.sum(np.log(np.abs(values)))), sign


def anderson_forward(mu: Sequence[float], lam: Sequence[float]) -> AndersonCoords:
    """Forward residue map; requires strict interlacing.

    Products are accumulated in log-absolute space with sign tracking so the
    map stays finite for large rows.
    """
    mu = _as_row(mu, "mu")
    lam = _as_row(lam, "lambda")
    _check_interlacing(mu, lam)
    n1 = lam.size
    xi = np.empty(n1)
    for a in range(n1):
        lnum, snum = _signed_logprod(mu - lam[a])
        lden, sden = _signed_logprod(np.delete(lam, a) - lam[a])
        xi[a] = -snum * sden * math.exp(lnum - lden)
    eta = float(np.sum(mu) - np.sum(lam))
    return AndersonCoords(tuple(xi), eta)


def arrowhead_matrix(coords: AndersonCoords, lam: Sequence[float]) -> np.ndarray:
    """Symmetric arrowhead with diagonal (lam, eta) and border sqrt(xi)."""
    lam = np.asarray(lam, dtype=float)
    xi = np.asarray(coords.xi, dtype=float)
    if np.any(xi < 0):
        raise DomainError("xi entries must be nonnegative")
    n = lam.size + 1
    mat = np.zeros((n, n))
    mat[np.arange(n - 1), np.arange(n - 1)] = lam
    mat[-1, -1] = coords.eta
    border = np.sqrt(xi)
    mat[-1, :-1] = border
    mat[:-1, -1] = border
    return mat


def anderson_inverse(coords: AndersonCoords, lam: Sequence[float]) -> np.ndarray:
    """Recover mu (sorted, interlacing lam) from (xi, eta).

    xi_a = 0 deflates: the corresponding root is pinned at lam_a exactly.
    """
    lam = _as_row(lam, "lambda") if len(lam) else np.empty(0)
    xi = np.asarray(coords.xi, dtype=float)
    if xi.size != lam.size:
        raise DomainError("xi and lambda lengths differ")
    if np.any(xi < 0):
        raise DomainError("xi entries must be positive")
    active = xi > 0.0
    pinned = lam[~active]
    sub = AndersonCoords(tuple(xi[active]), coords.eta)
    mu = np.linalg.eigvalsh(arrowhead_matrix(sub, lam[active]))
    return np.sort(np.concatenate([mu, pinned]))


def anderson_inverse_batch(xi: np.ndarray, eta: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Vectorized inverse for a batch: xi (N, n-1), eta (N,), lam (N, n-1).

    Returns mu with shape (N, n).  Zero xi entries are tolerated (eigenvalue
    pinned at the matching lam by the arrowhead structure itself).
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    count, n1 = xi.shape
    n = n1 + 1
    mats = np.zeros((count, n, n))
    idx = np.arange(n1)
    mats[:, idx, idx] = lam
    mats[:, n - 1, n - 1] = eta
    border = np.sqrt(xi)
    mats[:, n - 1, :n1] = border
    mats[:, :n1, n - 1] = border
    return np.linalg.eigvalsh(mats)


def anderson_jacobian(mu: Sequence[float], lam: Sequence[float]) -> float:
    """prod_{p<q}(mu_q - mu_p) / prod_{a<b}(lam_b - lam_a), positive on valid input."""
    mu = _as_row(mu, "mu")
    lam = _as_row(lam, "lambda")
    _check_interlacing(mu, lam)
    lnum = sum(math.log(mu[q] - mu[p]) for p in range(mu.size) for q in range(p + 1, mu.size))
    lden = sum(math.log(lam[b] - lam[a]) for a in range(lam.size) for b in range(a + 1, lam.size))
    return math.exp(lnum - lden)


def linear_factor_identity(
    mu: Sequence[float], lam: Sequence[float], coords: AndersonCoords, a: float
) -> tuple[float, float]:
    """Both sides of prod(mu_p + a) = prod(lam_b + a) * {a + eta - sum xi/(lam+a)}."""
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    xi = np.asarray(coords.xi, dtype=float)
    if np.any(lam + a == 0.0):
        raise SingularError("a coincides with -lambda_alpha")
    lhs = float(np.prod(mu + a))
    rhs = float(np.prod(lam + a) * (a + coords.eta - np.sum(xi / (lam + a))))
    return lhs, rhs


def sum_of_squares_identity(
    mu: Sequence[float], lam: Sequence[float], coords: AndersonCoords
) -> tuple[float, float]:
    """Both sides of sum mu^2 = sum lam^2 + 2 sum xi + eta^2."""
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    lhs = float(np.sum(mu**2))
    rhs = float(np.sum(lam**2) + 2.0 * np.sum(coords.xi) + coords.eta**2)
    return lhs, rhs


def wishart_coords(mu: Sequence[float], lam: Sequence[float]) -> tuple[np.ndarray, float]:
    """Squared-singular-value variant of the residue map.

    xi'_a carries an extra 1/lam_a factor relative to the plain map, and
    eta' = prod mu_p / prod lam_b; the two are tied to the plain map by
    eta' + sum xi'_a = sum mu_p - sum lam_a.
    """
    mu = _as_row(mu, "mu")
    lam = _as_row(lam, "lambda")
    _check_interlacing(mu, lam)
    if lam.size and lam[0] <= 0:
        raise DomainError("lambda entries must be positive")
    if mu[0] < 0:
        raise DomainError("mu entries must be nonnegative")
    plain = anderson_forward(mu, lam)
    xi_p = np.asarray(plain.xi) / lam if lam.size else np.empty(0)
    if mu[0] == 0.0:
        eta_p = 0.0
    else:
        eta_p = math.exp(float(np.sum(np.log(mu)) - np.sum(np.log(lam))))
    return xi_p, eta_p


def simplex_forward(lam: Sequence[float], mu: Sequence[float]) -> SimplexCoords:
    """Map an inner row lam (size n) interlacing outer mu (size n+1) to the simplex:

        zeta_p = prod_a (lam_a - mu_p) / prod_{q != p} (mu_q - mu_p).
    """
    lam = _as_row(lam, "lambda")
    mu = _as_row(mu, "mu")
    _check_interlacing(mu, lam)
    zeta = np.empty(mu.size)
    for p in range(mu.size):
        lnum, snum = _signed_logprod(lam - mu[p])
        lden, sden = _signed_logprod(np.delete(mu, p) - mu[p])
        zeta[p] = snum * sden * math.exp(lnum - lden)
    return SimplexCoords(tuple(zeta))


def simplex_jacobian(lam: Sequence[float], mu: Sequence[float]) -> float:
    """|Jacobian| of lam -> zeta: prod_{a<b}(lam_b-lam_a) / |prod_{p<q}(mu_p-mu_q)|."""
    lam = _as_row(lam, "lambda")
    mu = _as_row(mu, "mu")
    _check_interlacing(mu, lam)
    lnum = sum(math.log(lam[b] - lam[a]) for a in range(lam.size) for b in range(a + 1, lam.size))
    lden = sum(math.log(mu[q] - mu[p]) for p in range(mu.size) for q in range(p + 1, mu.size))
    return math.exp(lnum - lden)
