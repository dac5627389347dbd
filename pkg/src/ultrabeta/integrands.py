"""Densities, integrand families, and their Gamma-product closed forms.

Six triangle families are supported, named for the shape of their row
weights:

    BetaPrime     half-line rows, weights  x^(s-1) (1+x)^(-t)
    Cayley        full-line rows, weights  (1+ix)^(-s) (1-ix)^(-t)
    GammaChain    half-line rows, weights  x^(s-1) exp(-psi x)
    GaussChain    full-line rows, weights  exp(-psi x^2 / 2)
    IntervalBeta  rows in [a,b], weights   (x-a)^(s-1) (b-x)^(t-1)
    Trapezoid     BetaPrime rows m..n with an extra base-row Vandermonde

plus the single-layer kernels (one row integrated against a fixed
neighbour) that those families telescope through.  Everything is computed
in log space; functions return complex logs whose imaginary part is the
accumulated phase (zero for real parameters on valid input).
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DivergentError, DomainError, SingularError
from .patterns import RayleighTrapezoid, RayleighTriangle
from .special import log_gamma

LOG_PI = math.log(math.pi)
LOG_2 = math.log(2.0)


class Family(str, Enum):
    BETA_PRIME = "BetaPrime"
    CAYLEY = "Cayley"
    TRAPEZOID = "Trapezoid"
    GAMMA_CHAIN = "GammaChain"
    GAUSS_CHAIN = "GaussChain"
    INTERVAL_BETA = "IntervalBeta"


class SingleLayerKind(str, Enum):
    BETA_PRIME = "BetaPrime"
    CAYLEY = "Cayley"
    GAMMA = "Gamma"
    GAUSS = "Gauss"
    INTERVAL = "Interval"
    FIXED_OUTER = "FixedOuter"


@dataclass(frozen=True)
class GroundField:
    """R / C / H tag; theta is half the real dimension."""

    tag: str

    _THETA = {"R": 0.5, "C": 1.0, "H": 2.0}

    def __post_init__(self):
        if self.tag not in self._THETA:
            raise ValueError(f"unknown ground field tag {self.tag!r}")

    @property
    def theta(self) -> float:
        return self._THETA[self.tag]


REAL = GroundField("R")
COMPLEX = GroundField("C")
QUATERNION = GroundField("H")


def _ctuple(values) -> tuple[complex, ...]:
    return tuple(complex(v) for v in values)


@dataclass(frozen=True)
class UltraBetaParams:
    """One member of the triangle-integral family.

    sigma/tau/psi index rows base..n (base = m for Trapezoid, else 1);
    theta holds one row per j in base..n-1, row j of length j.
    """

    family: Family
    n: int
    sigma: tuple[complex, ...] | None = None
    tau: tuple[complex, ...] | None = None
    theta: tuple[tuple[complex, ...], ...] = ()
    psi: tuple[complex, ...] | None = None
    window: tuple[float, float] | None = None
    m: int = 1
    kappa: complex | None = None

    def __post_init__(self):
        fam, n, m = self.family, self.n, self.m
        if n < 1:
            raise ValueError("n must be >= 1")
        if fam is not Family.TRAPEZOID and m != 1:
            raise ValueError("m != 1 only makes sense for the Trapezoid family")
        if not 1 <= m <= n:
            raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
        span = n - m + 1
        if fam in (Family.BETA_PRIME, Family.CAYLEY, Family.TRAPEZOID, Family.INTERVAL_BETA):
            if self.sigma is None or self.tau is None:
                raise ValueError(f"{fam.value} requires sigma and tau")
            if len(self.sigma) != span or len(self.tau) != span:
                raise ValueError(f"sigma/tau must cover rows {m}..{n} ({span} entries)")
        if fam is Family.GAMMA_CHAIN and (self.sigma is None or self.psi is None):
            raise ValueError("GammaChain requires sigma and psi")
        if fam is Family.GAUSS_CHAIN and self.psi is None:
            raise ValueError("GaussChain requires psi")
        if self.psi is not None and len(self.psi) != span:
            raise ValueError(f"psi must cover rows {m}..{n} ({span} entries)")
        if len(self.theta) != n - m:
            raise ValueError(f"theta must hold rows {m}..{n - 1} ({n - m} rows)")
        for i, row in enumerate(self.theta):
            if len(row) != m + i:
                raise ValueError(f"theta row {m + i} must have {m + i} entries")
        if fam is Family.INTERVAL_BETA:
            if self.window is None or not self.window[0] < self.window[1]:
                raise ValueError("IntervalBeta requires a finite window (a, b) with a < b")
        if fam is Family.TRAPEZOID and self.kappa is None:
            raise ValueError("Trapezoid requires kappa")

    # row accessors, 1-indexed by actual row number j
    def sigma_j(self, j: int) -> complex:
        return complex(self.sigma[j - self.m])

    def tau_j(self, j: int) -> complex:
        return complex(self.tau[j - self.m])

    def psi_j(self, j: int) -> complex:
        return complex(self.psi[j - self.m])

    def theta_row(self, j: int) -> tuple[complex, ...]:
        return tuple(complex(t) for t in self.theta[j - self.m])

    def theta_sum_below(self, j: int) -> complex:
        """Sum of theta over row j-1 (0 for the base row).

        For the Trapezoid base row the erased rows all carried kappa, so the
        effective sum is (m-1) * kappa.
        """
        if j == self.m:
            if self.family is Family.TRAPEZOID:
                return (self.m - 1) * complex(self.kappa)
            return 0.0 + 0.0j
        return sum(self.theta_row(j - 1))

    def domain_window(self) -> tuple[float, float]:
        if self.family in (Family.BETA_PRIME, Family.GAMMA_CHAIN, Family.TRAPEZOID):
            return (0.0, math.inf)
        if self.family in (Family.CAYLEY, Family.GAUSS_CHAIN):
            return (-math.inf, math.inf)
        return (float(self.window[0]), float(self.window[1]))

    def to_dict(self) -> dict:
        def enc(v):
            if v is None:
                return None
            v = complex(v)
            return v.real if v.imag == 0 else [v.real, v.imag]

        out = {"family": self.family.value, "n": self.n}
        if self.sigma is not None:
            out["sigma"] = [enc(s) for s in self.sigma]
        if self.tau is not None:
            out["tau"] = [enc(t) for t in self.tau]
        if self.theta:
            out["theta"] = [[enc(t) for t in row] for row in self.theta]
        if self.psi is not None:
            out["psi"] = [enc(p) for p in self.psi]
        if self.window is not None:
            out["window"] = [self.window[0], self.window[1]]
        if self.family is Family.TRAPEZOID:
            out["m"] = self.m
            out["kappa"] = enc(self.kappa)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "UltraBetaParams":
        def dec(v):
            if v is None:
                return None
            if isinstance(v, (list, tuple)):
                return complex(v[0], v[1])
            return complex(v)

        return cls(
            family=Family(data["family"]),
            n=int(data["n"]),
            sigma=_ctuple(dec(s) for s in data["sigma"]) if "sigma" in data else None,
            tau=_ctuple(dec(t) for t in data["tau"]) if "tau" in data else None,
            theta=tuple(_ctuple(dec(t) for t in row) for row in data.get("theta", [])),
            psi=_ctuple(dec(p) for p in data["psi"]) if "psi" in data else None,
            window=tuple(float(x) for x in data["window"]) if "window" in data else None,
            m=int(data.get("m", 1)),
            kappa=dec(data.get("kappa")),
        )

    @classmethod
    def from_json(cls, text: str) -> "UltraBetaParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SingleLayerParams:
    """One single-layer kernel: a row of size n integrated against a fixed
    neighbouring row.

    For all kinds except FixedOuter the fixed row is the smaller one (size
    n-1) and theta has one entry per fixed point.  For FixedOuter the fixed
    row is the larger one (size n+1) and theta has one entry per fixed
    point as well.
    """

    kind: SingleLayerKind
    theta: tuple[complex, ...]
    sigma: complex | None = None
    tau: complex | None = None
    psi: complex | None = None
    window: tuple[float, float] | None = None

    def __post_init__(self):
        k = self.kind
        if k in (SingleLayerKind.BETA_PRIME, SingleLayerKind.CAYLEY, SingleLayerKind.INTERVAL):
            if self.sigma is None or self.tau is None:
                raise ValueError(f"{k.value} requires sigma and tau")
        if k is SingleLayerKind.GAMMA and (self.sigma is None or self.psi is None):
            raise ValueError("Gamma requires sigma and psi")
        if k is SingleLayerKind.GAUSS and self.psi is None:
            raise ValueError("Gauss requires psi")
        if k is SingleLayerKind.INTERVAL and (self.window is None or not self.window[0] < self.window[1]):
            raise ValueError("Interval requires a finite window (a, b)")

    def convergence_violations(self, margin: float = 0.0) -> list[str]:
        out = []
        th = [complex(t) for t in self.theta]
        for i, t in enumerate(th):
            if not t.real > margin:
                out.append(f"Re theta_{i + 1} > 0")
        s = complex(self.sigma) if self.sigma is not None else None
        t = complex(self.tau) if self.tau is not None else None
        ssum = sum(th)
        if self.kind is SingleLayerKind.BETA_PRIME:
            if not s.real > margin:
                out.append("Re sigma > 0")
            if not t.real > s.real + ssum.real + margin:
                out.append("Re tau > Re sigma + sum Re theta")
        elif self.kind is SingleLayerKind.CAYLEY:
            if not (s + t - 1 - ssum).real > margin:
                out.append("Re(sigma + tau - 1 - sum theta) > 0")
        elif self.kind is SingleLayerKind.GAMMA:
            if not s.real > margin:
                out.append("Re sigma > 0")
            if not complex(self.psi).real > margin:
                out.append("Re psi > 0")
        elif self.kind is SingleLayerKind.GAUSS:
            if not complex(self.psi).real > margin:
                out.append("Re psi > 0")
        elif self.kind is SingleLayerKind.INTERVAL:
            if not s.real > margin:
                out.append("Re sigma > 0")
            if not t.real > margin:
                out.append("Re tau > 0")
        return out


# ---------------------------------------------------------------------------
# interpolation density


def log_r_theta(tri: RayleighTriangle, theta: float) -> float:
    """log of the interpolating weight that carries Lebesgue measure on
    Hermitian matrices to triangle space:

        prod_(j,a,p) |l[j-1][a] - l[j][p]|^(theta-1)
        / prod_(2<=j<=n-1) Vdm(row j)^(2 theta - 2)
        * Vdm(top row)
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    rows = [np.asarray(r, dtype=float) for r in tri.rows]
    n = len(rows)
    total = 0.0
    for j in range(1, n):  # pairs (rows[j-1], rows[j])
        diff = np.abs(rows[j - 1][:, None] - rows[j][None, :])
        if np.any(diff == 0.0):
            raise SingularError(f"tie between rows {j} and {j + 1}")
        if theta != 1.0:
            total += (theta - 1.0) * float(np.sum(np.log(diff)))
    for j in range(1, n - 1):  # inner rows 2..n-1 (0-indexed rows[1..n-2])
        r = rows[j]
        if theta != 1.0:
            gaps = r[None, :] - r[:, None]
            iu = np.triu_indices(len(r), k=1)
            total -= (2.0 * theta - 2.0) * float(np.sum(np.log(gaps[iu])))
    top = rows[-1]
    gaps = top[None, :] - top[:, None]
    iu = np.triu_indices(len(top), k=1)
    total += float(np.sum(np.log(gaps[iu])))
    return total


def normalization_constant(n: int, theta: float) -> float:
    """log C_n(theta) = n(n-1) theta log pi - (n(n-1)/2) log Gamma(theta)."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    return n * (n - 1) * theta * LOG_PI - (n * (n - 1) / 2.0) * float(log_gamma(theta).real)


def normalization_constant_rect(n: int, m: int, theta: float) -> float:
    """log of the rectangular normalizing constant

        pi^(m n theta) / (Gamma(theta)^(n(n-1)/2) prod_j Gamma((m-j+1) theta)).

    The Gamma(theta) power follows the row-by-row reduction (each step
    j-1 -> j contributes j-1 factors), matching the square case.
    """
    if n > m:
        raise ValueError("need n <= m")
    out = m * n * theta * LOG_PI - (n * (n - 1) / 2.0) * float(log_gamma(theta).real)
    for j in range(1, n + 1):
        out -= float(log_gamma((m - j + 1) * theta).real)
    return out


# ---------------------------------------------------------------------------
# triangle integrands


def _pair_term(lower: np.ndarray, upper: np.ndarray, theta: Sequence[complex]) -> np.ndarray:
    """sum_(a,p) (theta_a - 1) log|lower_a - upper_p| over a batch."""
    coef = np.asarray([complex(t) - 1.0 for t in theta])
    keep = coef != 0.0
    if not np.any(keep):
        return np.zeros(lower.shape[0])
    lower = lower[:, keep]
    coef = coef[keep]
    if np.all(coef.imag == 0):
        return kernels.pair_log_abs_sum(lower, upper, coef.real)
    logs = np.log(np.abs(lower[:, :, None] - upper[:, None, :]))
    return np.einsum("a,nap->n", coef, logs)


def _vdm_term(rows: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """sum_{a<b} coef[a,b] log(rows_b - rows_a) over a batch."""
    if rows.shape[1] < 2:
        return np.zeros(rows.shape[0])
    if np.all(np.asarray(coef).imag == 0 if np.iscomplexobj(coef) else True):
        return kernels.vandermonde_log_sum(rows, np.real(coef))
    j = rows.shape[1]
    out = np.zeros(rows.shape[0], dtype=complex)
    for a in range(j):
        for b in range(a + 1, j):
            out = out + coef[a, b] * np.log(rows[:, b] - rows[:, a])
    return out


def _vdm_coef(theta: Sequence[complex]) -> np.ndarray:
    th = np.asarray([complex(t) for t in theta])
    coef = th[:, None] + th[None, :] - 2.0
    if np.all(coef.imag == 0):
        return coef.real
    return coef


def _row_weight(params: UltraBetaParams, j: int, lam: np.ndarray):
    """Per-sample log weight of row j (batch shape (N, j))."""
    fam = params.family
    n = params.n
    top = j == n
    if fam in (Family.BETA_PRIME, Family.TRAPEZOID):
        if top:
            s, t = params.sigma_j(n) - 1.0, params.tau_j(n)
        else:
            th = np.asarray(params.theta_row(j))
            s = params.sigma_j(j) - params.sigma_j(j + 1) - th
            t = params.tau_j(j) - params.tau_j(j + 1) + th
        return np.sum(s * np.log(lam) - t * np.log1p(lam), axis=1)
    if fam is Family.CAYLEY:
        if top:
            s, t = params.sigma_j(n), params.tau_j(n)
        else:
            th = np.asarray(params.theta_row(j))
            s = params.sigma_j(j) - params.sigma_j(j + 1) + th
            t = params.tau_j(j) - params.tau_j(j + 1) + th
        return np.sum(-s * np.log(1.0 + 1j * lam) - t * np.log(1.0 - 1j * lam), axis=1)
    if fam is Family.GAMMA_CHAIN:
        if top:
            s = params.sigma_j(n) - 1.0
            psi = params.psi_j(n)
        else:
            th = np.asarray(params.theta_row(j))
            s = params.sigma_j(j) - params.sigma_j(j + 1) - th
            psi = params.psi_j(j) - params.psi_j(j + 1)
        return np.sum(s * np.log(lam) - psi * lam, axis=1)
    if fam is Family.GAUSS_CHAIN:
        psi = params.psi_j(n) if top else params.psi_j(j) - params.psi_j(j + 1)
        return -0.5 * psi * np.sum(lam**2, axis=1)
    if fam is Family.INTERVAL_BETA:
        a, b = params.window
        if top:
            s, t = params.sigma_j(n) - 1.0, params.tau_j(n) - 1.0
        else:
            th = np.asarray(params.theta_row(j))
            s = params.sigma_j(j) - params.sigma_j(j + 1) - th
            t = params.tau_j(j) - params.tau_j(j + 1) - th
        return np.sum(s * np.log(lam - a) + t * np.log(b - lam), axis=1)
    raise ValueError(fam)


def log_ultra_integrand_batch(params: UltraBetaParams, rows: Sequence[np.ndarray]) -> np.ndarray:
    """Batched log integrand; rows[i] has shape (N, m+i) for rows m..n.

    Returns a float array for real parameters, complex otherwise.
    """
    n, m = params.n, params.m
    rows = [np.asarray(r, dtype=float) for r in rows]
    if len(rows) != n - m + 1:
        raise DomainError(f"expected rows {m}..{n}")
    count = rows[0].shape[0]
    total = np.zeros(count, dtype=complex)
    for idx, lam in enumerate(rows):
        j = m + idx
        total = total + _row_weight(params, j, lam)
        if j < n:
            th = params.theta_row(j)
            total = total + _pair_term(lam, rows[idx + 1], th)
            total = total - _vdm_term(lam, _vdm_coef(th))
    top = rows[-1]
    total = total + _vdm_term(top, np.ones((n, n)))
    if params.family is Family.TRAPEZOID and m >= 2:
        kap = complex(params.kappa)
        base = rows[0]
        total = total + (2.0 * kap - 1.0) * _vdm_term(base, np.ones((m, m)))
    if np.all(np.abs(total.imag) == 0.0):
        return total.real
    return total


def log_ultra_integrand(params: UltraBetaParams, tri: RayleighTriangle | RayleighTrapezoid) -> complex:
    """log of the full triangle/trapezoid integrand at one configuration."""
    if isinstance(tri, RayleighTrapezoid):
        if tri.base_size != params.m or tri.top_size != params.n:
            raise DomainError("trapezoid shape does not match params")
    elif tri.size != params.n or params.m != 1:
        raise DomainError("triangle size does not match params")
    a, b = params.domain_window()
    for r in tri.rows:
        if r[0] < a or r[-1] > b:
            raise DomainError(f"configuration leaves the window [{a}, {b}]")
    batch = [np.asarray(r, dtype=float)[None, :] for r in tri.rows]
    return complex(log_ultra_integrand_batch(params, batch)[0])


# ---------------------------------------------------------------------------
# convergence and closed forms


def convergence_violations(params: UltraBetaParams, margin: float = 0.0) -> list[str]:
    """Empty list when all convergence inequalities hold with the margin."""
    out = []
    fam, n, m = params.family, params.n, params.m
    for j in range(m, n):
        for a, t in enumerate(params.theta_row(j)):
            if not complex(t).real > margin:
                out.append(f"Re theta[{j}][{a + 1}] > 0")
    if fam is Family.TRAPEZOID:
        kap = complex(params.kappa)
        if not kap.real > margin:
            out.append("Re kappa > 0")
    for j in range(m, n + 1):
        ssum = complex(params.theta_sum_below(j))
        if fam in (Family.BETA_PRIME, Family.TRAPEZOID):
            s, t = params.sigma_j(j), params.tau_j(j)
            if not s.real > margin:
                out.append(f"Re sigma_{j} > 0")
            if not t.real > s.real + ssum.real + margin:
                out.append(f"Re tau_{j} > Re sigma_{j} + sum Re theta row {j - 1}")
        elif fam is Family.CAYLEY:
            s, t = params.sigma_j(j), params.tau_j(j)
            if not (s + t - 1 - ssum).real > margin:
                out.append(f"Re(sigma_{j} + tau_{j} - 1 - sum theta row {j - 1}) > 0")
        elif fam is Family.GAMMA_CHAIN:
            if not params.sigma_j(j).real > margin:
                out.append(f"Re sigma_{j} > 0")
            if not params.psi_j(j).real > margin:
                out.append(f"Re psi_{j} > 0")
        elif fam is Family.GAUSS_CHAIN:
            if not params.psi_j(j).real > margin:
                out.append(f"Re psi_{j} > 0")
        elif fam is Family.INTERVAL_BETA:
            if not params.sigma_j(j).real > margin:
                out.append(f"Re sigma_{j} > 0")
            if not params.tau_j(j).real > margin:
                out.append(f"Re tau_{j} > 0")
    if fam is Family.TRAPEZOID and m >= 2:
        kap = complex(params.kappa)
        s, t = params.sigma_j(m), params.tau_j(m)
        for j in range(1, m):
            if not (t - s - (m + j - 1) * kap).real > margin:
                out.append(f"Re(tau_m - sigma_m - {m + j - 1} kappa) > 0")
            if not (s + j * kap).real > margin:
                out.append(f"Re(sigma_m + {j} kappa) > 0")
    return out


def _require_convergent(params: UltraBetaParams) -> None:
    bad = convergence_violations(params)
    if bad:
        raise DivergentError("divergent parameters: " + "; ".join(bad))


def log_closed_form(params: UltraBetaParams) -> complex:
    """log of the Gamma-product value of the family integral."""
    _require_convergent(params)
    fam, n, m = params.family, params.n, params.m
    total = 0.0 + 0.0j
    for j in range(m, n):
        for t in params.theta_row(j):
            total += log_gamma(t)
    if fam in (Family.BETA_PRIME, Family.TRAPEZOID):
        for j in range(m, n + 1):
            s, t = params.sigma_j(j), params.tau_j(j)
            total += log_gamma(s) + log_gamma(t - s - params.theta_sum_below(j)) - log_gamma(t)
        if fam is Family.TRAPEZOID and m >= 2:
            kap = complex(params.kappa)
            s, t = params.sigma_j(m), params.tau_j(m)
            for j in range(1, m):
                total += (
                    log_gamma((j + 1) * kap)
                    + log_gamma(s + j * kap)
                    + log_gamma(t - s - (m + j - 1) * kap)
                    - log_gamma(kap)
                    - log_gamma(t - j * kap)
                )
        return total
    if fam is Family.CAYLEY:
        ssum = sum(params.sigma_j(j) + params.tau_j(j) for j in range(1, n + 1))
        total += n * LOG_PI + (2 * n - ssum) * LOG_2
        for j in range(1, n + 1):
            s, t = params.sigma_j(j), params.tau_j(j)
            total += log_gamma(s + t - 1 - params.theta_sum_below(j)) - log_gamma(s) - log_gamma(t)
        return total
    if fam is Family.GAMMA_CHAIN:
        for j in range(1, n + 1):
            s = params.sigma_j(j)
            total += log_gamma(s) - (s + params.theta_sum_below(j)) * cmath.log(params.psi_j(j))
        return total
    if fam is Family.GAUSS_CHAIN:
        total += (n / 2.0) * math.log(2.0 * math.pi)
        for j in range(1, n + 1):
            total += -(0.5 + params.theta_sum_below(j)) * cmath.log(params.psi_j(j))
        return total
    if fam is Family.INTERVAL_BETA:
        a, b = params.window
        # affine scaling: the theta powers of the width cancel between the
        # pair factors and the interpolating Vandermonde terms
        power = sum(params.sigma_j(j) + params.tau_j(j) - 1 for j in range(1, n + 1))
        total += power * math.log(b - a)
        for j in range(1, n + 1):
            s, t = params.sigma_j(j), params.tau_j(j)
            total += log_gamma(s) + log_gamma(t) - log_gamma(s + t + params.theta_sum_below(j))
        return total
    raise ValueError(fam)


def log_selberg_rhs(n: int, sigma: complex, tau: complex, theta: complex) -> complex:
    """log of the classical ordered beta-prime Selberg product."""
    sigma, tau, theta = complex(sigma), complex(tau), complex(theta)
    if not theta.real > 0:
        raise DivergentError("divergent: requires Re theta > 0")
    if not sigma.real > 0:
        raise DivergentError("divergent: requires Re sigma > 0")
    if not tau.real > sigma.real + (2 * n - 2) * theta.real:
        raise DivergentError("divergent: requires Re tau > Re sigma + (2n-2) Re theta")
    total = 0.0 + 0.0j
    for j in range(1, n + 1):
        total += (
            log_gamma(sigma + theta * (j - 1))
            + log_gamma(tau - sigma - theta * (n + j - 2))
            + log_gamma(j * theta)
            - log_gamma(tau - theta * (j - 1))
            - log_gamma(theta)
        )
    return total


def selberg_rhs(n: int, sigma: complex, tau: complex, theta: complex) -> complex:
    return complex(cmath.exp(log_selberg_rhs(n, sigma, tau, theta)))


# ---------------------------------------------------------------------------
# single-layer kernels


def _check_interlace(fixed: np.ndarray, var: np.ndarray, window) -> None:
    a, b = window
    chain = np.empty(fixed.size + var.size)
    if var.size == fixed.size + 1:
        chain[0::2], chain[1::2] = var, fixed
    elif var.size == fixed.size - 1:
        chain[0::2], chain[1::2] = fixed, var
    else:
        raise DomainError("row sizes must differ by exactly 1")
    if np.any(np.diff(chain) <= 0) or chain[0] <= a or chain[-1] >= b:
        raise DomainError("rows do not interlace strictly inside the window")


def single_layer_window(params: SingleLayerParams, fixed: Sequence[float] | None = None):
    k = params.kind
    if k in (SingleLayerKind.BETA_PRIME, SingleLayerKind.GAMMA):
        return (0.0, math.inf)
    if k in (SingleLayerKind.CAYLEY, SingleLayerKind.GAUSS):
        return (-math.inf, math.inf)
    if k is SingleLayerKind.INTERVAL:
        return tuple(params.window)
    fixed = np.asarray(fixed, dtype=float)
    return (float(fixed[0]), float(fixed[-1]))


def log_single_layer_integrand_batch(
    params: SingleLayerParams, fixed: Sequence[float], var: np.ndarray
) -> np.ndarray:
    """Batched log integrand; var has shape (N, n_var)."""
    fixed = np.asarray(fixed, dtype=float)
    var = np.asarray(var, dtype=float)
    if var.ndim == 1:
        var = var[None, :]
    k = params.kind
    count = var.shape[0]
    total = np.zeros(count, dtype=complex)
    if k is SingleLayerKind.FIXED_OUTER:
        if len(params.theta) != fixed.size:
            raise DomainError("FixedOuter needs one theta per outer point")
        coef = np.asarray([complex(t) - 1.0 for t in params.theta])
        logs = np.log(np.abs(fixed[None, :, None] - var[:, None, :]))
        total = total + np.einsum("a,nap->n", coef, logs)
    else:
        if len(params.theta) != fixed.size:
            raise DomainError("need one theta per fixed point")
        if fixed.size:
            total = total + _pair_term(
                np.broadcast_to(fixed, (count, fixed.size)), var, params.theta
            )
        s = complex(params.sigma) if params.sigma is not None else None
        t = complex(params.tau) if params.tau is not None else None
        if k is SingleLayerKind.BETA_PRIME:
            total = total + np.sum((s - 1) * np.log(var) - t * np.log1p(var), axis=1)
        elif k is SingleLayerKind.CAYLEY:
            total = total + np.sum(-s * np.log(1 + 1j * var) - t * np.log(1 - 1j * var), axis=1)
        elif k is SingleLayerKind.GAMMA:
            total = total + np.sum((s - 1) * np.log(var) - complex(params.psi) * var, axis=1)
        elif k is SingleLayerKind.GAUSS:
            total = total - 0.5 * complex(params.psi) * np.sum(var**2, axis=1)
        elif k is SingleLayerKind.INTERVAL:
            a, b = params.window
            total = total + np.sum((s - 1) * np.log(var - a) + (t - 1) * np.log(b - var), axis=1)
    total = total + _vdm_term(var, np.ones((var.shape[1], var.shape[1])))
    if np.all(total.imag == 0.0):
        return total.real
    return total


def log_single_layer_integrand(
    params: SingleLayerParams, fixed: Sequence[float], var: Sequence[float]
) -> complex:
    fixed = np.asarray(fixed, dtype=float)
    var = np.asarray(var, dtype=float)
    _check_interlace(fixed, var, single_layer_window(params, fixed))
    return complex(log_single_layer_integrand_batch(params, fixed, var[None, :])[0])


def log_single_layer_closed_form(params: SingleLayerParams, fixed: Sequence[float]) -> complex:
    """log of the fixed-row-dependent closed form of the kernel integral."""
    bad = params.convergence_violations()
    if bad:
        raise DivergentError("divergent parameters: " + "; ".join(bad))
    fixed = np.asarray(fixed, dtype=float)
    th = [complex(t) for t in params.theta]
    k = params.kind
    if k is SingleLayerKind.FIXED_OUTER:
        total = sum(log_gamma(t) for t in th) - log_gamma(sum(th))
        for p in range(fixed.size):
            for q in range(p + 1, fixed.size):
                total += (th[p] + th[q] - 1) * math.log(fixed[q] - fixed[p])
        return complex(total)
    ssum = sum(th)
    total = 0.0 + 0.0j
    for p in range(fixed.size):
        for q in range(p + 1, fixed.size):
            total += (th[p] + th[q] - 1) * math.log(fixed[q] - fixed[p])
    for t in th:
        total += log_gamma(t)
    s = complex(params.sigma) if params.sigma is not None else None
    t = complex(params.tau) if params.tau is not None else None
    if k is SingleLayerKind.BETA_PRIME:
        total += log_gamma(s) + log_gamma(t - s - ssum) - log_gamma(t)
        for a, la in enumerate(fixed):
            total += (s - 1 + th[a]) * math.log(la) - (t - th[a]) * math.log1p(la)
        return total
    if k is SingleLayerKind.CAYLEY:
        total += LOG_PI + (2 - s - t) * LOG_2 + log_gamma(s + t - ssum - 1) - log_gamma(s) - log_gamma(t)
        for a, la in enumerate(fixed):
            total += (-s + th[a]) * cmath.log(1 + 1j * la) + (-t + th[a]) * cmath.log(1 - 1j * la)
        return total
    if k is SingleLayerKind.GAMMA:
        psi = complex(params.psi)
        total += log_gamma(s) - (s + ssum) * cmath.log(psi)
        for a, la in enumerate(fixed):
            total += (s - 1 + th[a]) * math.log(la) - psi * la
        return total
    if k is SingleLayerKind.GAUSS:
        psi = complex(params.psi)
        total += 0.5 * math.log(2 * math.pi) - (0.5 + ssum) * cmath.log(psi)
        total += -0.5 * psi * float(np.sum(fixed**2))
        return total
    if k is SingleLayerKind.INTERVAL:
        a, b = params.window
        # affine scaling: the fixed-row factors already carry the theta
        # powers of the width, so the prefactor exponent is theta-free
        total += (s + t - 1) * math.log(b - a)
        total += log_gamma(s) + log_gamma(t) - log_gamma(s + t + ssum)
        for i, la in enumerate(fixed):
            total += (s + th[i] - 1) * math.log(la - a) + (t + th[i] - 1) * math.log(b - la)
        return total
    raise ValueError(k)


# ---------------------------------------------------------------------------
# matrix-integral presets

PRESET_NAMES = (
    "gindikin-pos",
    "hua-hermitian",
    "hua-rect",
    "ball-rect",
    "gindikin-interval",
    "wishart-gamma",
    "rect-gamma",
    "mehta-gauss",
    "laguerre-corners",
    "hermite-corners",
)


def _const_theta(n: int, theta: float) -> tuple[tuple[complex, ...], ...]:
    return tuple(tuple(complex(theta) for _ in range(j)) for j in range(1, n))


def matrix_preset(
    name: str,
    n: int,
    m: int | None,
    field: GroundField,
    *,
    sigma=None,
    tau=None,
    psi=None,
) -> UltraBetaParams:
    """Triangle-family parameters realizing a named matrix integral.

    sigma/tau/psi are scalars or per-row sequences, depending on the preset.
    """
    theta = field.theta

    def vec(v, default=None):
        if v is None:
            v = default
        if v is None:
            raise ValueError(f"preset {name} needs a parameter that was not given")
        if np.isscalar(v) or isinstance(v, complex):
            return tuple(complex(v) for _ in range(n))
        if len(v) != n:
            raise ValueError(f"need {n} entries")
        return _ctuple(v)

    if name in ("hua-rect", "ball-rect", "rect-gamma", "laguerre-corners"):
        if m is None or n > m:
            raise ValueError(f"preset {name} needs n <= m")
    th = _const_theta(n, theta)
    if name == "gindikin-pos" or name == "hua-rect":
        return UltraBetaParams(Family.BETA_PRIME, n, sigma=vec(sigma), tau=vec(tau), theta=th)
    if name == "hua-hermitian":
        s = complex(sigma)
        sched = tuple(s - (n - j) * theta for j in range(1, n + 1))
        return UltraBetaParams(Family.CAYLEY, n, sigma=sched, tau=sched, theta=th)
    if name in ("ball-rect", "gindikin-interval"):
        return UltraBetaParams(
            Family.INTERVAL_BETA, n, sigma=vec(sigma), tau=vec(tau), theta=th, window=(0.0, 1.0)
        )
    if name in ("wishart-gamma", "rect-gamma"):
        return UltraBetaParams(Family.GAMMA_CHAIN, n, sigma=vec(sigma), theta=th, psi=vec(psi, 1.0))
    if name == "mehta-gauss":
        return UltraBetaParams(Family.GAUSS_CHAIN, n, theta=th, psi=vec(psi, 1.0))
    if name == "laguerre-corners":
        sched = tuple(complex((m - j + 1) * theta) for j in range(1, n + 1))
        return UltraBetaParams(Family.GAMMA_CHAIN, n, sigma=sched, theta=th, psi=vec(psi, 1.0))
    if name == "hermite-corners":
        return UltraBetaParams(Family.GAUSS_CHAIN, n, theta=th, psi=vec(psi, 1.0))
    raise ValueError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")


def log_matrix_integral_rhs(
    name: str,
    n: int,
    m: int | None,
    field: GroundField,
    *,
    sigma=None,
    tau=None,
    psi=None,
) -> complex:
    """log of the matrix-side Gamma product for a preset (the pi powers kept
    general in theta).  Equals normalization + log_closed_form of the preset.
    """
    theta = field.theta
    params = matrix_preset(name, n, m, field, sigma=sigma, tau=tau, psi=psi)

    def s(j):
        return params.sigma_j(j)

    def t(j):
        return params.tau_j(j)

    def p(j):
        return params.psi_j(j)

    herm_pi = n * (n - 1) * theta * LOG_PI
    rect_pi = (m or 0) * n * theta * LOG_PI if m is not None else None
    total = 0.0 + 0.0j
    if name in ("gindikin-pos", "hua-rect"):
        total += herm_pi if name == "gindikin-pos" else rect_pi
        for j in range(1, n + 1):
            total += log_gamma(s(j)) + log_gamma(t(j) - s(j) - (j - 1) * theta) - log_gamma(t(j))
            if name == "hua-rect":
                total -= log_gamma((m - j + 1) * theta)
        return total
    if name == "hua-hermitian":
        ssum = sum(s(j) + t(j) for j in range(1, n + 1))
        total += herm_pi + n * LOG_PI + (2 * n - ssum) * LOG_2
        for j in range(1, n + 1):
            total += log_gamma(s(j) + t(j) - 1 - (j - 1) * theta) - log_gamma(s(j)) - log_gamma(t(j))
        return total
    if name in ("ball-rect", "gindikin-interval"):
        total += rect_pi if name == "ball-rect" else herm_pi
        for j in range(1, n + 1):
            total += log_gamma(s(j)) + log_gamma(t(j)) - log_gamma(s(j) + t(j) + (j - 1) * theta)
            if name == "ball-rect":
                total -= log_gamma((m - j + 1) * theta)
        return total
    if name in ("wishart-gamma", "rect-gamma", "laguerre-corners"):
        total += herm_pi if name == "wishart-gamma" else rect_pi
        for j in range(1, n + 1):
            total += log_gamma(s(j)) - (s(j) + (j - 1) * theta) * cmath.log(p(j))
            if name != "wishart-gamma":
                total -= log_gamma((m - j + 1) * theta)
        return total
    if name in ("mehta-gauss", "hermite-corners"):
        total += herm_pi + (n / 2.0) * math.log(2 * math.pi)
        for j in range(1, n + 1):
            total += -(0.5 + (j - 1) * theta) * cmath.log(p(j))
        return total
    raise ValueError(f"unknown preset {name!r}")
