"""Hot numeric kernels: batched log-products over row pairs.

Each kernel exists twice: a numba @njit build and a pure-numpy broadcast
build.  Set ULTRABETA_NO_NUMBA=1 to force the numpy path (used by the
benchmark and as a fallback where numba is unavailable).  Eigenvalue work
stays in LAPACK either way.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("ULTRABETA_NO_NUMBA", "0") not in ("1", "true", "yes")


def _np_pair_log_abs_sum(lower: np.ndarray, upper: np.ndarray, coef: np.ndarray) -> np.ndarray:
    # sum_{a,p} coef[a] * log|lower[:,a] - upper[:,p]|
    diff = np.abs(lower[:, :, None] - upper[:, None, :])
    return np.einsum("a,nap->n", coef, np.log(diff))


def _np_vandermonde_log_sum(rows: np.ndarray, coef: np.ndarray) -> np.ndarray:
    # sum_{a<b} coef[a,b] * log(rows[:,b] - rows[:,a])
    n, j = rows.shape
    out = np.zeros(n)
    for a in range(j):
        for b in range(a + 1, j):
            out += coef[a, b] * np.log(rows[:, b] - rows[:, a])
    return out


if USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _nb_pair_log_abs_sum(lower, upper, coef):  # pragma: no cover - jit
        n, ja = lower.shape
        jp = upper.shape[1]
        out = np.zeros(n)
        for i in range(n):
            acc = 0.0
            for a in range(ja):
                la = lower[i, a]
                c = coef[a]
                for p in range(jp):
                    acc += c * np.log(np.abs(la - upper[i, p]))
            out[i] = acc
        return out

    @njit(cache=True)
    def _nb_vandermonde_log_sum(rows, coef):  # pragma: no cover - jit
        n, j = rows.shape
        out = np.zeros(n)
        for i in range(n):
            acc = 0.0
            for a in range(j):
                for b in range(a + 1, j):
                    acc += coef[a, b] * np.log(rows[i, b] - rows[i, a])
            out[i] = acc
        return out

    def pair_log_abs_sum(lower, upper, coef):
        return _nb_pair_log_abs_sum(
            np.ascontiguousarray(lower, dtype=np.float64),
            np.ascontiguousarray(upper, dtype=np.float64),
            np.ascontiguousarray(coef, dtype=np.float64),
        )

    def vandermonde_log_sum(rows, coef):
        return _nb_vandermonde_log_sum(
            np.ascontiguousarray(rows, dtype=np.float64),
            np.ascontiguousarray(coef, dtype=np.float64),
        )

else:

    def pair_log_abs_sum(lower, upper, coef):
        return _np_pair_log_abs_sum(
            np.asarray(lower, dtype=np.float64),
            np.asarray(upper, dtype=np.float64),
            np.asarray(coef, dtype=np.float64),
        )

    def vandermonde_log_sum(rows, coef):
        return _np_vandermonde_log_sum(
            np.asarray(rows, dtype=np.float64),
            np.asarray(coef, dtype=np.float64),
        )


# numpy builds are exported under stable names for the benchmark
numpy_pair_log_abs_sum = _np_pair_log_abs_sum
numpy_vandermonde_log_sum = _np_vandermonde_log_sum
