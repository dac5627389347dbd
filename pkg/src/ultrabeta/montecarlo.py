"""Importance-sampling Monte Carlo evaluation of triangle integrals, plus a
two-sample distributional comparison used by the matrix-model checks.

Integrals are estimated as the mean importance weight exp(log f - log q)
where f is the target integrand and q the exact density of a sampleable
chain.  The error bar comes from batch means, which stays honest under the
mild weight correlation introduced by batched rejection sampling.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DomainError, ProposalMismatchError
from .integrands import Family, UltraBetaParams, log_ultra_integrand_batch
from .reports import EstimateReport
from .sampler import CHAIN_FAMILIES, ChainSpec, log_chain_density_rows, sample_rows

N_BATCHES = 100


def default_proposal(params: UltraBetaParams) -> ChainSpec:
    """A sampleable chain matched to the target family.

    Chain families get their own law, so the weights are constant.
    """
    if params.m != 1:
        raise ProposalMismatchError("no default proposal for trapezoid targets")
    theta = tuple(tuple(float(t.real) for t in row) for row in params.theta)
    if params.family in CHAIN_FAMILIES:
        return ChainSpec(
            params.family,
            params.n,
            sigma=params.sigma,
            tau=params.tau if params.family is Family.BETA_PRIME else None,
            theta=theta,
            psi=tuple(p.real for p in params.psi) if params.psi is not None else None,
        )
    raise ProposalMismatchError(f"no default proposal for family {params.family.value}")


def _worker_weights(params, proposal, count, seed):
    rows = sample_rows(proposal, count, np.random.Generator(np.random.Philox(seed)))
    logf = np.asarray(log_ultra_integrand_batch(params, rows), dtype=complex)
    logq = log_chain_density_rows(proposal, rows)
    return np.exp(logf - logq)


def mc_integrate(
    params: UltraBetaParams,
    n_samples: int,
    seed: int = 0,
    proposal: ChainSpec | None = None,
    workers: int = 1,
) -> EstimateReport:
    """Importance-sampling estimate of the triangle integral.

    Per-worker Philox streams are spawned from the seed and reduced in
    worker order, so the result is reproducible for fixed (seed, workers).
    """
    if n_samples < 1:
        raise DomainError("need at least one sample")
    if proposal is None:
        proposal = default_proposal(params)
    if proposal.n != params.n:
        raise ProposalMismatchError("proposal depth does not match target")
    t0 = time.perf_counter()
    counts = [n_samples // workers] * workers
    counts[-1] += n_samples - sum(counts)
    seeds = np.random.SeedSequence(seed).spawn(workers)
    if workers == 1:
        chunks = [_worker_weights(params, proposal, counts[0], seeds[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [
                pool.submit(_worker_weights, params, proposal, c, s)
                for c, s in zip(counts, seeds)
            ]
            chunks = [f.result() for f in futs]
    w = np.concatenate(chunks)
    if not np.all(np.isfinite(w)):
        raise ProposalMismatchError(
            "non-finite importance weights: proposal does not cover the target"
        )
    if np.isrealobj(w) or not np.any(w.imag):
        w = w.real
    value = w.mean()
    degenerate = n_samples < 2
    if degenerate:
        se = se_iid = float("nan")
    else:
        n_batches = min(N_BATCHES, n_samples)
        usable = (n_samples // n_batches) * n_batches
        batches = w[:usable].reshape(n_batches, -1).mean(axis=1)
        se = float(np.abs(batches - batches.mean()).std(ddof=1) / np.sqrt(n_batches))
        se_iid = float(np.abs(w - value).std(ddof=1) / np.sqrt(n_samples))
        se = max(se, 0.0)
    sw = np.abs(w)
    ess = float(sw.sum() ** 2 / (sw**2).sum())
    return EstimateReport(
        value=complex(value) if np.iscomplexobj(w) else float(value),
        standard_error=se,
        n_samples=n_samples,
        seed=seed,
        wall_time=time.perf_counter() - t0,
        diagnostics={
            "ess": ess,
            "ess_frac": ess / n_samples,
            "se_iid": se_iid,
            "workers": workers,
            "proposal": proposal.family.value,
            "degenerate": degenerate,
        },
    )


# ---------------------------------------------------------------------------
# two-sample comparison


@dataclass(frozen=True)
class TwoSampleVerdict:
    """Per-marginal moment z-scores and KS p-values for two point clouds."""

    ok: bool
    z_scores: np.ndarray  # (k, 4)
    ks_pvalues: np.ndarray  # (k,)
    warnings: tuple[str, ...] = ()

    def summary(self) -> str:
        worst_z = float(np.max(np.abs(self.z_scores)))
        return (
            f"{'PASS' if self.ok else 'FAIL'}: max |moment z| = {worst_z:.2f}, "
            f"min KS p = {float(self.ks_pvalues.min()):.3g}"
        )


def _moment_z(a: np.ndarray, b: np.ndarray, k: int) -> float:
    fa, fb = a**k, b**k
    var = fa.var(ddof=1) / fa.size + fb.var(ddof=1) / fb.size
    if var == 0.0:
        return 0.0 if fa.mean() == fb.mean() else np.inf
    return float((fa.mean() - fb.mean()) / np.sqrt(var))


def two_sample_compare(
    sample_a: np.ndarray,
    sample_b: np.ndarray,
    z_max: float = 5.0,
    p_min: float = 1e-3,
    compress_tails: bool = False,
) -> TwoSampleVerdict:
    """Compare two samples marginal by marginal: z-tests on moments 1-4 and
    a two-sided KS test.  compress_tails applies arctan to both samples
    first, so heavy-tailed marginals keep finite moments.
    """
    a = np.atleast_2d(np.asarray(sample_a, dtype=float).T).T
    b = np.atleast_2d(np.asarray(sample_b, dtype=float).T).T
    if a.shape[1] != b.shape[1]:
        raise DomainError("samples must have the same number of marginals")
    warnings = []
    if min(a.shape[0], b.shape[0]) < 30:
        warnings.append("underpowered: fewer than 30 points in a sample")
    if compress_tails:
        a, b = np.arctan(a), np.arctan(b)
    k = a.shape[1]
    z = np.empty((k, 4))
    ks = np.empty(k)
    for i in range(k):
        for mom in range(1, 5):
            z[i, mom - 1] = _moment_z(a[:, i], b[:, i], mom)
        ks[i] = stats.ks_2samp(a[:, i], b[:, i]).pvalue
    ok = bool(np.all(np.abs(z) <= z_max) and np.all(ks >= p_min))
    return TwoSampleVerdict(ok=ok, z_scores=z, ks_pvalues=ks,
                            warnings=tuple(warnings))
