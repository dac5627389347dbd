"""Deterministic verification engine: nested tensor quadrature of the
single-layer kernels and small-n triangle integrals.

The interlacing domain, conditioned on the neighbouring fixed row, is a
product of segments, so each axis gets its own 1-D rule:

  * finite segments use Gauss-Jacobi nodes whose weight exponents absorb
    the integrable |x - edge|^(theta-1)-type endpoint singularities;
  * power-law tails are folded onto (0, 1) by a rational map whose residual
    endpoint exponent is again absorbed by a Jacobi weight;
  * exponential tails use Gauss-Laguerre beyond a Jacobi head panel;
  * Gaussian axes are truncated where the weight falls below exp(-cut).

All integrand evaluations happen in log space; each node carries a log
correction undoing whatever the rule's weight function absorbed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit, roots_genlaguerre, roots_jacobi

from .errors import AccuracyError, DivergentError, DomainError
from .integrands import (
    Family,
    SingleLayerKind,
    SingleLayerParams,
    UltraBetaParams,
    convergence_violations,
    log_single_layer_integrand_batch,
    log_ultra_integrand_batch,
    single_layer_window,
)
from .reports import EstimateReport

_TINY = 1e-300


@dataclass(frozen=True)
class QuadratureSpec:
    """Rule-size and tolerance knobs for the nested quadrature engine."""

    points: int = 48
    rtol: float = 1e-8
    refine: bool = True
    refine_factor: float = 1.45
    exp_cut: float = 40.0
    gauss_cut: float = 90.0
    strict: bool = False

    def __post_init__(self):
        if self.points < 4:
            raise ValueError("points must be >= 4")
        if not self.rtol > 0:
            raise ValueError("rtol must be > 0")


@dataclass(frozen=True)
class _Axis:
    """1-D rule: nodes x, positive weights w, and per-node log corrections."""

    x: np.ndarray
    w: np.ndarray
    logc: np.ndarray


def _jacobi_panel(lo: float, hi: float, e_lo: float, e_hi: float, points: int) -> _Axis:
    """Rule for int_lo^hi (x-lo)^e_lo (hi-x)^e_hi * smooth dx."""
    t, w = roots_jacobi(points, e_hi, e_lo)
    half = 0.5 * (hi - lo)
    x = lo + half * (t + 1.0)
    logc = math.log(half) - e_lo * np.log1p(t) - e_hi * np.log1p(-t)
    return _Axis(x, w, logc)


def _power_tail_panel(start: float, scale: float, decay: float, points: int) -> _Axis:
    """Rule for int_start^inf f dx with f ~ x^(-decay) up to slowly varying
    corrections.

    Mapped by x = start/t onto t in (0, 1) and integrated with a tanh-sinh
    rule: nested integrands carry tail expansions with non-integer exponent
    gaps, which a fixed Gauss-Jacobi weight cannot absorb, while tanh-sinh
    is root-exponentially accurate for any integrable endpoint exponents.
    """
    del scale, decay  # the rule needs neither; kept for interface symmetry
    # node range chosen so x reaches ~1e30 * start: decay exponents can be
    # as small as ~1.3, and the truncated mass must stay below tolerance
    t_min = 1e-30
    cap = math.asinh(2.0 / math.pi * math.log(1.0 / t_min))
    h = 2.0 * cap / (points - 1)
    u = -cap + h * np.arange(points)
    s = 0.5 * math.pi * np.sinh(u)
    # sigmoid form: 0.5*(1+tanh(s)) underflows to 0 once t < ~1e-16
    t = expit(2.0 * s)
    w = h * 0.25 * math.pi * np.cosh(u) / np.cosh(s) ** 2
    t = np.clip(t, t_min, 1.0 - 1e-16)
    x = start / t
    logc = math.log(start) - 2.0 * np.log(t)
    return _Axis(x, w, logc)


def _exp_tail_panel(start: float, rate: float, points: int) -> _Axis:
    """Rule for int_start^inf f dx with f ~ poly * exp(-rate*(x-start))."""
    z, w = roots_genlaguerre(points, 0.0)
    return _Axis(start + z / rate, w, z - math.log(rate))


def _mirror(axis: _Axis) -> _Axis:
    return _Axis(-axis.x, axis.w, axis.logc)


def _graded_cuts(lo: float, hi: float) -> list[float]:
    """Octave-graded panel boundaries for a finite segment.

    Integrand structure away from the endpoints lives on the scale
    max(1, |x|), so wide segments are cut at powers of two (plus the
    origin); narrow segments pick up no interior cuts at all.
    """
    cuts = set()
    if lo < 0.0 < hi:
        cuts.add(0.0)
    val = 0.25
    top = max(abs(lo), abs(hi))
    while val < top:
        if lo < val < hi:
            cuts.add(val)
        if lo < -val < hi:
            cuts.add(-val)
        val *= 2.0
    # keep interior cuts clear of the (possibly singular) endpoints: a cut
    # just inside an endpoint strands the endpoint singularity next to a
    # plain panel edge
    guard = 0.05 * min(1.0, hi - lo)
    return sorted({lo, hi, *(c for c in cuts if lo + guard < c < hi - guard)})


@dataclass(frozen=True)
class _AxisSpec:
    """What the 1-D rule for one axis must handle."""

    lo: float
    hi: float
    e_lo: float = 0.0
    e_hi: float = 0.0
    # tails: ("power", decay) / ("exp", rate) / ("gauss", rate); None = hard edge
    lo_tail: tuple | None = None
    hi_tail: tuple | None = None


def _build_axis(spec: _AxisSpec, q: QuadratureSpec) -> list[_Axis]:
    points = q.points
    lo, hi, panels = spec.lo, spec.hi, []
    if lo == -math.inf and hi == math.inf and (
        (spec.lo_tail and spec.lo_tail[0] != "gauss")
        or (spec.hi_tail and spec.hi_tail[0] != "gauss")
    ):
        left = _build_axis(_AxisSpec(-math.inf, 0.0, lo_tail=spec.lo_tail), q)
        right = _build_axis(_AxisSpec(0.0, math.inf, hi_tail=spec.hi_tail), q)
        return left + right
    if spec.hi_tail is not None and hi == math.inf:
        kind, rate = spec.hi_tail
        base = lo if lo != -math.inf else 0.0
        if kind == "power":
            cut = max(1.0, abs(base)) + 1.0
            panels.append(_jacobi_panel(base, base + cut, spec.e_lo, 0.0, points))
            panels.append(_power_tail_panel(base + cut, cut, rate, points))
            return panels
        if kind == "exp":
            cut = q.exp_cut / rate
            # grade the head so no single panel has to resolve both the
            # endpoint behaviour and many decay lengths of the exponential
            head = _graded_cuts(base, base + cut)
            for a, b in zip(head[:-1], head[1:]):
                panels.append(_jacobi_panel(a, b, spec.e_lo if a == base else 0.0, 0.0, points))
            panels.append(_exp_tail_panel(base + cut, rate, points))
            return panels
        hi = abs(base) + math.sqrt(2.0 * q.gauss_cut / rate)  # gauss truncation
    if spec.lo_tail is not None and lo == -math.inf:
        kind, rate = spec.lo_tail
        base = spec.hi if spec.hi != math.inf else 0.0
        if kind == "power":
            cut = max(1.0, abs(base)) + 1.0
            panels.append(_jacobi_panel(base - cut, base, 0.0, spec.e_hi, points))
            panels.append(_mirror(_power_tail_panel(-base + cut, cut, rate, points)))
            return panels
        if kind == "exp":
            cut = q.exp_cut / rate
            head = _graded_cuts(base - cut, base)
            for a, b in zip(head[:-1], head[1:]):
                panels.append(_jacobi_panel(a, b, 0.0, spec.e_hi if b == base else 0.0, points))
            panels.append(_mirror(_exp_tail_panel(-base + cut, rate, points)))
            return panels
        lo = -(abs(base) + math.sqrt(2.0 * q.gauss_cut / rate))
    if not lo < hi:
        raise DomainError(f"empty axis ({lo}, {hi})")
    width = hi - lo
    gauss_rate = None
    for tail in (spec.lo_tail, spec.hi_tail):
        if tail is not None and tail[0] == "gauss":
            gauss_rate = tail[1]
    if gauss_rate is not None and width > 8.0 / math.sqrt(gauss_rate):
        # wide truncated Gaussian segment: split so each panel resolves the bump
        n_panels = min(4, int(math.ceil(width * math.sqrt(gauss_rate) / 8.0)))
        cuts = [lo] + [lo + width * i / n_panels for i in range(1, n_panels)] + [hi]
        if lo < 0.0 < hi:  # align one cut with the bump centre
            # keep interior cuts clear of the (possibly singular) endpoints:
            # a cut just inside an endpoint strands the endpoint singularity
            # next to a plain panel edge
            guard = 0.05 * width
            interior = [c for c in {0.0, *cuts[1:-1]} if lo + guard < c < hi - guard]
            cuts = sorted({lo, hi, *interior})
        for a, b in zip(cuts[:-1], cuts[1:]):
            panels.append(
                _jacobi_panel(a, b, spec.e_lo if a == lo else 0.0, spec.e_hi if b == hi else 0.0, points)
            )
    else:
        cuts = _graded_cuts(lo, hi)
        for a, b in zip(cuts[:-1], cuts[1:]):
            panels.append(
                _jacobi_panel(
                    a, b,
                    spec.e_lo if a == lo else 0.0,
                    spec.e_hi if b == hi else 0.0,
                    points,
                )
            )
    return panels


def _concat(panels: list[_Axis]) -> _Axis:
    return _Axis(
        np.concatenate([p.x for p in panels]),
        np.concatenate([p.w for p in panels]),
        np.concatenate([p.logc for p in panels]),
    )


def _tensor_value(axes: list[_Axis], log_f, chunk: int = 1 << 19) -> complex:
    """sum over the tensor grid of prod(w) * exp(sum(logc) + log_f).

    The grid is streamed in slabs along the first axis to bound memory.
    """
    sub_grids = np.meshgrid(*[a.x for a in axes[1:]], indexing="ij")
    sub = (
        np.stack([g.ravel() for g in sub_grids], axis=-1)
        if sub_grids
        else np.zeros((1, 0))
    )
    sub_logw = np.zeros(sub.shape[0])
    for g in np.meshgrid(*[np.log(a.w) + a.logc for a in axes[1:]], indexing="ij"):
        sub_logw += g.ravel()
    first = axes[0]
    first_logw = np.log(first.w) + first.logc
    step = max(1, chunk // sub.shape[0])
    total = 0.0 + 0.0j
    for i in range(0, first.x.size, step):
        xs = first.x[i : i + step]
        c = xs.size
        var = np.concatenate(
            [np.repeat(xs, sub.shape[0])[:, None], np.tile(sub, (c, 1))], axis=1
        )
        logw = np.repeat(first_logw[i : i + step], sub.shape[0]) + np.tile(sub_logw, c)
        lf = np.asarray(log_f(var), dtype=complex)
        t = lf + logw
        t[~np.isfinite(t.real)] = -math.inf
        total += np.sum(np.exp(t))
    return complex(total)


# ---------------------------------------------------------------------------
# single-layer kernels


def _single_layer_axes(params: SingleLayerParams, fixed: np.ndarray) -> list[_AxisSpec]:
    k = params.kind
    th = [complex(t).real for t in params.theta]
    if k is SingleLayerKind.FIXED_OUTER:
        return [
            _AxisSpec(fixed[p], fixed[p + 1], th[p] - 1.0, th[p + 1] - 1.0)
            for p in range(fixed.size - 1)
        ]
    lo, hi = single_layer_window(params, fixed)
    s = complex(params.sigma).real if params.sigma is not None else None
    t = complex(params.tau).real if params.tau is not None else None
    psi = complex(params.psi).real if params.psi is not None else None
    ssum = sum(th)
    if k is SingleLayerKind.BETA_PRIME:
        first, last = s - 1.0, ("power", t - s - ssum + 1.0)
    elif k is SingleLayerKind.CAYLEY:
        first, last = ("power", s + t - ssum), ("power", s + t - ssum)
    elif k is SingleLayerKind.GAMMA:
        first, last = s - 1.0, ("exp", psi)
    elif k is SingleLayerKind.GAUSS:
        first, last = ("gauss", psi), ("gauss", psi)
    else:  # Interval
        first, last = s - 1.0, t - 1.0
    pts = [lo, *fixed, hi]
    axes = []
    for p in range(len(pts) - 1):
        e_lo = th[p - 1] - 1.0 if p > 0 else (first if not isinstance(first, tuple) else 0.0)
        e_hi = th[p] - 1.0 if p < len(pts) - 2 else (last if not isinstance(last, tuple) else 0.0)
        axes.append(
            _AxisSpec(
                pts[p],
                pts[p + 1],
                e_lo,
                e_hi,
                lo_tail=first if p == 0 and isinstance(first, tuple) else None,
                hi_tail=last if p == len(pts) - 2 and isinstance(last, tuple) else None,
            )
        )
    return axes


def _run_refined(compute, spec: QuadratureSpec, t0: float) -> EstimateReport:
    v1, n1 = compute(spec.points)
    if not spec.refine:
        return EstimateReport(v1, 0.0, n1, diagnostics={"points": spec.points, "refined": False})
    p2 = int(math.ceil(spec.points * spec.refine_factor)) + 1
    v2, n2 = compute(p2)
    err = abs(v2 - v1) / max(abs(v2), _TINY)
    if spec.strict and err > spec.rtol:
        raise AccuracyError(
            f"refinement stalled at relative error {err:.3e} > rtol {spec.rtol:.3e}",
            best_value=v2,
            error_estimate=err,
        )
    return EstimateReport(
        v2,
        err * abs(v2),
        n1 + n2,
        wall_time=time.perf_counter() - t0,
        diagnostics={"points": p2, "rel_err_estimate": err, "refined": True},
    )


def integrate_single_layer(
    params: SingleLayerParams, fixed, spec: QuadratureSpec | None = None
) -> EstimateReport:
    """Numeric value of one single-layer kernel over the interlacing domain."""
    spec = spec or QuadratureSpec()
    fixed = np.asarray(fixed, dtype=float)
    if np.any(np.diff(fixed) <= 0):
        raise DomainError("fixed row must be strictly increasing")
    n_var = fixed.size - 1 if params.kind is SingleLayerKind.FIXED_OUTER else fixed.size + 1
    if n_var > 4:
        raise DomainError("single-layer quadrature supports variable rows up to size 4")
    bad = params.convergence_violations()
    if bad:
        raise DivergentError("divergent parameters: " + "; ".join(bad))
    t0 = time.perf_counter()
    axis_specs = _single_layer_axes(params, fixed)

    def compute(points):
        q = replace(spec, points=points)
        axes = [_concat(_build_axis(a, q)) for a in axis_specs]
        val = _tensor_value(axes, lambda v: log_single_layer_integrand_batch(params, fixed, v))
        return val, int(np.prod([a.x.size for a in axes]))

    return _run_refined(compute, spec, t0)


# ---------------------------------------------------------------------------
# full triangle integrals


def _base_axis_spec(params: UltraBetaParams, k: int, prev: float | None) -> _AxisSpec:
    """Axis for the k-th base-row variable (1-indexed), nested above prev."""
    fam, n, m = params.family, params.n, params.m
    j = m
    lo, hi = params.domain_window()
    if prev is not None:
        lo = prev
    kap = complex(params.kappa).real if params.kappa is not None else 0.0
    if params.sigma is not None:
        if k == 1:
            e_lo = complex(params.sigma_j(j)).real - 1.0
        elif m == n:
            # base row is also the top row, so its two pair exponents add
            e_lo = 2.0 * kap
        else:
            e_lo = 2.0 * kap - 1.0
    if fam in (Family.BETA_PRIME, Family.TRAPEZOID):
        s = complex(params.sigma_j(j)).real
        t = complex(params.tau_j(j)).real
        if m == n:
            # tail regime: variables k..m grow together; r-1 inner
            # integrations and the pair factors set the effective decay
            r = m - k + 1
            decay = (
                r * (t + 1.0 - s)
                - kap * r * (r - 1.0)
                - 2.0 * kap * r * (k - 1)
                - (r - 1)
            )
        else:
            decay = t + 1.0 - s - (2 * m - 2) * kap if m > 1 else t + 1.0 - s
        return _AxisSpec(lo, hi, e_lo=e_lo, hi_tail=("power", decay))
    if fam is Family.GAMMA_CHAIN:
        return _AxisSpec(lo, hi, e_lo=e_lo, hi_tail=("exp", complex(params.psi_j(j)).real))
    if fam is Family.GAUSS_CHAIN:
        rate = complex(params.psi_j(j)).real
        return _AxisSpec(lo, hi, lo_tail=("gauss", rate), hi_tail=("gauss", rate))
    a, b = params.window
    return _AxisSpec(lo, b, e_lo=e_lo, e_hi=complex(params.tau_j(j)).real - 1.0)


def _inner_row_axes(params: UltraBetaParams, j: int, prev: np.ndarray) -> list[_AxisSpec]:
    """Axes for row j (size j) given the fixed row j-1 = prev."""
    fam, n = params.family, params.n
    lo, hi = params.domain_window()
    th = [complex(t).real for t in params.theta_row(j - 1)]
    s = complex(params.sigma_j(j)).real if params.sigma is not None else None
    t = complex(params.tau_j(j)).real if params.tau is not None else None
    if fam in (Family.BETA_PRIME, Family.TRAPEZOID):
        # effective exponents from the nested telescoping for non-top rows
        first = s - 1.0
        last = ("power", t + 1.0 - s - (sum(th) if j == n else params.theta_sum_below(j).real))
    elif fam is Family.GAMMA_CHAIN:
        first, last = s - 1.0, ("exp", complex(params.psi_j(j)).real)
    elif fam is Family.GAUSS_CHAIN:
        rate = complex(params.psi_j(j)).real
        first, last = ("gauss", rate), ("gauss", rate)
    elif fam is Family.INTERVAL_BETA:
        first, last = s - 1.0, t - 1.0
    else:  # Cayley
        decay = s + t - sum(th)
        first, last = ("power", decay), ("power", decay)
    pts = [lo, *prev, hi]
    axes = []
    for p in range(len(pts) - 1):
        e_lo = th[p - 1] - 1.0 if p > 0 else (first if not isinstance(first, tuple) else 0.0)
        e_hi = th[p] - 1.0 if p < len(pts) - 2 else (last if not isinstance(last, tuple) else 0.0)
        axes.append(
            _AxisSpec(
                pts[p],
                pts[p + 1],
                e_lo,
                e_hi,
                lo_tail=first if p == 0 and isinstance(first, tuple) else None,
                hi_tail=last if p == len(pts) - 2 and isinstance(last, tuple) else None,
            )
        )
    return axes


def integrate_ultra(params: UltraBetaParams, spec: QuadratureSpec | None = None) -> EstimateReport:
    """Nested quadrature of the full triangle/trapezoid integral, n <= 3.

    Rows are integrated base-row-outermost, top row innermost (vectorized).
    """
    spec = spec or QuadratureSpec()
    n, m = params.n, params.m
    if n * (n + 1) // 2 - m * (m - 1) // 2 > 6:
        raise DomainError("triangle quadrature supports total dimension <= 6")
    bad = convergence_violations(params)
    if bad:
        raise DivergentError("divergent parameters: " + "; ".join(bad))
    t0 = time.perf_counter()

    def compute(points):
        q = replace(spec, points=points)
        counter = [0]

        def base_rec(base_vals: list[float]):
            k = len(base_vals) + 1
            axis = _concat(
                _build_axis(_base_axis_spec(params, k, base_vals[-1] if base_vals else None), q)
            )
            if k == m == n:  # innermost base variable of a single-row integral
                def log_f(v):
                    counter[0] += v.shape[0]
                    row = np.concatenate(
                        [np.tile(base_vals, (v.shape[0], 1)), v], axis=1
                    ) if base_vals else v
                    return log_ultra_integrand_batch(params, [row])

                return _tensor_value([axis], log_f)
            total = 0.0 + 0.0j
            for x, w, c in zip(axis.x, axis.w, axis.logc):
                if k < m:
                    inner = base_rec(base_vals + [x])
                else:
                    inner = row_rec([np.asarray(base_vals + [x])])
                total += w * math.exp(c) * inner
            return total

        def row_rec(rows: list[np.ndarray]):
            j = m + len(rows)  # next row to integrate
            axes = [
                _concat(_build_axis(a, q)) for a in _inner_row_axes(params, j, rows[-1])
            ]
            if j == n:
                def log_f(v):
                    counter[0] += v.shape[0]
                    batch = [np.tile(r, (v.shape[0], 1)) for r in rows] + [v]
                    return log_ultra_integrand_batch(params, batch)

                return _tensor_value(axes, log_f)
            grids = np.meshgrid(*[a.x for a in axes], indexing="ij")
            var = np.stack([g.ravel() for g in grids], axis=-1)
            logw = np.zeros(var.shape[0])
            for g in np.meshgrid(*[np.log(a.w) + a.logc for a in axes], indexing="ij"):
                logw += g.ravel()
            total = 0.0 + 0.0j
            for i in range(var.shape[0]):
                total += math.exp(logw[i]) * row_rec(rows + [var[i]])
            return total

        val = base_rec([])
        return val, max(counter[0], 1)

    return _run_refined(compute, spec, t0)
