"""Command-line verification driver.

Subcommands: verify (numeric integral vs Gamma-product closed form, or the
one-dimensional-family cross-check via --selberg), sample (NDJSON triangle
stream), projectivity (erase-top-row consistency of the chain measures),
corners (matrix ensembles vs chain samplers).  Reports are JSON objects
{"command", "pass", "details"}; exit status is 0 iff every check passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import UltraBetaError
from .integrands import (
    COMPLEX,
    QUATERNION,
    REAL,
    Family,
    UltraBetaParams,
    log_closed_form,
    log_selberg_rhs,
)
from .montecarlo import default_proposal, mc_integrate, two_sample_compare
from .quadrature import QuadratureSpec, integrate_ultra
from .sampler import CHAIN_FAMILIES, ChainSpec, sample_rows

DEFAULT_SEED = 20260826
_FIELDS = {"R": REAL, "C": COMPLEX, "H": QUATERNION}


def default_chain(family: Family, n: int) -> ChainSpec:
    """A safely convergent chain of the given family and depth."""
    theta = tuple(tuple(1.0 for _ in range(j)) for j in range(1, n))
    if family is Family.GAUSS_CHAIN:
        return ChainSpec(family, n, theta=theta, psi=(1.0,) * n)
    if family is Family.GAMMA_CHAIN:
        return ChainSpec(family, n, sigma=tuple(2.0 + j for j in range(n)),
                         theta=theta, psi=(1.0,) * n)
    if family is Family.BETA_PRIME:
        sigma = tuple(2.0 + j for j in range(n))
        tau = tuple(sigma[j] + j + 3.0 for j in range(n))
        return ChainSpec(family, n, sigma=sigma, tau=tau, theta=theta)
    if family is Family.CAYLEY:
        sigma = tuple(1.5 + j + 0.3j for j in range(1, n + 1))
        return ChainSpec(family, n, sigma=sigma, theta=theta)
    raise UltraBetaError(f"no sampleable chain for family {family.value}")


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, default=str)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _histogram_csv(samples: np.ndarray, path: str, bins: int = 60) -> None:
    lines = ["marginal,bin_left,bin_right,count"]
    for i in range(samples.shape[1]):
        counts, edges = np.histogram(samples[:, i], bins=bins)
        lines += [
            f"{i},{edges[k]:.8g},{edges[k + 1]:.8g},{counts[k]}"
            for k in range(bins)
        ]
    Path(path).write_text("\n".join(lines) + "\n")


def _flatten(rows: list[np.ndarray]) -> np.ndarray:
    return np.concatenate([np.asarray(r, dtype=float) for r in rows], axis=1)


def _chain_from_args(args) -> ChainSpec:
    if args.params:
        params = UltraBetaParams.from_json(Path(args.params).read_text())
        return default_proposal(params)
    if not args.family:
        raise UltraBetaError("need --family or --params")
    return default_chain(Family(args.family), args.n)


def cmd_verify(args) -> dict:
    if args.selberg:
        sigma, tau, theta = args.sigma, args.tau, args.theta
        params = UltraBetaParams(
            Family.TRAPEZOID,
            args.n,
            m=args.n,
            sigma=(sigma,),
            tau=(tau,),
            kappa=theta,
        )
        rhs = np.exp(log_selberg_rhs(args.n, sigma, tau, theta))
    else:
        if not args.params:
            raise UltraBetaError("verify needs a parameter file or --selberg")
        params = UltraBetaParams.from_json(Path(args.params).read_text())
        rhs = np.exp(log_closed_form(params))
    dim = sum(range(params.m, params.n + 1))
    if dim <= 6:
        est = integrate_ultra(params, QuadratureSpec(rtol=args.tol))
        se = abs(est.value) * est.diagnostics.get("rel_err_estimate", 0.0)
        method = "quadrature"
    else:
        est = mc_integrate(params, args.samples, seed=args.seed, workers=args.workers)
        se = est.standard_error
        method = "montecarlo"
    rel = abs(est.value - rhs) / abs(rhs)
    passed = rel < args.tol if method == "quadrature" else (
        abs(est.value - rhs) < 3.0 * max(se, 1e-300) or rel < args.tol
    )
    return {
        "command": "verify",
        "pass": bool(passed),
        "details": {
            "method": method,
            "value": float(np.real(est.value)),
            "closed_form": float(np.real(rhs)),
            "rel_error": float(rel),
            "se": float(se),
            "report": est.to_dict(),
        },
    }


def cmd_sample(args) -> dict:
    spec = _chain_from_args(args)
    rows = sample_rows(spec, args.samples, args.seed)
    lines = []
    for i in range(args.samples):
        tri = [[float(x) for x in r[i]] for r in rows]
        lines.append(json.dumps({"rows": tri}))
    stream = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(stream)
    else:
        sys.stdout.write(stream)
    if args.emit_csv:
        _histogram_csv(_flatten(rows), args.emit_csv)
    return {
        "command": "sample",
        "pass": True,
        "details": {"family": spec.family.value, "n": spec.n,
                    "count": args.samples, "seed": args.seed,
                    "out": args.out or "stdout"},
    }


def cmd_projectivity(args) -> dict:
    spec = _chain_from_args(args)
    if spec.n < 2:
        raise UltraBetaError("projectivity needs depth >= 2")
    deep = sample_rows(spec, args.samples, args.seed)
    shallow = sample_rows(spec.truncate(spec.n - 1), args.samples, args.seed + 1)
    heavy = spec.family is not Family.GAUSS_CHAIN
    verdict = two_sample_compare(
        _flatten(deep[:-1]), _flatten(shallow),
        z_max=4.0, p_min=1e-3, compress_tails=heavy,
    )
    if args.emit_csv:
        _histogram_csv(np.arctan(_flatten(deep[:-1])) if heavy else _flatten(deep[:-1]),
                       args.emit_csv)
    return {
        "command": "projectivity",
        "pass": verdict.ok,
        "details": {
            "family": spec.family.value,
            "depth": spec.n,
            "samples": args.samples,
            "max_abs_z": float(np.max(np.abs(verdict.z_scores))),
            "min_ks_p": float(verdict.ks_pvalues.min()),
            "summary": verdict.summary(),
        },
    }


def cmd_corners(args) -> dict:
    from .matrixcheck import corners_vs_chain

    field = _FIELDS[args.field]
    verdict = corners_vs_chain(
        field, args.n, args.m, args.psi, args.samples, seed=args.seed
    )
    return {
        "command": "corners",
        "pass": verdict.ok,
        "details": {
            "field": args.field,
            "n": args.n,
            "m": args.m,
            "samples": args.samples,
            "max_abs_z": float(np.max(np.abs(verdict.z_scores))),
            "min_ks_p": float(verdict.ks_pvalues.min()),
            "summary": verdict.summary(),
        },
    }


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=[f.value for f in CHAIN_FAMILIES])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--emit-csv", dest="emit_csv")
    p.add_argument("--params", help="parameter file in the integrands JSON schema")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ultrabeta")
    sub = ap.add_subparsers(dest="command", required=True)
    pv = sub.add_parser("verify", help="numeric integral vs closed form")
    _add_common(pv)
    pv.add_argument("--selberg", action="store_true")
    pv.add_argument("--theta", type=float, default=1.0)
    pv.add_argument("--sigma", type=float, default=1.0)
    pv.add_argument("--tau", type=float, default=4.0)
    for name, help_text in (
        ("sample", "stream triangles as NDJSON"),
        ("projectivity", "erased-top-row law vs shallower chain"),
    ):
        _add_common(sub.add_parser(name, help=help_text))
    pc = sub.add_parser("corners", help="matrix corner spectra vs chain")
    _add_common(pc)
    pc.add_argument("--field", choices=["R", "C", "H"], default="C")
    pc.add_argument("--m", type=int, default=None)
    pc.add_argument("--psi", type=float, default=1.0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "verify": cmd_verify,
        "sample": cmd_sample,
        "projectivity": cmd_projectivity,
        "corners": cmd_corners,
    }
    try:
        report = handlers[args.command](args)
    except UltraBetaError as exc:
        _emit({"command": args.command, "pass": False,
               "details": {"error": str(exc)}}, getattr(args, "out", None))
        return 2
    _emit(report, args.out if args.command != "sample" else None)
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
