"""Batch command-line front end.

Reads a JSON parameter configuration, runs one of five commands, and emits a
machine-readable JSON report:

    qzeros <poly|zeros|verify|sweep|flow> --config cfg.json
           [--out report.json] [--seed 0] [--tol 1e-6] [--precision f64]

Report schema: {"command": str, "config": {...}, "checks":
[{"name", "value", "threshold", "pass"}], "pass": bool, "wall_time_s": float}.
Identical config and seed produce byte-identical reports apart from the
wall-time field. Exit codes: 0 all checks pass, 1 a mathematical check failed,
2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from typing import List, Sequence, Tuple

import numpy as np

from . import flow as zero_flow
from . import isospectral, params as params_mod, qdiff, qseries, rootfind, zero_algebra
from .errors import (
    CollisionDetected,
    ConfigError,
    DegenerateZeros,
    InvalidDegree,
    NoConvergence,
    NonGenericParameter,
    QZerosError,
)
from .params import ParamSet
from .precision import F64, get_context

CONFIG_FIELDS = {"r", "s", "N", "q", "alpha", "beta", "sweep_k", "t_end", "perturb"}

DEFAULT_THRESHOLDS = {
    "prefactor_gap": 1e-12,
    "companion_gap": 1e-7,
    "max_residual": 1e-8,
    "reconstruction_gap": 1e-8,
    "qde_residual_max": 1e-9,
    "qde_expanded_agreement_max": 1e-10,
    "prop1_residual_max": 1e-8,
    "prop1_dual_gap": 1e-10,
    "spectrum_gap_max": 1e-6,
    "trace_gap_p1": 1e-6,
    "trace_gap_p2": 1e-6,
    "trace_gap_p3": 1e-6,
    "closed_trace_gap": 1e-8,
    "det_gap": 1e-6,
    "jacobian_defect": 1e-5,
    "spectrum_drift_max": 1e-6,
    "matrix_drift_min": 1e-3,
    "equilibrium_residual": 1e-8,
    "endpoint_drift": 1e-8,
    "no_collision": 0.5,
}

QDE_SAMPLE_COUNT = 20
SWEEP_DEFAULT_K = 8
SWEEP_REDRAW_LIMIT = 100
FLOW_SAMPLES = 100


def _as_complex(value, field: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"field '{field}' must be a number or a [re, im] pair, got {value!r}")


def _as_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field '{field}' must be an integer, got {value!r}")
    return value


def _as_real(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{field}' must be a real number, got {value!r}")
    return float(value)


def load_config(path: str) -> Tuple[dict, ParamSet, dict]:
    """Parse and validate a run configuration; returns (raw echo, params, options)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config '{path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config '{path}' is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = sorted(set(raw) - CONFIG_FIELDS)
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
    for field in ("r", "s", "N", "q", "alpha", "beta"):
        if field not in raw:
            raise ConfigError(f"missing required config field '{field}'")
    r = _as_int(raw["r"], "r")
    s = _as_int(raw["s"], "s")
    N = _as_int(raw["N"], "N")
    for field in ("alpha", "beta"):
        if not isinstance(raw[field], list):
            raise ConfigError(f"field '{field}' must be a list")
    alpha = tuple(_as_complex(v, f"alpha[{i}]") for i, v in enumerate(raw["alpha"]))
    beta = tuple(_as_complex(v, f"beta[{i}]") for i, v in enumerate(raw["beta"]))
    if len(alpha) != r or len(beta) != s:
        raise ConfigError(
            f"alpha must have r = {r} entries and beta s = {s}, "
            f"got {len(alpha)} and {len(beta)}"
        )
    params = params_mod.validate(
        ParamSet(r=r, s=s, N=N, q=_as_complex(raw["q"], "q"), alpha=alpha, beta=beta)
    )
    options = {
        "sweep_k": _as_int(raw["sweep_k"], "sweep_k") if "sweep_k" in raw else SWEEP_DEFAULT_K,
        "t_end": _as_real(raw["t_end"], "t_end") if "t_end" in raw else 1.0,
        "perturb": _as_real(raw["perturb"], "perturb") if "perturb" in raw else 0.0,
    }
    if options["sweep_k"] < 0:
        raise ConfigError(f"sweep_k must be nonnegative, got {options['sweep_k']}")
    return raw, params, options


def _pair(z) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def _check(name: str, value: float, tol_override, direction: str = "below") -> dict:
    threshold = DEFAULT_THRESHOLDS[name] if tol_override is None else tol_override
    value = float(value)
    ok = value <= threshold if direction == "below" else value >= threshold
    return {"name": name, "value": value, "threshold": float(threshold), "pass": bool(ok)}


def _monic(params: ParamSet, ctx) -> qseries.Poly:
    return qseries.to_monic(qseries.coeffs_P(params, ctx))


def cmd_poly(params: ParamSet, options: dict, tol, rng, ctx) -> Tuple[List[dict], dict]:
    p = qseries.coeffs_P(params, ctx)
    monic = qseries.to_monic(p)
    lead = ctx.to_complex(p.coeffs[-1])
    prefactor = complex(qseries.monic_prefactor(params))
    checks = [_check("prefactor_gap", abs(prefactor * lead - 1), tol)]
    result = {
        "P_coeffs": [_pair(ctx.to_complex(c)) for c in p.coeffs],
        "p_coeffs": [_pair(ctx.to_complex(c)) for c in monic.coeffs],
    }
    return checks, result


def cmd_zeros(params: ParamSet, options: dict, tol, rng, ctx) -> Tuple[List[dict], dict]:
    monic = _monic(params, ctx)
    zset = rootfind.find_zeros(monic, params, ctx)
    companions = rootfind.companion_zeros(monic, ctx)
    gap = 0.0
    for a, b in zip(zset.zeros, companions):
        a, b = ctx.to_complex(a), ctx.to_complex(b)
        gap = max(gap, abs(a - b) / max(1.0, abs(b)))
    recon = [1 + 0j]
    for z in zset.zeros:
        zc = ctx.to_complex(z)
        recon = [0j] + recon
        for i in range(len(recon) - 1):
            recon[i] = recon[i] - zc * recon[i + 1]
    recon_gap = max(
        abs(rc - ctx.to_complex(mc)) / max(1.0, abs(rc))
        for rc, mc in zip(recon, monic.coeffs)
    )
    checks = [
        _check("companion_gap", gap, tol),
        _check("max_residual", zset.max_residual, tol),
        _check("reconstruction_gap", recon_gap, tol),
    ]
    result = {
        "zeros": [_pair(ctx.to_complex(z)) for z in zset.zeros],
        "min_separation": float(zset.min_separation),
    }
    return checks, result


def _sample_points(zeros, rng, count: int = QDE_SAMPLE_COUNT) -> List[complex]:
    scale = max(1.0, max(abs(complex(z)) for z in zeros))
    radii = rng.uniform(0.3, 1.7, size=count)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=count)
    return [scale * rho * complex(np.cos(th), np.sin(th)) for rho, th in zip(radii, phases)]


def _jacobian_defect(params: ParamSet, zeros, M: isospectral.IsoMatrix) -> float:
    jac = zero_flow.jacobian_fd(params, zeros)
    worst = 0.0
    for i in range(M.n):
        for j in range(M.n):
            a = complex(jac[i][j])
            b = complex(M.entries[i][j])
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    return worst


def cmd_verify(params: ParamSet, options: dict, tol, rng, ctx) -> Tuple[List[dict], dict]:
    monic = _monic(params, ctx)
    zset = rootfind.find_zeros(monic, params, ctx)
    zeros = zset.zeros

    points = [ctx.make(z.real, z.imag) for z in _sample_points(zeros, rng)]
    checks = [
        _check(
            "qde_residual_max",
            max(abs(v) for v in qdiff.qde_residual(monic, params, points)),
            tol,
        ),
        _check(
            "qde_expanded_agreement_max",
            max(qdiff.qde_expanded_agreement(monic, params, points)),
            tol,
        ),
        _check("prop1_residual_max", max(zero_algebra.prop1_residuals(zeros, params)), tol),
        _check("prop1_dual_gap", _prop1_dual_gap(zeros, params, monic, ctx), tol),
    ]

    _, M, lam = isospectral.certified_spectrum(params, ctx)
    mus = isospectral.mu_closed(params, ctx)
    report = isospectral.match_spectrum(lam, mus)
    checks.append(
        _check("spectrum_gap_max", max(rel for _, _, _, rel in report.matched_pairs), tol)
    )
    mu_c = [complex(m) for m in mus]
    for p in (1, 2, 3):
        target = sum(m**p for m in mu_c)
        gap = abs(complex(isospectral.matrix_power_trace(M, p)) - target) / max(1.0, abs(target))
        checks.append(_check(f"trace_gap_p{p}", gap, tol))
    tr_closed = complex(isospectral.closed_trace(params))
    tr_matrix = complex(isospectral.matrix_power_trace(M, 1))
    checks.append(
        _check("closed_trace_gap", abs(tr_matrix - tr_closed) / max(1.0, abs(tr_closed)), tol)
    )
    checks.append(_check("det_gap", isospectral.logdet_gap(M, mus), tol))
    checks.append(_check("jacobian_defect", _jacobian_defect(params, zeros, M), tol))

    result = {
        "zeros": [_pair(ctx.to_complex(z)) for z in zeros],
        "mu_closed": [_pair(m) for m in mu_c],
        "matched_pairs": [
            [_pair(lam), _pair(mu), float(rel)]
            for lam, mu, _absgap, rel in report.matched_pairs
        ],
    }
    return checks, result


def _prop1_dual_gap(zeros, params: ParamSet, monic: qseries.Poly, ctx) -> float:
    prod_form = zero_algebra.prop1_residuals(zeros, params)
    qde_form = zero_algebra.prop1_residuals_qde(zeros, params, monic, ctx)
    return max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(prod_form, qde_form))


def _matrix_inf_norm(rows) -> float:
    return max(sum(abs(complex(v)) for v in row) for row in rows)


def cmd_sweep(params: ParamSet, options: dict, tol, rng, ctx) -> Tuple[List[dict], dict]:
    k = options["sweep_k"]
    if params.s == 0:
        return [], {"note": "no β parameters", "perturbations": 0}
    if k == 0:
        return [], {"note": "empty sweep", "perturbations": 0}
    monic = _monic(params, ctx)
    zeros = rootfind.find_zeros(monic, params, ctx).zeros
    M_base = isospectral.build_M(zeros, params)
    mus = isospectral.mu_closed(params, ctx)
    base_norm = _matrix_inf_norm(M_base.entries)

    drift_max = 0.0
    matrix_drift_min = float("inf")
    factors_used = []
    for _ in range(k):
        pert = None
        for _attempt in range(SWEEP_REDRAW_LIMIT):
            factors = rng.uniform(0.5, 2.0, size=params.s)
            candidate = ParamSet(
                r=params.r,
                s=params.s,
                N=params.N,
                q=params.q,
                alpha=params.alpha,
                beta=tuple(b * f for b, f in zip(params.beta, factors)),
            )
            try:
                pert = params_mod.validate(candidate)
            except NonGenericParameter:
                continue
            factors_used.append([float(f) for f in factors])
            break
        if pert is None:
            raise ConfigError(
                f"could not draw a generic β perturbation in {SWEEP_REDRAW_LIMIT} tries"
            )
        _zeros_p, M_p, lam_p = isospectral.certified_spectrum(pert, ctx)
        report = isospectral.match_spectrum(lam_p, mus)
        drift_max = max(drift_max, max(rel for _, _, _, rel in report.matched_pairs))
        delta = [
            [complex(a) - complex(b) for a, b in zip(row_p, row_b)]
            for row_p, row_b in zip(M_p.entries, M_base.entries)
        ]
        matrix_drift_min = min(matrix_drift_min, _matrix_inf_norm(delta) / base_norm)

    checks = [
        _check("spectrum_drift_max", drift_max, tol),
        _check("matrix_drift_min", matrix_drift_min, tol, direction="above"),
    ]
    result = {"perturbations": k, "beta_factors": factors_used}
    return checks, result


def cmd_flow(
    params: ParamSet, options: dict, tol, rng, ctx, traj_path: str | None = None
) -> Tuple[List[dict], dict]:
    monic = _monic(params, ctx)
    zset = rootfind.find_zeros(monic, params, ctx)
    zeta = [ctx.to_complex(z) for z in zset.zeros]
    t_end = options["t_end"]
    perturb = options["perturb"]

    z0 = list(zeta)
    if perturb != 0.0:
        phases = rng.uniform(0.0, 2.0 * np.pi, size=params.N)
        z0 = [
            z * (1 + perturb * complex(np.cos(th), np.sin(th)))
            for z, th in zip(zeta, phases)
        ]

    checks = [_check("equilibrium_residual", zero_flow.equilibrium_residual(zeta, params), tol)]
    M = isospectral.build_M(tuple(zeta), params)
    checks.append(_check("jacobian_defect", _jacobian_defect(params, tuple(zeta), M), tol))

    dt_max = abs(t_end) / FLOW_SAMPLES if t_end != 0.0 else 1.0
    try:
        states = zero_flow.integrate_flow(params, tuple(z0), t_end, dt_max)
    except CollisionDetected as exc:
        checks.append(
            {"name": "no_collision", "value": 1.0, "threshold": 0.5, "pass": False}
        )
        return checks, {"error": str(exc)}

    if perturb == 0.0:
        drift = max(
            abs(z - z_ref) / max(1.0, abs(z_ref))
            for state in states
            for z, z_ref in zip(state.z, zeta)
        )
        checks.append(_check("endpoint_drift", drift, tol))

    if traj_path is not None:
        header = ["t"]
        for n in range(1, params.N + 1):
            header += [f"re_z{n}", f"im_z{n}"]
        with open(traj_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for state in states:
                row = [repr(float(state.t))]
                for z in state.z:
                    zc = complex(z)
                    row += [repr(zc.real), repr(zc.imag)]
                writer.writerow(row)

    result = {
        "t_end": float(t_end),
        "samples": len(states),
        "final_z": [_pair(z) for z in states[-1].z],
    }
    return checks, result


COMMANDS = {
    "poly": cmd_poly,
    "zeros": cmd_zeros,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "flow": cmd_flow,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qzeros",
        description="numerical checks for zeros of generalized basic hypergeometric polynomials",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to JSON run configuration")
        p.add_argument("--out", default=None, help="report path (default: stdout)")
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
        p.add_argument(
            "--tol", type=float, default=None, help="override every check threshold"
        )
        p.add_argument(
            "--precision", choices=("f64", "extended"), default="f64",
            help="arithmetic for the core computations",
        )
        if name == "flow":
            p.add_argument("--traj", default=None, help="trajectory CSV path")
    return parser


def _write_report(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        raw, params, options = load_config(args.config)
        ctx = get_context(args.precision)
        rng = np.random.default_rng(args.seed)
        if args.command == "flow":
            checks, result = cmd_flow(params, options, args.tol, rng, ctx, args.traj)
        else:
            checks, result = COMMANDS[args.command](params, options, args.tol, rng, ctx)
    except (ConfigError, NonGenericParameter, InvalidDegree) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateZeros, NoConvergence, QZerosError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    report = {
        "command": args.command,
        "config": raw,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
        "result": result,
        "wall_time_s": time.perf_counter() - started,
    }
    try:
        _write_report(report, args.out)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return 2
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
