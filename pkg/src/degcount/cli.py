"""Command-line front end: exact counts, estimates, saddle diagnostics,
factorization verification, box-integral evaluation, chain sampling, and the
validation harness.

Reports are JSON by default (sorted keys, stable schema "degcount-report/1"),
so an identical run configuration, seed included, reproduces byte-identical
output; `count` alone carries a wall-clock field and only in JSON mode.  CSV
is a flattened terms-only view.  Vertices are 1-indexed in all files.

Exit codes: 0 success, 1 failed validation, 2 input errors (with
line-numbered diagnostics where applicable).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass

from .graphcore import (
    DegreeSequence,
    ForbiddenGraph,
    InputFormatError,
    compute_parameters,
    read_degrees,
    read_edges,
)
from . import asymptotics, exactcount, mcsampler, mvintegral, saddle, validation

SCHEMA = "degcount-report/1"
DEFAULT_SEED = mcsampler.DEFAULT_SEED

FORMULAS = ("naive", "dense", "miss", "hit", "num", "flat", "reg", "induced",
            "lambda-model", "overlap", "perth", "mckay81", "matchings",
            "cycles", "sptrees")


@dataclass(frozen=True)
class RunConfig:
    """One resolved CLI invocation; equal configs produce identical reports."""

    subcommand: str
    args: argparse.Namespace


def _env_seed() -> int:
    raw = os.environ.get("DEGCOUNT_SEED")
    return int(raw) if raw else DEFAULT_SEED


def _env_threads() -> int:
    raw = os.environ.get("DEGCOUNT_THREADS")
    return int(raw) if raw else 1


def _emit(out, payload: dict, fmt: str) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    elif fmt == "csv":
        for key, value in _flatten(payload):
            out.write(f"{key},{value}\n")
    else:
        for key, value in _flatten(payload):
            out.write(f"{key} = {value}\n")


def _flatten(obj, prefix=""):
    rows = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            rows.extend(_flatten(obj[key], f"{prefix}{key}."))
    elif isinstance(obj, (list, tuple)):
        for i, item in enumerate(obj):
            rows.extend(_flatten(item, f"{prefix}{i}."))
    else:
        rows.append((prefix[:-1], obj))
    return rows


def _estimate_payload(est: asymptotics.LogEstimate) -> dict:
    return {
        "logValue": est.log_value,
        "baseLog": est.base_log,
        "correction": est.correction,
        "errorOrder": est.error_order,
        "terms": [{"name": name, "value": value} for name, value in est.terms],
    }


def _load_instance(args) -> tuple[DegreeSequence, ForbiddenGraph]:
    d = read_degrees(args.degrees)
    X = read_edges(args.forbidden, d.n) if args.forbidden else ForbiddenGraph.empty(d.n)
    return d, X


def _cmd_count(args, out) -> int:
    d, X = _load_instance(args)
    t0 = time.perf_counter()
    count = exactcount.exact_count(d, X, limit=args.limit)
    elapsed = time.perf_counter() - t0
    if args.format == "json":
        _emit(out, {"schema": SCHEMA, "subcommand": "count", "n": d.n,
                    "count": count, "elapsed": elapsed, "scale": "linear"}, "json")
    else:
        out.write(f"{count}\n")
    return 0


def _cmd_estimate(args, out) -> int:
    formula = args.formula
    payload: dict = {"schema": SCHEMA, "subcommand": "estimate", "formula": formula,
                     "scale": "log", "validity": []}

    if formula in ("matchings", "cycles", "sptrees"):
        if args.degrees:
            d = read_degrees(args.degrees)
            if not d.is_regular():
                raise InputFormatError("regular-graph formulas need constant degrees",
                                       args.degrees)
            n, dv = d.n, d.degrees[0]
        elif args.n is not None and args.d is not None:
            n, dv = args.n, args.d
        else:
            raise InputFormatError("provide --degrees or both --n and --d")
        est = asymptotics.regular_graph_expectations(n, dv, formula, q=args.q)
        payload.update(_estimate_payload(est))
        _emit(out, payload, args.format)
        return 0

    if not args.degrees:
        raise InputFormatError(f"formula {formula} needs --degrees")
    if formula in ("induced", "lambda-model") and args.m is None:
        raise InputFormatError(f"formula {formula} needs --m")
    d, X = _load_instance(args)
    if formula == "naive":
        p = compute_parameters(d, X)
        est = asymptotics.naive_estimate(p, d, X)
        payload.update(_estimate_payload(est))
    elif formula == "dense":
        est, report = asymptotics.dense_count_estimate(d, X, a=args.a, b=args.b)
        payload.update(_estimate_payload(est))
        payload["validity"] = [
            {"hypothesis": f.hypothesis, "measured": f.measured, "bound": f.bound}
            for f in report.flags]
    elif formula in ("miss", "hit", "num"):
        est = asymptotics.miss_hit_estimate(d, X, b=args.b)[formula]
        payload.update(_estimate_payload(est))
    elif formula in ("flat", "reg"):
        triple = asymptotics.specialized_estimates(d, X, formula, b=args.b)
        payload.update({key: _estimate_payload(val) for key, val in triple.items()})
    elif formula == "induced":
        est = asymptotics.induced_estimate(d, X, args.m, model=args.model, b=args.b)
        payload.update(_estimate_payload(est))
    elif formula == "lambda-model":
        est = asymptotics.induced_estimate(d, X, args.m, model="lambdaModel", b=args.b)
        payload.update(_estimate_payload(est))
    elif formula == "overlap":
        if args.k is None:
            raise InputFormatError("overlap needs --k")
        prob = asymptotics.overlap_distribution_estimate(d, X, args.k)
        payload.update({"probability": prob, "k": args.k, "scale": "linear"})
    elif formula in ("perth", "mckay81"):
        est = asymptotics.sparse_estimates(d, X, formula)
        payload.update(_estimate_payload(est))
    else:  # pragma: no cover - argparse restricts choices
        raise InputFormatError(f"unknown formula {formula}")
    _emit(out, payload, args.format)
    return 0


def _cmd_saddle(args, out) -> int:
    d, X = _load_instance(args)
    sp = saddle.solve_saddle(d, X, mode=args.mode, tol=args.tol, max_iter=args.max_iter)
    ln_p = saddle.log_prefactor(sp, d, X)
    payload = {
        "schema": SCHEMA, "subcommand": "saddle", "mode": sp.mode,
        "a": list(sp.a), "radii": list(sp.radii),
        "residualMax": sp.max_residual, "iterations": sp.iterations,
        "converged": sp.converged, "logPrefactor": ln_p, "scale": "log",
    }
    if args.format == "text":
        for j, (aj, rj) in enumerate(zip(sp.a, sp.radii), start=1):
            out.write(f"a_{j} = {aj:.15g}   r_{j} = {rj:.15g}\n")
        out.write(f"residual max = {sp.max_residual:.3e}  iterations = {sp.iterations}\n")
        out.write(f"ln P = {ln_p:.15g}\n")
    else:
        _emit(out, payload, args.format)
    return 0


def _cmd_verify_start(args, out) -> int:
    if args.degrees:
        d, X = _load_instance(args)
        lam = 2 * d.edge_count / (d.n * (d.n - 1))
        if 0.0 < lam < 1.0:
            try:
                sp = saddle.solve_saddle(d, X, mode="fixed")
            except (saddle.SaddlePoleError, ValueError):
                sp = saddle.fixed_radii_point(d, X)
        else:
            sp = saddle.fixed_radii_point(d, X)
        I = saddle.integral_quadrature(sp, d, X)
        P = math.exp(saddle.log_prefactor(sp, d, X))
        G = exactcount.exact_count(d, X)
        err = abs(P * I.real - G) / G if G else abs(P * I.real)
        ok = err < 1e-6
        _emit(out, {"schema": SCHEMA, "subcommand": "verify-start",
                    "count": G, "product": P * I.real, "imag": I.imag,
                    "relError": err, "passed": ok, "scale": "linear"}, args.format)
        return 0 if ok else 1
    result = validation.check_contour_factorization(ns=tuple(range(3, args.n_max + 1)))
    out.write(result.line() + "\n")
    return 0 if result.passed else 1


def _cmd_mw3(args, out) -> int:
    with open(args.coefficients, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        coeffs = mvintegral.CoefficientSet.from_dict(doc)
    except (KeyError, ValueError) as exc:
        raise InputFormatError(str(exc), args.coefficients) from exc
    t1 = mvintegral.theta1(coeffs)
    zf = mvintegral.z_factor(coeffs)
    res = mvintegral.mc_box_integral(coeffs, samples=args.samples, seed=args.seed)
    payload = {
        "schema": SCHEMA, "subcommand": "mw3",
        "theta1": [t1.real, t1.imag], "zFactor": zf,
        "mc": {"mean": [res.mean.real, res.mean.imag], "stderr": res.stderr,
               "samples": res.samples, "seed": res.seed,
               "acceptanceRate": res.acceptance_rate, "boxMass": res.box_mass},
        "scale": {"theta1": "log-correction", "zFactor": "linear", "mc.mean": "linear"},
    }
    _emit(out, payload, args.format)
    return 0


def _cmd_sample(args, out) -> int:
    d, X = _load_instance(args)
    cfg = mcsampler.SampleConfig(samples=args.samples, burn_in=args.burn_in,
                                 thinning=args.thinning, seed=args.seed)
    est = mcsampler.estimate_probability(d, X, args.mode, cfg, m=args.m)
    if args.dump_graph:
        g = mcsampler.realize(d)
        with open(args.dump_graph, "w", encoding="utf-8") as fh:
            for j, k in g.edge_list():
                fh.write(f"{j} {k}\n")
    payload = {
        "schema": SCHEMA, "subcommand": "sample", "mode": args.mode,
        "mean": est.mean, "stderr": est.stderr, "samples": est.samples,
        "burnIn": est.burn_in, "thinning": est.thinning, "seed": est.seed,
        "scale": "linear",
    }
    _emit(out, payload, args.format)
    return 0


def _cmd_validate(args, out) -> int:
    results = validation.run_suite(args.suite, threads=args.threads)
    if args.format == "json":
        payload = {
            "schema": SCHEMA, "subcommand": "validate", "suite": args.suite,
            "results": [{"name": r.name, "passed": r.passed, "detail": r.detail,
                         "measured": r.measured} for r in results],
            "passed": all(r.passed for r in results),
        }
        _emit(out, payload, "json")
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            out.write(f"{r.name:<{width}}  {status}  {r.detail}\n")
        out.write("suite result: "
                  + ("PASS" if all(r.passed for r in results) else "FAIL") + "\n")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degcount",
        description="Counting and probability estimates for graphs with "
                    "prescribed degrees avoiding a forbidden subgraph.")
    parser.add_argument("--format", choices=("json", "csv", "text"), default="json",
                        help="report format (default json)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_instance(p, forbidden_help="forbidden graph edge list (1-indexed 'j k' lines)"):
        p.add_argument("--degrees", required=True,
                       help="degree file: one integer per line or a JSON array")
        p.add_argument("--forbidden", help=forbidden_help)

    p = sub.add_parser("count", help="exact count")
    add_instance(p)
    p.add_argument("--limit", type=int, help="override the exact-count size limit")

    p = sub.add_parser("estimate", help="closed-form estimates")
    p.add_argument("--formula", choices=FORMULAS, required=True)
    p.add_argument("--degrees", help="degree file")
    p.add_argument("--forbidden", help="forbidden graph edge list (Y for overlap)")
    p.add_argument("--m", type=int, help="induced support order")
    p.add_argument("--model", choices=("full", "leading"), default="full",
                   help="induced evaluator variant")
    p.add_argument("--k", type=int, help="overlap count")
    p.add_argument("--q", type=int, help="cycle length")
    p.add_argument("--n", type=int, help="vertex count for regular-graph formulas")
    p.add_argument("--d", type=int, help="degree for regular-graph formulas")
    p.add_argument("--a", type=float, default=0.3, help="advisory validity constant a")
    p.add_argument("--b", type=float, default=0.1, help="advisory error exponent b")

    p = sub.add_parser("saddle", help="solve the radius equations")
    add_instance(p)
    p.add_argument("--mode", choices=("converge", "fixed"), default="converge")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=100)

    p = sub.add_parser("verify-start", help="check count = P * I at tiny n")
    p.add_argument("--degrees", help="single instance degree file")
    p.add_argument("--forbidden")
    p.add_argument("--n-max", type=int, default=4, choices=(3, 4, 5),
                   help="sweep all graphical sequences up to this n")

    p = sub.add_parser("mw3", help="box-integral evaluation")
    p.add_argument("--coefficients", required=True, help="coefficient JSON document")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=_env_seed())

    p = sub.add_parser("sample", help="switch-chain probability estimate")
    add_instance(p)
    p.add_argument("--mode", choices=("miss", "hit", "induced"), required=True)
    p.add_argument("--m", type=int, help="induced support order")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--thinning", type=int)
    p.add_argument("--seed", type=int, default=_env_seed())
    p.add_argument("--dump-graph", help="write one realization as an edge list")

    p = sub.add_parser("validate", help="run the validation suite")
    p.add_argument("--suite", choices=("small", "full"), default="small")
    p.add_argument("--threads", type=int, default=_env_threads())

    return parser


_HANDLERS = {
    "count": _cmd_count,
    "estimate": _cmd_estimate,
    "saddle": _cmd_saddle,
    "verify-start": _cmd_verify_start,
    "mw3": _cmd_mw3,
    "sample": _cmd_sample,
    "validate": _cmd_validate,
}


def main(argv=None, stdout=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    config = RunConfig(subcommand=args.subcommand, args=args)
    try:
        return _HANDLERS[config.subcommand](config.args, out)
    except (InputFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, exactcount.CountLimitError,
            exactcount.UndefinedProbabilityError, mcsampler.NonGraphicalError,
            mvintegral.DegenerateProposalError, saddle.SaddleDivergenceError,
            saddle.SaddlePoleError, saddle.QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
