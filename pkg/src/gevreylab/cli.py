"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 hypothesis failure, 3 solve
failure, 4 fit-domain error, 5 summation-direction error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .borel_laplace import borel_sum, gevrey_order_of_normalization
from .errors import (FitDomainError, GevreyLabError, PreconditionError, SolveError,
                     SummationDirectionError)
from .io import (SpecError, config_hash, dumps, load_spec, parse_complex, result_from_document,
                 result_to_document, spec_to_document, write_csv)
from .normalization import (check_monomial_preservation, compute_borel_tables, conjugacy_residual,
                            formal_normalize, route_equivalence, verify_bounds)
from .resonance import DEFAULT_EPS, check_hypotheses, check_well_prepared, resonance_report
from .series_core import ZSeries
from .small_divisors import rho_sequence, small_divisor_profile

EXIT_OK, EXIT_INPUT, EXIT_HYPOTHESIS, EXIT_SOLVE, EXIT_FIT, EXIT_DIRECTION = range(6)


def _report(command: str, config: dict, **sections) -> dict:
    return {"tool": "gevreylab", "version": __version__, "command": command,
            "config": config, "config_hash": config_hash(config), **sections}


def _emit(doc: dict, path) -> None:
    text = dumps(doc)
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _hypothesis_section(spec, scan_degree):
    h = check_hypotheses(spec, scan_degree)
    ok, diags = check_well_prepared(spec)
    sec = asdict(h)
    sec["offending"] = {k: [list(v) if isinstance(v, tuple) else v for v in vals]
                        for k, vals in h.offending.items()}
    sec["well_prepared"] = ok
    sec["well_prepared_diagnostics"] = diags
    return h, ok, sec


def cmd_resonance(args) -> int:
    spec = load_spec(args.spec)
    rep = resonance_report(spec.linear_part, args.max_degree, args.eps, spec.alpha)
    h, wp, hyp = _hypothesis_section(spec, args.max_degree)
    res = {
        "resonances": [{"i": x.i, "Q": list(x.Q), "defect": x.defect} for x in rep.resonances],
        "r": None if rep.r is None else list(rep.r),
        "is_one_resonant": rep.is_one_resonant,
        "p": rep.p, "beta": rep.beta, "ichikawa": rep.ichikawa,
        "diagnostics": rep.diagnostics,
    }
    config = {"spec": spec_to_document(spec), "max_degree": args.max_degree, "eps": args.eps}
    _emit(_report("resonance", config, resonance=res, hypotheses=hyp), args.output)
    failed = not all(getattr(h, name) for name in ("H1", "H2", "H3", "H4", "H5"))
    return EXIT_HYPOTHESIS if failed else EXIT_OK


def cmd_smalldiv(args) -> int:
    spec = load_spec(args.spec)
    if args.m_max < 1:
        raise PreconditionError("--m-max must be at least 1")
    min_degree = 2 if args.nonlinear_only else 1
    prof = small_divisor_profile(spec.linear_part, args.m_max, args.bruno_K, args.eps, min_degree)
    sec = {
        "omega": prof.omega, "bruno_partial_sums": prof.bruno_partial_sums,
        "rho": {"m": prof.rho.m, "values": prof.rho.values, "min_degree": min_degree},
        "fit": {"c": prof.fit.c, "gamma": prof.fit.gamma, "residual": prof.fit.residual,
                "records": prof.fit.records, "window": prof.fit.window, "flag": prof.fit.flag},
        "complete": prof.complete, "notes": prof.notes,
    }
    config = {"spec": spec_to_document(spec), "m_max": args.m_max, "bruno_K": args.bruno_K,
              "eps": args.eps, "min_degree": min_degree}
    if args.csv_rho:
        write_csv(args.csv_rho, ["m", "rho_m"], zip(prof.rho.m.tolist(), prof.rho.values))
    if args.csv_omega:
        K = np.arange(1, prof.omega.size + 1)
        partial = list(prof.bruno_partial_sums) + [float("nan")] * (K.size - prof.bruno_partial_sums.size)
        write_csv(args.csv_omega, ["k", "omega_k", "bruno_partial"], zip(K.tolist(), prof.omega, partial))
    _emit(_report("smalldiv", config, small_divisors=sec), args.output)
    return EXIT_OK


def cmd_normalize(args) -> int:
    spec = load_spec(args.spec)
    N = spec.N if args.N is None else args.N
    M = spec.M if args.M is None else args.M
    h, wp, hyp = _hypothesis_section(spec, max(N, 2))
    config = {"spec": spec_to_document(spec), "N": N, "M": M, "force": args.force,
              "emit_borel": args.emit_borel, "verify_bounds": args.verify_bounds}
    if not wp and not args.force:
        _emit(_report("normalize", config, hypotheses=hyp,
                      error="spec is not well prepared (use --force to override)"), args.report)
        return EXIT_HYPOTHESIS
    try:
        result = formal_normalize(spec, N, M)
    except SolveError as exc:
        _emit(_report("normalize", config, hypotheses=hyp,
                      error=str(exc), solve_failure={"i": exc.i, "Q": list(exc.Q), "n": exc.n}),
              args.report)
        print(f"gevreylab: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    summary = {"conjugacy_residual": conjugacy_residual(spec, result),
               "residual_tolerance": spec.tol("conjugacy", 1e-9)}
    if any(spec.r):
        summary["monomial_preservation"] = check_monomial_preservation(result)
    basis = result.basis
    norms = [[m, float(np.abs(result.g[basis.shell(m)]).max())] for m in range(2, N + 1)]
    summary["max_coeff_by_degree"] = norms
    if args.emit_borel or args.verify_bounds:
        tables = compute_borel_tables(result)
        summary["route_equivalence"] = route_equivalence(result, tables)
        if args.verify_bounds:
            rho = rho_sequence(spec.linear_part, max(N, 1), spec.tol("eps", DEFAULT_EPS))
            bf = verify_bounds(result, rho=rho.at, tables=tables)
            summary["bound_fit"] = {"K0_fit": bf.K0_fit, "K_fit": bf.K_fit, "c0_used": bf.c0_used,
                                    "samples": bf.samples, "tail_ratio": bf.tail_ratio}
    doc = result_to_document(result)
    if args.emit_borel:
        doc["borel"] = {"T": tables.T, "k": tables.k,
                        "W": [{"Q": list(Q), "W": tables.W[pos]} for pos, Q in enumerate(basis.indices)
                              if sum(Q) >= 1]}
    if args.output:
        Path(args.output).write_text(dumps(doc))
    if args.csv:
        write_csv(args.csv, ["degree", "max_abs_coeff"], norms)
    _emit(_report("normalize", config, hypotheses=hyp, normalization=summary), args.report)
    return EXIT_OK


def cmd_gevrey(args) -> int:
    try:
        doc = json.loads(Path(args.result).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read result {args.result}: {exc}") from exc
    result = result_from_document(doc)
    gamma = None if args.gamma == "from" else float(args.gamma)
    window = tuple(args.window) if args.window else None
    fit = gevrey_order_of_normalization(result, args.R, window, gamma)
    sec = {"s_hat": fit.s_hat, "A_hat": fit.A_hat, "C_hat": fit.C_hat, "residual": fit.residual,
           "window": fit.window, "n_points": fit.n_points, "flag": fit.flag, "R": fit.R,
           "gamma": fit.gamma, "gamma_source": fit.gamma_source, "k": fit.k,
           "predicted_order": fit.predicted, "norms": fit.norms}
    config = {"result_spec": spec_to_document(result.spec), "N": result.N, "M": result.M,
              "R": args.R, "window": window, "gamma": args.gamma}
    if args.csv:
        from math import lgamma
        rows = []
        for n, h in enumerate(fit.norms):
            env = fit.C_hat * fit.A_hat ** n * np.exp(lgamma(1 + n * fit.s_hat))
            rows.append([n, float(h), float(env)])
        write_csv(args.csv, ["N", "h_N", "envelope"], rows)
    _emit(_report("gevrey", config, gevrey=sec), args.output)
    return EXIT_OK


def cmd_sum(args) -> int:
    try:
        doc = json.loads(Path(args.series).read_text())
        coeffs = [complex(parse_complex(c, "z_coeffs")) for c in doc["z_coeffs"]]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise SpecError(f"cannot read series {args.series}: {exc}") from exc
    k = args.k if args.k is not None else int(doc.get("k", 1))
    try:
        z = complex(args.z.replace(" ", ""))
    except ValueError as exc:
        raise SpecError(f"--z: cannot parse {args.z!r}") from exc
    L, Md = (args.pade if args.pade else (None, None))
    poly = args.polynomial or bool(doc.get("polynomial", False))
    val, err = borel_sum(ZSeries(coeffs), k, args.direction, z, L, Md, full_output=True,
                         polynomial=poly)
    config = {"z_coeffs": coeffs, "k": k, "direction": args.direction, "z": z, "polynomial": poly,
              "pade": list(args.pade) if args.pade else None}
    _emit(_report("sum", config, value=val, error_estimate=err), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gevreylab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gevreylab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("resonance", help="resonances, x^r and hypothesis flags")
    s.add_argument("spec")
    s.add_argument("--max-degree", type=int, default=8)
    s.add_argument("--eps", type=float, default=DEFAULT_EPS)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_resonance)

    s = sub.add_parser("smalldiv", help="Bruno sums, rho_m and the diophantine fit")
    s.add_argument("spec")
    s.add_argument("--m-max", type=int, default=200)
    s.add_argument("--bruno-K", type=int, default=6)
    s.add_argument("--eps", type=float, default=DEFAULT_EPS)
    s.add_argument("--nonlinear-only", action="store_true",
                   help="restrict rho_m to divisors with |P| >= 2")
    s.add_argument("--csv-rho")
    s.add_argument("--csv-omega")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_smalldiv)

    s = sub.add_parser("normalize", help="formal normalizing transformation and its checks")
    s.add_argument("spec")
    s.add_argument("--N", type=int)
    s.add_argument("--M", type=int)
    s.add_argument("--emit-borel", action="store_true")
    s.add_argument("--verify-bounds", action="store_true")
    s.add_argument("--force", action="store_true", help="skip the well-prepared gate")
    s.add_argument("-o", "--output", help="write the NormalizationResult JSON here")
    s.add_argument("--report", help="write the report here instead of stdout")
    s.add_argument("--csv", help="per-degree max coefficient norms")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("gevrey", help="Gevrey order of a normalization result")
    s.add_argument("result")
    s.add_argument("--R", type=float, default=0.5)
    s.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))
    s.add_argument("--gamma", default="from", help="'from' (fit rho_m) or a number")
    s.add_argument("--csv")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gevrey)

    s = sub.add_parser("sum", help="Borel-Laplace sum of a series")
    s.add_argument("series")
    s.add_argument("--k", type=int)
    s.add_argument("--direction", type=float, default=0.0)
    s.add_argument("--z", required=True, help="complex point, e.g. 0.1 or 0.1+0.05j")
    s.add_argument("--pade", type=int, nargs=2, metavar=("L", "M"))
    s.add_argument("--polynomial", action="store_true",
                   help="the coefficients are the whole series (no Padé denominator)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sum)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SummationDirectionError as exc:
        print(f"gevreylab: {exc}", file=sys.stderr)
        return EXIT_DIRECTION
    except FitDomainError as exc:
        print(f"gevreylab: {exc}", file=sys.stderr)
        return EXIT_FIT
    except SolveError as exc:
        print(f"gevreylab: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    except (GevreyLabError, ValueError, OSError) as exc:
        print(f"gevreylab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
