"""Command line interface.

Exit codes: 0 success, 1 validation error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings

from . import __version__
from .errors import SpdeError, ToleranceNotAchieved
from .estimator import estimate_from_field
from .harness import ExperimentConfig, emit_table, run_experiment, verify
from .io import read_field, write_field, write_field_csv
from .model import NoiseSpec, SpdeCoefficients
from .sampling import build_design, restrict_to_design
from .simulate import simulate_dataset
from .theory import PsiQuery, ThetaVector, expected_quadratic_variation, g_limit, psi_with_error

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2


def _add_model_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("model")
    g.add_argument("--theta0", type=float, default=0.0)
    g.add_argument("--theta1", type=float, default=0.2)
    g.add_argument("--eta1", type=float, default=0.2)
    g.add_argument("--theta2", type=float, default=0.2)
    g.add_argument("--sigma", type=float, default=1.0)
    g.add_argument("--alpha", type=float, default=0.5)
    g.add_argument("--mu0", type=float, default=-19.5)
    g.add_argument("--K", type=int, default=1000, help="modes along y")
    g.add_argument("--L", type=int, default=None, help="modes along z (default: K)")


def _add_design_args(p: argparse.ArgumentParser):
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--N", type=int, required=True)


def _model(args):
    coeffs = SpdeCoefficients(args.theta0, args.theta1, args.eta1, args.theta2, args.sigma)
    noise = NoiseSpec(args.alpha, args.mu0, args.K, args.L if args.L is not None else args.K)
    return coeffs, noise


def cmd_simulate(args) -> int:
    coeffs, noise = _model(args)
    design = build_design(args.b, args.m1, args.N)
    fld = simulate_dataset(coeffs, noise, design, args.seed, args.replication, snap_to=args.snap)
    write_field(fld, args.out)
    if args.csv:
        write_field_csv(fld, args.csv)
    return EXIT_OK


def cmd_estimate(args) -> int:
    fld = read_field(args.input)
    design = build_design(args.b, args.m1, args.N)
    est = estimate_from_field(restrict_to_design(fld, design, snap=args.snap), design)
    print("alpha_hat,v_fine,v_coarse,in_range")
    print(est.csv_row())
    return EXIT_OK


def cmd_psi(args) -> int:
    res = psi_with_error(PsiQuery(args.r, args.alpha, args.theta2, args.tol))
    print(f"psi={res.value!r}")
    print(f"error_bound={res.error_bound!r}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    coeffs, noise = _model(args)
    design = build_design(args.b, args.m1, args.N)
    eqv = expected_quadratic_variation(design, coeffs, noise)
    g = g_limit(design.r, noise.alpha, ThetaVector.from_coefficients(coeffs), design.b)
    print(json.dumps({"r": design.r, "expected_quadratic_variation": eqv, "g_limit": g, "rel_gap": abs(eqv - g) / g}))
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.full_scale:
        cfg = ExperimentConfig.full_scale()
        if args.config:
            cfg = ExperimentConfig.from_dict({**cfg.to_dict(), **ExperimentConfig.from_json(args.config).to_dict()})
    else:
        cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    overrides = {}
    for key in ("replications", "seed", "workers", "N"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    if args.K is not None:
        overrides["noise"] = {**cfg.noise.as_dict(), "trunc_k": args.K, "trunc_l": args.K}
    if args.b_values:
        overrides["b_values"] = args.b_values
    if args.m1_values:
        overrides["m1_values"] = args.m1_values
    if overrides:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), **overrides})
    result = run_experiment(cfg, raw_path=args.raw, progress=True)
    emit_table(result, args.out)
    return 130 if result.interrupted else EXIT_OK


def cmd_verify(args) -> int:
    report = verify(args.suite)
    print(report.to_json())
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spde-damping", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate one replication on a thinned design, write SPDE2D01")
    _add_model_args(s)
    _add_design_args(s)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--replication", type=int, default=0)
    s.add_argument("--snap", type=int, default=None, metavar="M", help="round coordinates to the j/M lattice")
    s.add_argument("--out", required=True)
    s.add_argument("--csv", default=None, help="also write long-format CSV")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("estimate", help="estimate alpha from an SPDE2D01 file")
    s.add_argument("input")
    _add_design_args(s)
    s.add_argument("--snap", action="store_true", help="map design coordinates to the nearest grid point")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("psi", help="evaluate psi_{r,alpha}(theta2)")
    s.add_argument("--r", type=float, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--theta2", type=float, required=True)
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_psi)

    s = sub.add_parser("oracle", help="expected quadratic variation and its limit g for a design")
    _add_model_args(s)
    _add_design_args(s)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("experiment", help="Monte Carlo study; writes one CSV row per (b, m1) cell")
    s.add_argument("--config", default=None, help="JSON file with ExperimentConfig fields")
    s.add_argument("--out", required=True)
    s.add_argument("--raw", default=None, help="per-replication estimates, flushed as they complete")
    s.add_argument("--full-scale", action="store_true", help="K = L = 10^4 and 200 replications")
    s.add_argument("--replications", type=int, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--N", type=int, default=None)
    s.add_argument("--K", type=int, default=None, help="truncation for both axes")
    s.add_argument("--b-values", type=float, nargs="+", default=None)
    s.add_argument("--m1-values", type=int, nargs="+", default=None)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("verify", help="run a verification suite")
    s.add_argument("suite", choices=["identities", "oracle", "convergence"])
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    warnings.simplefilter("default")
    try:
        return args.func(args)
    except (SpdeError, ToleranceNotAchieved, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
