"""Command line entry point: ``ofdm-im <subcommand> ...``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from math import sqrt

from .analysis import (
    PairwiseDistance,
    PepCase,
    conditional_pep_approx,
    conditional_pep_exact,
    dither_pep,
    mc_pep_oracle,
    solve_awgn_constraint_levels,
    solve_constraint_levels,
    unconditional_pep,
)
from .channel import noise_for_eb
from .core import SystemConfig, qam_constellation
from .errors import OfdmImError
from .harness import ExperimentConfig, derive_trial_rng, run_ber_sweep, run_papr_ccdf

SYSTEM_FIELDS = {f.name for f in dataclasses.fields(SystemConfig)}
EXPERIMENT_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"system"}


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(" ", "").split(",") if v]


def _snr_grid(text: str) -> list[float]:
    # "0:40:5" (inclusive) or "10,20,30"
    if ":" in text:
        lo, hi, step = (float(v) for v in text.split(":"))
        count = int(round((hi - lo) / step)) + 1
        return [round(lo + i * step, 10) for i in range(count)]
    return _floats(text)


def _resolve_radii(scheme: str, M: int, r=None, r0=None, radii=None) -> tuple[float, ...]:
    if radii is not None:
        return tuple(radii)
    levels = qam_constellation(M).amplitude_levels
    if scheme == "none":
        return ()
    if scheme == "equivalent":
        if r is None:
            raise OfdmImError("equivalent scheme needs --r")
        return (r,)
    if r0 is None:
        raise OfdmImError(f"{scheme} scheme needs --r0 or --radii")
    solver = solve_constraint_levels if scheme == "proposed" else solve_awgn_constraint_levels
    return tuple(solver(r0, levels))


def build_experiment(args) -> ExperimentConfig:
    raw: dict = {}
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
    system = dict(raw.pop("system", {}))
    for key in list(raw):
        if key in SYSTEM_FIELDS:
            system[key] = raw.pop(key)
    r, r0 = raw.pop("r", None), raw.pop("r0", None)
    unknown = set(raw) - EXPERIMENT_FIELDS
    if unknown:
        raise OfdmImError(f"unknown config keys: {sorted(unknown)}")

    flag_map = {"N": args.N, "n": args.n, "k": args.k, "M": args.M, "taps": args.taps,
                "oversample": args.oversample, "icf_iterations": args.icf_iterations,
                "clip_ratio": args.clip_ratio, "scheme": args.scheme}
    system.update({k: v for k, v in flag_map.items() if v is not None})
    radii = args.radii if args.radii is not None else system.pop("R_levels", None)
    r = args.r if args.r is not None else r
    r0 = args.r0 if args.r0 is not None else r0
    scheme = system.get("scheme", "none")
    system["R_levels"] = _resolve_radii(scheme, system.get("M", 16), r, r0, radii)

    exp = dict(raw)
    exp.update({k: v for k, v in {
        "snr_grid_db": getattr(args, "snr", None),
        "trials_per_point": getattr(args, "trials", None),
        "ccdf_symbols": getattr(args, "symbols", None),
        "workers": args.workers,
        "detector": getattr(args, "detector", None),
        "chunk_trials": args.chunk,
        "master_seed": args.seed,
    }.items() if v is not None})
    return ExperimentConfig(system=SystemConfig(**system), **exp)


def _add_sim_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with experiment / system fields")
    p.add_argument("--seed", type=int, required=True, help="master seed (64-bit)")
    p.add_argument("--scheme", choices=["none", "equivalent", "awgn_variable", "proposed"])
    p.add_argument("--r", type=float, help="disk radius for the equivalent scheme")
    p.add_argument("--r0", type=float, help="smallest-level radius; the others are solved")
    p.add_argument("--radii", type=_floats, help="explicit comma-separated radii")
    for name, typ in (("N", int), ("n", int), ("k", int), ("M", int), ("taps", int),
                      ("oversample", int), ("icf-iterations", int), ("clip-ratio", float)):
        p.add_argument(f"--{name}", type=typ, dest=name.replace("-", "_"))
    p.add_argument("--workers", type=int)
    p.add_argument("--chunk", type=int, help="trials per work unit")
    p.add_argument("--out", help="CSV output path")


def cmd_simulate_ber(args) -> int:
    cfg = build_experiment(args)
    run = run_ber_sweep(cfg, args.out or cfg.ber_csv or "ber.csv")
    print("snr_db  ber          index_err    sym_err")
    for rec in run.records:
        print(f"{rec.snr_db:6.2f}  {rec.ber:.4e}  {rec.index_error_rate:.4e}  {rec.symbol_error_rate:.4e}")
    return 0


def cmd_simulate_papr(args) -> int:
    cfg = build_experiment(args)
    run = run_papr_ccdf(cfg, args.out or cfg.ccdf_csv or "ccdf.csv")
    from .harness import papr_at_ccdf

    for level in (1e-1, 1e-2, 1e-3):
        print(f"PAPR at CCDF {level:g}: {papr_at_ccdf(run.records, level):.3f} dB")
    return 0


def cmd_solve_constraint(args) -> int:
    levels = qam_constellation(args.M).amplitude_levels
    solver = solve_constraint_levels if args.scheme == "proposed" else solve_awgn_constraint_levels
    radii = solver(args.r0, levels)
    print(", ".join(f"{r:.{args.precision}f}" for r in radii))
    return 0


def _case(args) -> PepCase:
    n0 = args.n0 if args.n0 is not None else noise_for_eb(args.ebn0, args.eb)
    return PepCase(args.xu, args.xv, args.r, n0)


def cmd_pep(args) -> int:
    if args.formula == "eq26":
        if args.eta is None:
            raise OfdmImError("eq26 needs --eta")
        n0 = args.n0 if args.n0 is not None else noise_for_eb(args.ebn0, args.eb)
        value = unconditional_pep(PairwiseDistance(tuple(args.eta)), n0)
    elif args.formula == "eq27":
        value = dither_pep(_case(args))
    else:
        fn = conditional_pep_exact if args.formula == "eq20" else conditional_pep_approx
        value = fn(_case(args), complex(args.hu), complex(args.hv))
    print(f"{value:.6e}")
    return 0


def cmd_pep_mc(args) -> int:
    case = _case(args)
    est = mc_pep_oracle(case, args.trials, derive_trial_rng(args.seed, "pep-mc", 0))
    print(f"{est.p:.6e} +/- {est.stderr:.2e} ({est.errors}/{est.trials})")
    return 0


def _add_case_flags(p: argparse.ArgumentParser):
    p.add_argument("--xu", type=float, default=sqrt(2), help="|X_hat_u|")
    p.add_argument("--xv", type=float, default=sqrt(2), help="|X_v|")
    p.add_argument("--r", type=float, default=0.0, help="dither radius parameter R")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n0", type=float)
    g.add_argument("--ebn0", type=float, help="Eb/N0 in dB (with --eb)")
    p.add_argument("--eb", type=float, default=2.0, help="energy per bit for --ebn0")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ofdm-im", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-ber", help="BER sweep over Rayleigh fading")
    _add_sim_flags(p)
    p.add_argument("--snr", type=_snr_grid, help="Eb/N0 grid in dB, 'lo:hi:step' or list")
    p.add_argument("--trials", type=int, help="OFDM symbols per SNR point")
    p.add_argument("--detector", choices=["ml", "power"])
    p.set_defaults(func=cmd_simulate_ber)

    p = sub.add_parser("simulate-papr", help="PAPR CCDF of dithered symbols")
    _add_sim_flags(p)
    p.add_argument("--symbols", type=int, help="number of OFDM symbols")
    p.set_defaults(func=cmd_simulate_papr)

    p = sub.add_parser("solve-constraint", help="per-level dither radii")
    p.add_argument("--scheme", choices=["proposed", "awgn"], default="proposed")
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--M", type=int, default=16)
    p.add_argument("--precision", type=int, default=3)
    p.set_defaults(func=cmd_solve_constraint)

    p = sub.add_parser("pep", help="closed-form pairwise error probability")
    p.add_argument("--formula", choices=["eq20", "eq25", "eq26", "eq27"], required=True,
                   help="eq20 exact conditional, eq25 approximate conditional, "
                        "eq26 unconditional (needs --eta), eq27 dithered unconditional")
    _add_case_flags(p)
    p.add_argument("--hu", default="1", help="complex channel on u, e.g. 0.3+0.4j")
    p.add_argument("--hv", default="1")
    p.add_argument("--eta", type=_floats, help="comma-separated squared distances")
    p.set_defaults(func=cmd_pep)

    p = sub.add_parser("pep-mc", help="Monte Carlo PEP oracle")
    _add_case_flags(p)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_pep_mc)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OfdmImError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"ofdm-im: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
