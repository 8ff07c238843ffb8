"""Command-line front end: ``python -m minormax <subcommand> ...``.

Subcommands
-----------
simulate       Monte Carlo run (or trend study with ``--pgrid``) plus report files
cdf, quantile  evaluate a limit law
verify-lemmas  kernel diagnostics over a p-grid as CSV
ks             recompute the KS distance from a samples CSV
consistency    xi = 2 cross-form gap over a p-grid

Exit status is 0 on success, 2 on a usage error and 1 when the computation
itself fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .ensembles import DeformedGoe, MemoryBudgetExceeded, Wishart, distribution_from_name
from .experiments import (
    ExperimentConfig,
    ks_distance,
    read_samples_csv,
    resolve_law,
    run_mc,
    write_report,
)
from .limit_laws import GXi, Gumbel, eta, feng_consistency_delta, law_for, law_from_description
from .q_kernels import kernel_context, lemma_diagnostics
from .special_functions import QuadratureError

DEFAULT_LEMMA_PGRID = "1e10,1e50,1e100"
DEFAULT_CONSISTENCY_PGRID = "1e8,1e20,1e50,1e100"


class UsageError(Exception):
    pass


def _use_color(stream) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, code: str, stream) -> str:
    return f"\033[{code}m{text}\033[0m" if _use_color(stream) else text


def _err(msg: str) -> None:
    print(_paint("error:", "31", sys.stderr), msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------

def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _threads(text: str):
    if text == "auto":
        return "auto"
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("threads must be >= 1 or 'auto'")
    return v


def _real_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma list of numbers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _int_list(text: str) -> list[int]:
    vals = _real_list(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"grid values must be integers: {text!r}")
    return [int(v) for v in vals]


def _law_from_args(args, xi_required: bool = True):
    """Resolve ``--law`` / ``--xi`` into a law object."""
    if args.law == "gumbel":
        return Gumbel()
    if args.xi is None:
        if xi_required or args.law == "gxi":
            raise UsageError(f"--law {args.law} needs --xi")
        return None
    if args.xi < 0:
        raise UsageError("--xi must be >= 0")
    if args.law == "gxi":
        if not args.xi > 2:
            raise UsageError("--law gxi needs --xi > 2")
        return GXi(eta(args.xi))
    return law_for(args.xi)


def _fmt(v: float) -> str:
    return repr(float(v))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    if args.p is None:
        raise UsageError("simulate needs --p")
    stat = "diag_max" if args.stat == "diag" else "pair_max"
    if args.n is not None:
        ens = Wishart(args.n, args.p, distribution_from_name(args.dist, args.df))
        if args.xi is not None and args.xi != ens.xi:
            raise UsageError(f"--xi {args.xi} conflicts with --dist {args.dist} (xi={ens.xi})")
    else:
        if args.xi is None:
            raise UsageError("simulate needs --xi for the deformed GOE, or --n for Wishart")
        if args.xi < 0:
            raise UsageError("--xi must be >= 0")
        ens = DeformedGoe(args.xi, args.p)
    override = None
    if args.law != "auto":
        override = Gumbel() if args.law == "gumbel" else GXi(eta(ens.xi)) if ens.xi > 2 else None
        if override is None:
            raise UsageError("--law gxi needs xi > 2")
    base = ExperimentConfig(ens, args.reps, args.seed, args.threads, override, args.out,
                            None, stat)
    grid = args.pgrid or [None]
    out = sys.stdout
    for v in grid:
        cfg = base
        if v is not None:
            stem = Path(args.out).with_suffix("") if args.out else None
            label = "n" if isinstance(ens, Wishart) else "p"
            new_ens = DeformedGoe(ens.xi, v) if isinstance(ens, DeformedGoe) else \
                Wishart(v, ens.p, ens.dist)
            path = f"{stem}_{label}{v}.json" if stem else None
            cfg = ExperimentConfig(new_ens, args.reps, args.seed, args.threads, override, path,
                                   None, stat)
        samples = run_mc(cfg)
        law = resolve_law(cfg)
        if cfg.output_path:
            rep = write_report(samples, law, cfg)
            ks, med = rep.ks, rep.sample_median
        else:
            ks = ks_distance(samples.normalized, law)
            med = float(np.median(samples.normalized))
        e = cfg.ensemble
        where = f"p={e.p}" if isinstance(e, DeformedGoe) else f"n={e.n} p={e.p}"
        print(f"{where} reps={len(samples)} law={law.name} "
              f"{_paint('ks=' + format(ks, '.4f'), '1', out)} median={med:.4f}"
              + (f" -> {cfg.output_path}" if cfg.output_path else ""), file=out)
    return 0


def _cmd_cdf(args) -> int:
    law = _law_from_args(args)
    print(_fmt(law.cdf(args.z)))
    return 0


def _cmd_quantile(args) -> int:
    if not 0 < args.q < 1:
        raise UsageError("--q must lie in (0, 1)")
    law = _law_from_args(args)
    print(_fmt(law.quantile(args.q)))
    return 0


def _cmd_verify_lemmas(args) -> int:
    if args.xi is None or not args.xi > 0:
        raise UsageError("verify-lemmas needs --xi > 0")
    rows = []
    for p in args.pgrid or _real_list(DEFAULT_LEMMA_PGRID):
        ctx = kernel_context(args.xi, p, y=args.y, z=args.z)
        for d in lemma_diagnostics(ctx, j_max=args.jmax):
            rows.append([d.name, _fmt(d.p), _fmt(d.value), _fmt(d.predicted), _fmt(d.ratio)])
    fh = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["diagnostic", "p", "value", "predicted_limit", "ratio"])
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return 0


def _cmd_ks(args) -> int:
    samples = read_samples_csv(args.csv)
    law = _law_from_args(args, xi_required=False)
    if law is None:
        sidecar = Path(args.csv).with_suffix(".json")
        if not sidecar.exists():
            raise UsageError("ks needs --law/--xi when no report JSON sits next to the CSV")
        law = law_from_description(json.loads(sidecar.read_text(encoding="utf-8"))["law"])
    print(_fmt(ks_distance(samples.normalized, law)))
    return 0


def _cmd_consistency(args) -> int:
    zs = [args.z] if args.z is not None else [-2.0, 0.0, 2.0]
    print("p,z,delta")
    for p in args.pgrid or _real_list(DEFAULT_CONSISTENCY_PGRID):
        for z in zs:
            print(f"{_fmt(p)},{_fmt(z)},{_fmt(feng_consistency_delta(p, z))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="minormax", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, *names):
        if "xi" in names:
            sp.add_argument("--xi", type=float, help="diagonal variance xi >= 0")
        if "law" in names:
            sp.add_argument("--law", choices=["auto", "gumbel", "gxi"], default="auto")
        if "pgrid" in names:
            sp.add_argument("--pgrid", type=_real_list, help="comma list of p values")

    s = sub.add_parser("simulate", help="Monte Carlo run with report files")
    common(s, "xi", "law")
    s.add_argument("--p", type=int)
    s.add_argument("--n", type=int, help="sample size; selects the Wishart ensemble")
    s.add_argument("--dist", choices=["gaussian", "rademacher", "uniform", "student"],
                   default="gaussian")
    s.add_argument("--df", type=float, default=7.0, help="degrees of freedom for --dist student")
    s.add_argument("--reps", type=int, default=1000)
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--threads", type=_threads, default=1)
    s.add_argument("--out", help="output stem; writes <stem>.json and <stem>.csv")
    s.add_argument("--pgrid", type=_int_list,
                   help="trend grid: values of p (GOE) or n (Wishart)")
    s.add_argument("--stat", choices=["pair", "diag"], default="pair")
    s.set_defaults(func=_cmd_simulate)

    s = sub.add_parser("cdf", help="limit-law distribution function")
    common(s, "xi", "law")
    s.add_argument("--z", type=float, required=True)
    s.set_defaults(func=_cmd_cdf)

    s = sub.add_parser("quantile", help="limit-law quantile")
    common(s, "xi", "law")
    s.add_argument("--q", type=float, required=True)
    s.set_defaults(func=_cmd_quantile)

    s = sub.add_parser("verify-lemmas", help="kernel diagnostics as CSV")
    common(s, "xi", "pgrid")
    s.add_argument("--y", type=float, default=0.0)
    s.add_argument("--z", type=float, default=0.0)
    s.add_argument("--jmax", type=int, default=3)
    s.add_argument("--out", help="CSV path (default stdout)")
    s.set_defaults(func=_cmd_verify_lemmas)

    s = sub.add_parser("ks", help="KS distance of a samples CSV")
    common(s, "xi", "law")
    s.add_argument("csv")
    s.set_defaults(func=_cmd_ks)

    s = sub.add_parser("consistency", help="xi = 2 cross-form gap table")
    common(s, "pgrid")
    s.add_argument("--z", type=float)
    s.set_defaults(func=_cmd_consistency)
    return ap


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _err(str(exc))
        return 2
    except (ValueError, ArithmeticError, OSError, QuadratureError, MemoryBudgetExceeded) as exc:
        _err(str(exc))
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
