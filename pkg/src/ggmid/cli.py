"""Command-line interface.

Exit codes for the ``check-*`` and ``find-fvs`` commands: 0 when the property
holds (or some F qualifies), 1 when it does not, 2 on any error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import formats
from .bench import ALGORITHMS, bench_rows, write_csv
from .cioracle import ScatterData, cached, default_alpha_schedule, empirical_oracle, exact_oracle
from .errors import GgmIdError
from .identify import identify_degree_bounded, identify_generalized_fvs, identify_strongly_separable
from .synthmodel import FAMILIES, ModelSpec, build_model, draw_samples

log = logging.getLogger("ggmid")


class UsageError(GgmIdError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}") from None


def _oracle_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--mode", choices=("exact", "sample"), default="exact")
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--input", help="covariance matrix file or model bundle directory (exact mode)")
    sub.add_argument("--samples", help="samples file (sample mode)")
    sub.add_argument("--scatter", help="scatter matrix file (sample mode, with --n)")
    sub.add_argument("--n", type=int, help="sample count for --scatter")
    thr = sub.add_mutually_exclusive_group()
    thr.add_argument("--alpha", type=float, help="independence threshold")
    thr.add_argument("--beta", type=float, help="dependence margin; sets alpha = beta / 2")
    sub.add_argument("--delta", type=float, default=0.05, help="confidence for the default threshold")
    sub.add_argument("--alpha-c", type=float, default=1.0, help="constant of the default threshold")
    sub.add_argument("--epsilon-zero", type=float, help="exact-mode zero tolerance")
    sub.add_argument("--center", action="store_true", help="subtract sample means (off by default)")
    sub.add_argument("--no-cache", action="store_true")
    sub.add_argument("--workers", type=int, default=1, help="threads for pair classification")
    sub.add_argument("--seed", type=int, default=0, help="recorded in the report")
    sub.add_argument("--out", help="write the JSON report here instead of stdout")


def build_oracle(args):
    if args.mode == "exact":
        if not args.input:
            raise UsageError("--mode exact requires --input (covariance file or bundle)")
        oracle = exact_oracle(formats.resolve_covariance(args.input), args.epsilon_zero)
    else:
        if args.samples:
            data = ScatterData.from_samples(formats.read_samples(args.samples), center=args.center)
        elif args.scatter:
            if not args.n:
                raise UsageError("--scatter requires --n")
            data = ScatterData(formats.read_matrix(args.scatter), args.n)
        else:
            raise UsageError("--mode sample requires --samples or --scatter with --n")
        if args.alpha is not None:
            oracle = empirical_oracle(data, args.alpha, alpha_rule="explicit")
        elif args.beta is not None:
            oracle = empirical_oracle(data, args.beta / 2, alpha_rule="beta/2")
        else:
            schedule = default_alpha_schedule(data.p, data.n, args.delta, args.alpha_c)
            oracle = empirical_oracle(data, schedule, alpha_rule="default (heuristic)")
    return oracle if args.no_cache else cached(oracle)


def _config_echo(args) -> dict:
    keys = ("mode", "k", "ell", "alpha", "beta", "epsilon_zero", "seed", "input",
            "samples", "scatter", "n", "center", "delta", "alpha_c", "workers")
    return {key: getattr(args, key) for key in keys if hasattr(args, key)}


def _emit(report: dict, args) -> None:
    report["config"] = _config_echo(args)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_check_degree(args) -> int:
    oracle = build_oracle(args)
    rep = identify_degree_bounded(oracle, oracle.p, args.k)
    _emit(rep.to_dict(), args)
    return 0 if rep.verdict else 1


def cmd_check_strong_sep(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    oracle = build_oracle(args)
    rep = identify_strongly_separable(oracle, oracle.p, args.k, workers=args.workers)
    _emit(rep.to_dict(), args)
    return 0 if rep.verdict else 1


def cmd_find_fvs(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    oracle = build_oracle(args)
    if not 0 <= args.ell <= oracle.p - 2:
        raise UsageError(f"--ell must lie in 0..{oracle.p - 2}; no admissible pairs remain otherwise")
    rep = identify_generalized_fvs(oracle, oracle.p, args.k, args.ell, workers=args.workers)
    _emit(rep.to_dict(), args)
    return 0 if rep.qualifying else 1


def cmd_gen(args) -> int:
    spec = ModelSpec(
        args.family, args.p, k=args.k, ell=args.ell,
        weight_range=(args.weight_lo, args.weight_hi), seed=args.seed, density=args.density,
    )
    model = build_model(spec, beta_cap=args.beta_cap)
    out = formats.write_bundle(args.out, model)
    log.info("wrote bundle to %s (%d edges, beta=%.4g)", out, len(model.graph.edges), model.beta)
    return 0


def cmd_sample(args) -> int:
    sigma = formats.resolve_covariance(args.input)
    x = draw_samples(sigma, args.n, args.seed)
    formats.write_samples(args.out, x)
    return 0


def cmd_bench(args) -> int:
    n_list = None if args.mode == "exact" else args.n_list
    if n_list is None and args.mode == "sample":
        raise UsageError("--mode sample requires --n-list")
    rows = bench_rows(
        args.algorithm, args.family, args.p_list, n_list, args.trials, args.k,
        ell=args.ell, seed=args.seed, alpha_rule=args.alpha_rule, workers=args.workers,
    )
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ggmid", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("check-degree", help="is every node degree at most k?")
    _oracle_args(p)
    p.set_defaults(func=cmd_check_degree)

    p = subs.add_parser("check-strong-sep", help="is the graph strongly k-separable?")
    _oracle_args(p)
    p.set_defaults(func=cmd_check_strong_sep)

    p = subs.add_parser("find-fvs", help="list every k-generalized FVS of size ell")
    _oracle_args(p)
    p.add_argument("--ell", type=int, required=True)
    p.set_defaults(func=cmd_find_fvs)

    p = subs.add_parser("gen", help="generate a synthetic model bundle")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight-lo", type=float, default=0.2)
    p.add_argument("--weight-hi", type=float, default=0.4)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--beta-cap", type=int, help="largest |S| scanned for the margin (default k + ell)")
    p.add_argument("--out", required=True, help="bundle directory")
    p.set_defaults(func=cmd_gen)

    p = subs.add_parser("sample", help="draw Gaussian samples from a covariance or bundle")
    p.add_argument("--input", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = subs.add_parser("bench", help="success-rate sweep, CSV output")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="strong-sep")
    p.add_argument("--family", choices=FAMILIES, default="chain")
    p.add_argument("--mode", choices=("exact", "sample"), default="sample")
    p.add_argument("--p-list", type=_int_list, required=True)
    p.add_argument("--n-list", type=_int_list)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha-rule", choices=("beta", "default"), default="beta")
    p.add_argument("--workers", type=int, default=1, help="processes for trials")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (GgmIdError, ValueError, OSError, KeyError) as exc:
        print(f"ggmid {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
