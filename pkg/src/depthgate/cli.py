"""Command-line interface.

Exit codes: 0 success, 2 usage or configuration error, 3 data error,
4 computation error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional, Sequence

from . import __version__
from .config import RunConfig, load_config, resolve
from .decision import decide
from .depth import depth_vector
from .drifter import prep_drifter
from .formats import dumps, read_sample, write_curves, write_depth_vector, write_rows
from .ls_core import RankMode, ls_tuple, scaled_stats
from .model import ComputationError, DataError, parse_depth, parse_method, validate_pair
from .simulate import SCENARIOS, run_experiment, run_tuple_scatter

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_COMPUTE = 0, 2, 3, 4
log = logging.getLogger("depthgate")


class UsageError(Exception):
    pass


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _split_methods(values: Optional[Sequence[str]]) -> List[str]:
    out: List[str] = []
    for v in values or ():
        out += [m.strip() for m in v.split(";") if m.strip()] if ";" in v else [v.strip()]
    return out


def _load_pair(args):
    a = read_sample(args.a, args.kind, args.drop_empty)
    b = read_sample(args.b, args.kind, args.drop_empty)
    return validate_pair(a, b)


# -- subcommands -----------------------------------------------------------------

def cmd_test(args) -> int:
    p, q = _load_pair(args)
    spec = parse_depth(args.depth, seed=args.seed)
    methods = [parse_method(m, args.alpha) for m in (_split_methods(args.method) or ["joint-tp"])]
    mode = RankMode(args.rank_mode)
    t = ls_tuple(p, q, spec, mode)
    sc = scaled_stats(t)
    outcomes = [decide(t, c) for c in methods]
    doc = {
        "config": {"a": args.a, "b": args.b, "depth": spec.label(), "seed": args.seed,
                   "methods": [c.name for c in methods], "alpha": args.alpha,
                   "rank_mode": mode.value},
        "tuple": t.to_dict(),
        "scaled": {"diff_std": sc.diff_std, "sum_centered": sc.sum_centered, "scale": sc.scale},
        "outcomes": [o.to_dict() for o in outcomes],
    }
    _emit(dumps(doc), args.out)
    print(f"LS tuple ({t.ls_pq:.6f}, {t.ls_qp:.6f}) with m={t.m}, n={t.n}, depth {spec.label()}",
          file=sys.stderr)
    for o in outcomes:
        p_txt = "below resolution" if o.below_resolution else f"{o.p_value:.6g}"
        verdict = "reject" if o.reject else "accept"
        print(f"  {o.method:<22} {verdict:<7} p = {p_txt}", file=sys.stderr)
    return EXIT_OK


def cmd_depth(args) -> int:
    ref = read_sample(args.sample, args.kind, args.drop_empty)
    queries = ref if args.query is None else read_sample(args.query, args.kind, args.drop_empty)
    ref, queries = validate_pair(ref, queries)
    spec = parse_depth(args.depth, seed=args.seed)
    dv = depth_vector(queries, ref, spec, reference_id=args.sample)
    if args.out is None or args.out == "-":
        write_depth_vector(sys.stdout, dv)
    else:
        write_depth_vector(args.out, dv)
    return EXIT_OK


def cmd_tuple(args) -> int:
    p, q = _load_pair(args)
    spec = parse_depth(args.depth, seed=args.seed)
    t = ls_tuple(p, q, spec, RankMode(args.rank_mode))
    doc = {"config": {"a": args.a, "b": args.b, "depth": spec.label(), "seed": args.seed,
                      "rank_mode": args.rank_mode}, **t.to_dict()}
    _emit(dumps(doc), args.out)
    return EXIT_OK


def _run_config(args) -> RunConfig:
    if args.config is None and args.scenario is None:
        raise UsageError("give --scenario NAME or --config FILE")
    doc = load_config(args.config) if args.config else {}
    if args.scenario is not None:
        doc["scenario"] = args.scenario
    for key in ("trials", "seed", "m", "n", "grid_size", "alpha", "depth", "alternative",
                "rank_mode"):
        value = getattr(args, key, None)
        if value is not None:
            doc[key] = value
    methods = _split_methods(getattr(args, "methods", None))
    if methods:
        doc["methods"] = methods
    if getattr(args, "keep_tuples", False):
        doc["keep_tuples"] = True
    return resolve(doc)


def cmd_simulate(args) -> int:
    cfg = _run_config(args)
    res = run_experiment(cfg.spec, cfg.depth, cfg.methods, cfg.rank_mode,
                         keep_tuples=cfg.keep_tuples, name=cfg.name)
    log.info("simulation finished in %.2fs", res.runtime_seconds)
    doc = {"config": cfg.to_dict(), **res.to_dict()}
    _emit(dumps(doc), args.out)
    if args.rates_csv:
        rows = [(c.name, res.counts[c.name], res.trials, res.rates[c.name], res.half_widths[c.name])
                for c in cfg.methods]
        write_rows(args.rates_csv, ("method", "rejections", "trials", "rate", "half_width"), rows)
    for c in cfg.methods:
        print(f"  {c.name:<22} rate {res.rates[c.name]:.4f} ± {res.half_widths[c.name]:.4f}",
              file=sys.stderr)
    return EXIT_OK


def cmd_scatter(args) -> int:
    cfg = _run_config(args)
    tuples = run_tuple_scatter(cfg.spec, cfg.depth, cfg.spec.trials, cfg.rank_mode)
    rows = [(t.ls_pq, t.ls_qp) for t in tuples]
    if args.out is None or args.out == "-":
        write_rows(sys.stdout, ("ls_pq", "ls_qp"), rows)
    else:
        write_rows(args.out, ("ls_pq", "ls_qp"), rows)
    return EXIT_OK


def cmd_prep_drifter(args) -> int:
    ids: List[str] = []
    sample = prep_drifter(args.raw, args.year, args.mode, ids)
    if args.out is None or args.out == "-":
        write_curves(sys.stdout, sample)
    else:
        write_curves(args.out, sample)
    if args.ids_out:
        with open(args.ids_out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(ids) + "\n")
    print(f"{sample.size} drifter curves for {args.year} ({args.mode} mode)", file=sys.stderr)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def _sample_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=("auto", "curves", "points"), default="auto",
                   help="input format; auto treats a numeric grid header as curves")
    p.add_argument("--drop-empty", action="store_true",
                   help="skip curves without any observed value instead of failing")


def _depth_args(p: argparse.ArgumentParser, default: Optional[str] = "integrated-tukey") -> None:
    p.add_argument("--depth", default=default,
                   help="depth spec, e.g. integrated-tukey, h-adaptive:q=0.15, random-tukey:k=2")
    p.add_argument("--seed", type=int, default=None if default is None else 0,
                   help="seed for randomized depths")
    p.add_argument("--rank-mode", choices=[m.value for m in RankMode],
                   default=None if default is None else RankMode.TIE_SPLIT.value)


def _run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", choices=sorted(SCENARIOS))
    p.add_argument("--config", help="RunConfig JSON file")
    p.add_argument("--trials", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--grid-size", type=int)
    p.add_argument("--alternative", help="e.g. shift:a=0.2, affine:a=0.15,b=0.8, none")
    _depth_args(p, default=None)
    p.add_argument("--out", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="depthgate",
                                     description="Depth-based LS-tuple two-sample tests.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run decision rules on two samples")
    p.add_argument("a")
    p.add_argument("b")
    _depth_args(p)
    p.add_argument("--method", action="append",
                   help="decision rule (repeatable), e.g. joint-tp, ellipsoid:w=0.5, joint-cc+sym")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out")
    _sample_args(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("depth", help="depth of query elements within a sample")
    p.add_argument("sample")
    p.add_argument("--query", help="query file (default: the sample itself)")
    _depth_args(p)
    p.add_argument("--out")
    _sample_args(p)
    p.set_defaults(func=cmd_depth)

    p = sub.add_parser("tuple", help="LS tuple of two samples")
    p.add_argument("a")
    p.add_argument("b")
    _depth_args(p)
    p.add_argument("--out")
    _sample_args(p)
    p.set_defaults(func=cmd_tuple)

    p = sub.add_parser("simulate", help="Monte Carlo rejection rates")
    _run_args(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--methods", action="append", help="decision rule (repeatable)")
    p.add_argument("--rates-csv", help="also write per-method rates as CSV")
    p.add_argument("--keep-tuples", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scatter", help="LS tuples of every trial as CSV")
    _run_args(p)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("prep-drifter", help="daily drifter temperature curves from raw readings")
    p.add_argument("raw")
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--mode", choices=("full", "masked"), default="full")
    p.add_argument("--out")
    p.add_argument("--ids-out", help="write the ids of the kept drifters, one per line")
    p.set_defaults(func=cmd_prep_drifter)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"depthgate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"depthgate: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ComputationError as exc:
        print(f"depthgate: computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"depthgate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
