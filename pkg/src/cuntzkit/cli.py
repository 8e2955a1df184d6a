"""Command line front end.

Exit codes: 0 when every checked bound holds, 2 when a bound is violated,
1 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys

import jsonschema

from .experiments import ExperimentConfig, run_experiment, to_csv, to_json
from .parsing import ParseError

EXIT_PASS, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=None, help="alphabet size (default 2)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    return common


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def _words(text: str) -> list[str]:
    """``"1,2 21"`` or ``"1 2"`` -> word strings; ``e`` alone is the empty word."""
    return ["" if t == "e" else t for t in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="cuntzkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("normalize", parents=[common], help="canonical and compressed forms")
    p.add_argument("expr")

    p = sub.add_parser("eval", parents=[common], help="evaluate a state on an element")
    p.add_argument("expr")
    p.add_argument("--xi", nargs="+", help="Cuntz state vector entries (python complex syntax)")
    p.add_argument("--tail", nargs="+", action="append", help="product-state site vector; repeat per site")

    p = sub.add_parser("endo", parents=[common], help="apply alpha_u to an element")
    p.add_argument("u")
    p.add_argument("x", nargs="?", default="s1")

    p = sub.add_parser("equiv", parents=[common], help="partial isometry between cylinder projections")
    p.add_argument("p", help="words of p, e.g. '1 2' or '11,12'")
    p.add_argument("q")

    p = sub.add_parser("kishimoto", parents=[common], help="averaged projection sweep")
    p.add_argument("--N", default="1,2,3,4,5", help="exponents, e.g. 1,2,3")

    p = sub.add_parser("rordam", parents=[common], help="approximate cocycle in the cyclic model")
    p.add_argument("--periods", default="2,4,8")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--sampler", choices=["compatible", "haar", "identity"], default="compatible")
    p.add_argument("--tail-level", type=int, default=1)

    p = sub.add_parser("transport", parents=[common], help="intertwiner pipeline on random tails")
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--K", type=int, default=4)
    p.add_argument("--blocks", default=None, help="block boundaries, e.g. 1,2,3,4")

    p = sub.add_parser("cuntzify", parents=[common], help="unitary with phi(u s_1) = 1")
    p.add_argument("--support", default=None, help="cylinder words; random supports if omitted")
    p.add_argument("--samples", type=int, default=20)

    p = sub.add_parser("strengthen", parents=[common], help="phase strengthening sweep")
    p.add_argument("--m-max", type=int, default=6)

    p = sub.add_parser("run", parents=[common], help="run a JSON experiment config")
    p.add_argument("config")
    return parser


def _params(args) -> dict:
    c = args.command
    if c == "normalize":
        return {"expr": args.expr}
    if c == "eval":
        params = {"expr": args.expr}
        if args.tail:
            params["state"] = {"kind": "product", "tail": args.tail}
        elif args.xi:
            params["state"] = {"kind": "cuntz", "xi": args.xi}
        return params
    if c == "endo":
        return {"u": args.u, "x": args.x}
    if c == "equiv":
        return {"p": _words(args.p), "q": _words(args.q)}
    if c == "kishimoto":
        return {"N": _ints(args.N)}
    if c == "rordam":
        return {
            "periods": _ints(args.periods),
            "samples": args.samples,
            "sampler": args.sampler,
            "tail_level": args.tail_level,
        }
    if c == "transport":
        params = {"pairs": args.pairs, "K": args.K}
        if args.blocks:
            params["blocks"] = _ints(args.blocks)
        return params
    if c == "cuntzify":
        params = {"samples": args.samples}
        if args.support:
            params["support"] = _words(args.support)
        return params
    if c == "strengthen":
        return {"m_max": args.m_max}
    raise AssertionError(c)


def _config(args) -> ExperimentConfig:
    if args.command == "run":
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        cfg = ExperimentConfig.from_dict(raw)
    else:
        cfg = ExperimentConfig(args.command, params=_params(args))
    # flags given on the command line override the config file
    if args.d is not None:
        cfg.d = args.d
    if args.seed is not None:
        cfg.seed = args.seed
    if args.tol is not None:
        cfg.tol = args.tol
    if args.format is not None:
        cfg.format = args.format
    if args.out is not None:
        cfg.output = args.out
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        report = run_experiment(cfg)
    except (ParseError, ValueError, KeyError, OSError, jsonschema.ValidationError) as exc:
        print(f"cuntzkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = to_csv(report) if cfg.format == "csv" else to_json(report)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if report["pass"] else EXIT_VIOLATION


if __name__ == "__main__":
    raise SystemExit(main())
