"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 budget exceeded, 4 commuting words.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .carrier import LabelledGraph
from .cuspgeom import BaseSurface
from .experiments import (
    CommutingWords,
    carrier_demo,
    exact_tangled_fraction,
    fold_words,
    horoball_experiment,
    mc_tangled_fraction,
    parse_range,
    transitive_fraction,
    verify_count_bound,
)
from .freegroup import parse_word
from .homspace import BudgetExceeded, DEFAULT_BUDGET, Homomorphism

EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_HYPOTHESIS = 4

CSV_COLUMNS = {
    "fraction": ["n", "numerator", "denominator", "estimate", "stderr", "exact", "seed", "samples", "version"],
    "count-bound": ["n", "exact", "bound", "hom_count", "exact_ratio", "bound_ratio", "chi", "C", "C_n_chi"],
}


class UsageError(Exception):
    pass


def _degrees(args) -> list[int]:
    if args.degrees:
        return parse_range(args.degrees)
    if args.degree is not None:
        return [args.degree]
    raise UsageError("one of --degree or --degrees is required")


def _words(args):
    return parse_word(args.w1, args.rank), parse_word(args.w2, args.rank)


def _require_seed(args):
    if args.seed is None:
        raise UsageError(f"{args.command} is stochastic and needs --seed")
    if args.samples is None or args.samples < 1:
        raise UsageError(f"{args.command} needs --samples >= 1")


def cmd_tangle_exact(args):
    w1, w2 = _words(args)
    rows = [exact_tangled_fraction(w1, w2, args.R, n, args.transitive, args.budget).as_row()
            for n in _degrees(args)]
    return {"rows": rows}, "fraction"


def cmd_tangle_mc(args):
    _require_seed(args)
    w1, w2 = _words(args)
    rows = [mc_tangled_fraction(w1, w2, args.R, n, args.samples, args.seed, args.transitive,
                                args.workers).as_row()
            for n in _degrees(args)]
    return {"rows": rows}, "fraction"


def cmd_transitive_frac(args):
    if args.samples is not None:
        _require_seed(args)
    rows = [transitive_fraction(args.rank, n, args.samples, args.seed, args.budget, args.workers).as_row()
            for n in _degrees(args)]
    return {"rows": rows}, "fraction"


def cmd_count_bound(args):
    g = LabelledGraph.load(args.graph)
    return {"rows": verify_count_bound(g, _degrees(args), args.budget)}, "count-bound"


def cmd_horoball(args):
    if args.samples is not None:
        _require_seed(args)
    surface = BaseSurface.load(args.surface)
    rows, witnesses = horoball_experiment(surface, args.L, _degrees(args), args.samples, args.seed,
                                          args.budget)
    return {"rows": rows, "witnesses": witnesses}, "fraction"


def cmd_carrier_demo(args):
    w1, w2 = _words(args)
    phi = Homomorphism.load(args.hom)
    if phi.rank != args.rank:
        raise UsageError(f"homomorphism rank {phi.rank} does not match --rank {args.rank}")
    demo = carrier_demo(w1, w2, phi, args.k)
    if demo["warning"]:
        print(f"warning: {demo['warning']}", file=sys.stderr)
    return {"rows": [demo]}, None


def cmd_fold(args):
    words = [parse_word(w, args.rank) for w in args.words]
    return {"rows": [fold_words(words)]}, None


COMMANDS = {
    "tangle-exact": cmd_tangle_exact,
    "tangle-mc": cmd_tangle_mc,
    "transitive-frac": cmd_transitive_frac,
    "count-bound": cmd_count_bound,
    "horoball": cmd_horoball,
    "carrier-demo": cmd_carrier_demo,
    "fold": cmd_fold,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rank", type=int, default=2, help="number of free generators m")
    common.add_argument("--degree", type=int, help="single degree n")
    common.add_argument("--degrees", help="degrees as start:stop:step (inclusive) or a comma list")
    common.add_argument("--seed", type=int, help="seed for stochastic subcommands")
    common.add_argument("--samples", type=int, help="Monte-Carlo sample count")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max |Hom_{m,n}| to enumerate")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="json")

    parser = argparse.ArgumentParser(prog="tanglefree", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tanglefree {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def word_pair(p):
        p.add_argument("--w1", required=True, help="first word, e.g. 'A B a b'")
        p.add_argument("--w2", required=True)

    for name in ("tangle-exact", "tangle-mc"):
        p = sub.add_parser(name, parents=[common])
        word_pair(p)
        p.add_argument("-R", type=int, required=True, help="tangling radius")
        p.add_argument("--transitive", action="store_true", help="restrict to transitive homomorphisms")

    sub.add_parser("transitive-frac", parents=[common])

    p = sub.add_parser("count-bound", parents=[common])
    p.add_argument("--graph", required=True, help="graph JSON file")

    p = sub.add_parser("horoball", parents=[common])
    p.add_argument("--surface", required=True, help="surface descriptor JSON file")
    p.add_argument("-L", type=float, required=True, help="horoball perimeter")

    p = sub.add_parser("carrier-demo", parents=[common])
    word_pair(p)
    p.add_argument("--hom", required=True, help="homomorphism JSON file")
    p.add_argument("-k", type=int, required=True, help="common fixed point")

    p = sub.add_parser("fold", parents=[common])
    p.add_argument("words", nargs="+")
    return parser


def _config(args) -> dict:
    skip = {"out", "workers"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def render(report: dict, kind: str | None, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True, allow_nan=False, default=str) + "\n"
    if kind is None:
        raise UsageError(f"{report['command']} only supports --format json")
    buf = io.StringIO()
    columns = CSV_COLUMNS[kind]
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    stamp = {"seed": report["config"].get("seed"), "samples": report["config"].get("samples"),
             "version": report["version"]}
    for row in report["rows"]:
        row = {**row, **{k: v for k, v in stamp.items() if k not in row}}
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_clean(v) for v in value]
    return value


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, kind = COMMANDS[args.command](args)
        report = _clean({
            "tool": "tanglefree",
            "version": f"v{__version__}",
            "command": args.command,
            "config": _config(args),
            **payload,
        })
        text = render(report, kind, args.format)
    except UsageError as exc:
        parser.error(str(exc))
    except CommutingWords as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
