"""Command-line front end: optimize, eval, check and bench.

Exit codes: 0 success, 1 refuted equivalence (check), 2 usage or parse
error, 3 verification failure after optimization.  Defaults of the numeric
flags can be overridden with ``ANYSYN_*`` environment variables (for example
``ANYSYN_LEAVES=6``).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

from . import io
from .cost import BUILTINS, UnknownCostError, cost_names, evaluate, get_cost
from .opt import PassConfig, optimize
from .verify import EXHAUSTIVE_CAP, cec_exhaustive, cec_random

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3

DEFAULT_EXHAUSTIVE = 20
DEFAULT_VECTORS = 10000
CSV_COLUMNS = ["file", "nodes", "cost_name", "initial", "final", "accepted", "cpu_ms"]
NETWORK_SUFFIXES = {".aag", ".aig", ".xag"}


class UsageError(Exception):
    pass


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get("ANYSYN_" + name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"ANYSYN_{name} must be an integer, got {raw!r}") from None


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(path, extract_xors: bool):
    try:
        return io.load(path, extract_xors)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from None
    except (io.ParseError, UnicodeDecodeError, ValueError) as e:
        raise UsageError(f"{path}: {e}") from None


def _cost(name: str):
    try:
        return get_cost(name)
    except UnknownCostError as e:
        raise UsageError(str(e)) from None


def _pass_config(args, cost_name: str) -> PassConfig:
    try:
        return PassConfig(
            cost_name=cost_name, max_leaves=args.leaves, max_divisors=args.divisors,
            max_gates=args.gates, iterations=args.iters, seed=args.seed,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def _equivalent(a, b, cap: int, vectors: int, seed: int) -> tuple[bool, list | None, bool]:
    """(consistent, counterexample, proven)."""
    if a.num_pis <= cap:
        ok, cex = cec_exhaustive(a, b, return_cex=True)
        return ok, cex, True
    r = cec_random(a, b, vectors, seed)
    return r.consistent, r.counterexample, False


# ----------------------------------------------------------------------
# subcommands


def cmd_optimize(args) -> int:
    cf = _cost(args.cost)
    if args.out and Path(args.out).suffix == ".aig":
        raise UsageError("binary AIGER output is not supported; use .aag or .xag")
    net = _load(args.input, args.xor_extract)
    original = net.clone() if args.verify else None
    report = optimize(net, _pass_config(args, cf.name), cf)
    if args.verify:
        ok, cex, proven = _equivalent(original, net, min(args.exhaustive, EXHAUSTIVE_CAP), args.vectors, args.seed)
        if not ok:
            _log(f"verification failed; counterexample {''.join(map(str, cex))}")
            return EXIT_VERIFY
        _log("verified: equivalent" if proven else "verified: consistent (not proven)")
    if args.out:
        io.save(net, args.out)
    _log(f"{cf.name}: {report.initial_cost} -> {report.final_cost}, "
         f"accepted {report.accepted}/{report.attempted}, {report.total_ms:.1f} ms")
    if args.stats_json:
        Path(args.stats_json).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    names = [cf.name for cf in BUILTINS] if args.cost == "all" else [args.cost]
    costs = [_cost(n) for n in names]
    net = _load(args.input, args.xor_extract)
    values = {cf.name: evaluate(net, cf)[0] for cf in costs}
    if args.json:
        print(json.dumps(values, indent=2))
    else:
        width = max(len(n) for n in values)
        for name, v in values.items():
            print(f"{name:<{width}}  {v}")
    return EXIT_OK


def cmd_check(args) -> int:
    a = _load(args.a, args.xor_extract)
    b = _load(args.b, args.xor_extract)
    if a.num_pis != b.num_pis or a.num_pos != b.num_pos:
        raise UsageError(f"interfaces differ: {a.num_pis}/{a.num_pos} vs {b.num_pis}/{b.num_pos} PIs/POs")
    ok, cex, proven = _equivalent(a, b, min(args.exhaustive, EXHAUSTIVE_CAP), args.vectors, args.seed)
    if ok:
        print("equivalent" if proven else "consistent (not proven)")
        return EXIT_OK
    print("not equivalent")
    print("counterexample " + " ".join(f"{name}={v}" for name, v in zip(a.pi_names, cex)))
    return EXIT_REFUTED


def geomean(values) -> tuple[float, bool]:
    """Geometric mean with zeros replaced by 1; the flag says whether any were."""
    vals = list(values)
    if not vals:
        return 0.0, False
    flagged = any(v == 0 for v in vals)
    return math.exp(sum(math.log(v if v > 0 else 1) for v in vals) / len(vals)), flagged


def _bench_files(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix in NETWORK_SUFFIXES)


def cmd_bench(args) -> int:
    cf = _cost(args.cost)
    directory = Path(args.dir)
    if not directory.is_dir():
        raise UsageError(f"{directory} is not a directory")
    cfg = _pass_config(args, cf.name)
    rows = []
    for path in _bench_files(directory):
        try:
            net = io.load(path, args.xor_extract)
        except (OSError, io.ParseError, UnicodeDecodeError, ValueError) as e:
            _log(f"skipping {path.name}: {e}")
            continue
        nodes = net.num_gates
        started = time.time()
        report = optimize(net, cfg, cf)
        _log(f"{path.name}: {report.initial_cost} -> {report.final_cost} in {time.time() - started:.2f} s")
        rows.append({
            "file": path.name, "nodes": nodes, "cost_name": cf.name,
            "initial": report.initial_cost, "final": report.final_cost,
            "accepted": report.accepted, "cpu_ms": report.total_ms,
        })
    if not rows:
        _log("no network could be processed")
        return EXIT_REFUTED
    summary = {"file": "geomean", "cost_name": cf.name}
    any_zero = False
    for col in ("nodes", "initial", "final", "accepted", "cpu_ms"):
        g, flagged = geomean(r[col] for r in rows)
        summary[col] = round(g, 4)
        any_zero |= flagged
    if any_zero:
        summary["file"] = "geomean*"
        _log("* zeros replaced by 1 in the geometric mean")
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        writer.writerow(summary)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_opt_flags(p) -> None:
    p.add_argument("--leaves", type=int, default=_env_int("LEAVES", 8), help="max cut size (default 8)")
    p.add_argument("--divisors", type=int, default=_env_int("DIVISORS", 150), help="max divisors per window")
    p.add_argument("--gates", type=int, default=_env_int("GATES", 3), help="max gates per enumerated circuit")
    p.add_argument("--iters", type=int, default=_env_int("ITERS", 1), help="max passes")
    p.add_argument("--seed", type=int, default=_env_int("SEED", 0))
    p.add_argument("--xor-extract", action="store_true", help="turn AIGER XOR patterns into XOR gates")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anysyn", description="Cost-generic XAG resynthesis")
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("optimize", help="optimize a network under one cost")
    p.add_argument("input")
    p.add_argument("--cost", required=True, help="one of: " + ", ".join(cost_names()))
    p.add_argument("--out", help="write the optimized network (.aag or .xag)")
    _add_opt_flags(p)
    p.add_argument("--verify", action="store_true", help="check equivalence with the input")
    p.add_argument("--exhaustive", type=int, default=_env_int("EXHAUSTIVE", DEFAULT_EXHAUSTIVE),
                   help="exhaustive check up to this many PIs")
    p.add_argument("--vectors", type=int, default=_env_int("VECTORS", DEFAULT_VECTORS))
    p.add_argument("--stats-json", help="write the pass report as JSON")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("eval", help="print cost values")
    p.add_argument("input")
    p.add_argument("--cost", default="all", help="cost name or 'all' (default)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--xor-extract", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check", help="equivalence check of two networks")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--exhaustive", type=int, default=_env_int("EXHAUSTIVE", DEFAULT_EXHAUSTIVE))
    p.add_argument("--vectors", type=int, default=_env_int("VECTORS", DEFAULT_VECTORS))
    p.add_argument("--seed", type=int, default=_env_int("SEED", 0))
    p.add_argument("--xor-extract", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="optimize every network in a directory, CSV out")
    p.add_argument("dir")
    p.add_argument("--cost", required=True)
    p.add_argument("--csv", help="write the table here instead of stdout")
    _add_opt_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def _version() -> str:
    from . import __version__

    return __version__


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        _log(f"anysyn: error: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
