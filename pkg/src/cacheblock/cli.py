"""Command line entry point: ``cacheblock run|compare|transpile``.

Exit codes: 0 success, 1 usage, 2 verification failure, 3 capacity or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources

from . import bench, generators, qasm
from .chunks import SpaceConfig
from .circuit import Circuit
from .errors import (
    CapacityError,
    ConfigurationError,
    InfeasibleBlockingError,
    ParseError,
)
from .transpiler import cache_block

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_CONFIG = 0, 1, 2, 3

log = logging.getLogger("cacheblock")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_circuit_args(p: argparse.ArgumentParser):
    p.add_argument("--circuit", required=True,
                   help="qv | qft | random | demo | qasm:<path>")
    p.add_argument("--qubits", type=int, help="qubit count for generated circuits")
    p.add_argument("--depth", type=int, default=10, help="quantum volume depth")
    p.add_argument("--gates", type=int, default=200, help="gate count for --circuit random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chunk-qubits", type=int, required=True, dest="nc")


def _add_run_args(p: argparse.ArgumentParser):
    _add_circuit_args(p)
    p.add_argument("--spaces", type=int, default=1)
    p.add_argument("--fast-capacity", type=int, default=None,
                   help="fast-tier chunks per space (default: all chunks fast)")
    p.add_argument("--verify", action="store_true", help="compare with the dense simulator")
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--restore-order", action="store_true",
                   help="append chunk swaps that undo the final qubit map")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cacheblock", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="execute one circuit in one mode")
    _add_run_args(p_run)
    p_run.add_argument("--mode", choices=("baseline", "blocked"), default="blocked")

    p_cmp = sub.add_parser("compare", help="execute baseline and blocked modes side by side")
    _add_run_args(p_cmp)

    p_tr = sub.add_parser("transpile", help="show the cache-blocked circuit")
    _add_circuit_args(p_tr)
    p_tr.add_argument("--restore-order", action="store_true")
    p_tr.add_argument("--dump", action="store_true", help="print the annotated circuit")
    return parser


def load_circuit(args) -> tuple[Circuit, bench.CircuitInfo]:
    kind = args.circuit
    if kind.startswith("qasm:"):
        path = kind[len("qasm:"):]
        try:
            c = qasm.parse_file(path)
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        except ParseError as exc:
            raise UsageError(f"{path}:{exc.span.line}:{exc.span.column}: {exc.message}") from None
        return c, bench.CircuitInfo(os.path.basename(path), c.n_qubits)
    if kind == "demo":
        text = resources.files("cacheblock").joinpath("data/blocking_demo.qasm").read_text()
        c = qasm.parse(text)
        return c, bench.CircuitInfo("demo", c.n_qubits)
    if kind not in ("qv", "qft", "random"):
        raise UsageError(f"unknown circuit {kind!r}; use qv, qft, random, demo or qasm:<path>")
    if args.qubits is None:
        raise UsageError(f"--circuit {kind} needs --qubits")
    n = args.qubits
    try:
        if kind == "qv":
            return (generators.quantum_volume(n, args.depth, args.seed),
                    bench.CircuitInfo("qv", n, args.depth, args.seed))
        if kind == "qft":
            return generators.qft(n), bench.CircuitInfo("qft", n)
        return (generators.random_circuit(n, args.gates, args.seed),
                bench.CircuitInfo("random", n, args.gates, args.seed))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write(args, text: str, csv_mode: bool = False):
    if not args.out:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    if csv_mode:
        with open(args.out, "a", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _needs_header(args) -> bool:
    return not args.out or not os.path.exists(args.out) or os.path.getsize(args.out) == 0


def _verified(reports, tol: float) -> bool:
    ok = True
    for r in reports:
        if r.oracle_diff is not None and not r.oracle_diff <= tol:
            log.error("%s mode: oracle difference %.3e exceeds %.1e", r.mode, r.oracle_diff, tol)
            ok = False
    return ok


def cmd_run(args) -> int:
    c, info = load_circuit(args)
    cfg = SpaceConfig(args.spaces, args.fast_capacity)
    report = bench.run(c, info, args.nc, cfg, args.mode, args.verify, args.restore_order)
    if args.format == "csv":
        _write(args, bench.csv_text([report], _needs_header(args)), csv_mode=True)
    else:
        _write(args, report.to_json())
    return EXIT_OK if _verified([report], args.tolerance) else EXIT_VERIFY


def cmd_compare(args) -> int:
    c, info = load_circuit(args)
    cfg = SpaceConfig(args.spaces, args.fast_capacity)
    result = bench.compare(c, info, args.nc, cfg, args.verify, args.restore_order)
    reports = [bench.RunReport.from_dict(result[k]) for k in ("baseline", "blocked")]
    if args.format == "csv":
        _write(args, bench.csv_text(reports, _needs_header(args)), csv_mode=True)
    else:
        _write(args, json.dumps(result, indent=2))
    return EXIT_OK if _verified(reports, args.tolerance) else EXIT_VERIFY


def cmd_transpile(args) -> int:
    c, _ = load_circuit(args)
    result = cache_block(c, args.nc, restore_order=args.restore_order)
    stats = result.stats
    print(f"sections: {stats.sections}")
    print(f"chunk swaps inserted: {stats.chunk_swaps_inserted}")
    print(f"gates per section: {' '.join(map(str, stats.gates_per_section))}")
    print(f"final qubit map: {' '.join(map(str, result.final_map.mapping))}")
    if args.dump:
        print()
        sys.stdout.write(qasm.annotate(result.circuit))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    handler = {"run": cmd_run, "compare": cmd_compare, "transpile": cmd_transpile}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"cacheblock: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, CapacityError, InfeasibleBlockingError) as exc:
        print(f"cacheblock: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
