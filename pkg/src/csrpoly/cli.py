"""Command-line interface: ``csrpoly {expand,map,verify,bench}``.

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 overflow or capacity error. ``map`` prints 0-based indices; Matrix Market
files stay 1-based.
"""
from __future__ import annotations

import argparse
import itertools
import logging
import random
import sys
from typing import Callable, Sequence, TextIO

from . import benchmark as bench
from .csr import from_dense, random_csr, read_matrix_market, to_dense, write_matrix_market
from .errors import CsrPolyError
from .expansion import ExpansionSpec, expand, expand_dense
from .index_maps import ALL_KINDS, MappingKind, Mode, expanded_dim, forward_map, invert_map

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_OVERFLOW = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _kind_list(text: str) -> list[MappingKind]:
    kinds = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            kinds.append(MappingKind(int(tok[-1]), Mode(tok[:-1])))
        except (ValueError, IndexError, CsrPolyError):
            raise argparse.ArgumentTypeError(
                f"kinds look like poly2, inter3; got {tok!r}") from None
    return kinds


def _add_kind_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--degree", type=int, choices=(2, 3), required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="csrpoly", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expand", help="expand a Matrix Market file")
    p.add_argument("input", help="Matrix Market coordinate file")
    p.add_argument("output", nargs="?", default="-", help="output file (default: stdout)")
    _add_kind_args(p)
    p.add_argument("--include-lower", action="store_true",
                   help="prepend the degree-1 (and degree-2 for K=3) blocks")
    p.add_argument("--include-bias", action="store_true",
                   help="prepend a constant column; requires --include-lower")
    p.add_argument("--parallel", action="store_true", help="fill rows on numba threads")

    p = sub.add_parser("map", help="evaluate or invert a column mapping (0-based)")
    _add_kind_args(p)
    p.add_argument("--dim", type=int, required=True, help="input dimension D")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--tuple", type=_int_list, help="comma-separated column indices, e.g. 1,2")
    g.add_argument("--invert", type=int, metavar="COL", help="expanded column to invert")

    p = sub.add_parser("verify", help="run bijectivity and oracle-equivalence checks")
    p.add_argument("--max-dim", type=int, default=12)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bench", help="sparse vs dense scaling study, written as CSV")
    p.add_argument("--vary", choices=[v.value for v in bench.Vary], required=True)
    p.add_argument("--values", type=_float_list, required=True,
                   help="comma-separated grid for the varied parameter")
    p.add_argument("--rows", type=int, default=100, help="fixed row count N")
    p.add_argument("--cols", type=int, default=500, help="fixed dimension D")
    p.add_argument("--density", type=float, default=0.1, help="fixed density d")
    p.add_argument("--kinds", type=_kind_list, default=[MappingKind(2, Mode.POLYNOMIAL)],
                   help="comma-separated kinds, e.g. poly2,inter3 (default poly2)")
    p.add_argument("--algorithms", default="sparse,dense",
                   help="comma-separated subset of sparse,dense")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--warmup", type=int, default=0)
    p.add_argument("--memory-cap", type=float, default=2.0, help="dense memory cap in GiB")
    p.add_argument("--out", required=True, help="CSV output path")
    return parser


def _cmd_expand(args, stdout: TextIO) -> int:
    if args.include_bias and not args.include_lower:
        raise UsageError("csrpoly expand: error: --include-bias requires --include-lower")
    spec = ExpansionSpec(MappingKind(args.degree, Mode(args.mode)),
                         args.include_lower, args.include_bias)
    m = read_matrix_market(args.input)
    out = expand(m, spec, parallel=args.parallel)
    write_matrix_market(out, stdout if args.output == "-" else args.output)
    return EXIT_OK


def _cmd_map(args, stdout: TextIO) -> int:
    kind = MappingKind(args.degree, Mode(args.mode))
    if args.tuple is not None:
        print(forward_map(args.tuple, args.dim, kind), file=stdout)
    else:
        print(",".join(str(j) for j in invert_map(args.invert, args.dim, kind)), file=stdout)
    return EXIT_OK


def _tuples(D: int, kind: MappingKind):
    gen = itertools.combinations if kind.strict else itertools.combinations_with_replacement
    return gen(range(D), kind.degree)


def verify(
    max_dim: int,
    trials: int,
    seed: int,
    *,
    out: TextIO = sys.stdout,
    forward: Callable = forward_map,
    inverse: Callable = invert_map,
) -> bool:
    """Exhaustive mapping checks for D <= ``max_dim`` plus ``trials`` random
    sparse-vs-dense comparisons. Prints a summary and returns overall success.

    ``forward`` and ``inverse`` are injectable so the failure path can be tested.
    """
    if max_dim < 2:
        raise CsrPolyError("max_dim must be at least 2")
    passed = failed = 0
    for kind in ALL_KINDS:
        for D in range(kind.degree, max_dim + 1):
            tuples = list(_tuples(D, kind))
            ok = (
                len(tuples) == expanded_dim(D, kind)
                and [forward(t, D, kind) for t in tuples] == list(range(len(tuples)))
                and all(tuple(inverse(c, D, kind)) == t for c, t in enumerate(tuples))
            )
            passed += ok
            failed += not ok
            if not ok:
                print(f"FAIL bijection {kind} D={D}", file=out)
    bij = (passed, failed)

    rng = random.Random(seed)
    for trial in range(trials):
        kind = rng.choice(ALL_KINDS)
        lower = rng.random() < 0.5
        spec = ExpansionSpec(kind, lower, lower and rng.random() < 0.5)
        n_rows = rng.randint(1, 12)
        D = rng.randint(1, max_dim)
        m = random_csr(n_rows, D, rng.choice((0.0, 0.1, 0.3, 0.7, 1.0)), rng.getrandbits(63))
        ok = expand(m, spec) == from_dense(expand_dense(to_dense(m), spec))
        passed += ok
        failed += not ok
        if not ok:
            print(f"FAIL oracle trial {trial}: {spec} on {m}", file=out)

    print(f"bijection checks: {bij[0]} passed, {bij[1]} failed", file=out)
    print(f"oracle checks: {passed - bij[0]} passed, {failed - bij[1]} failed", file=out)
    return failed == 0


def _cmd_verify(args, stdout: TextIO) -> int:
    ok = verify(args.max_dim, args.trials, args.seed, out=stdout)
    return EXIT_OK if ok else EXIT_DATA


def _cmd_bench(args, stdout: TextIO) -> int:
    try:
        algorithms = [bench.Algorithm(a.strip()) for a in args.algorithms.split(",")]
    except ValueError:
        raise UsageError(f"unknown algorithm in {args.algorithms!r}") from None
    vary = bench.Vary(args.vary)
    config = bench.BenchConfig(
        vary=vary, values=args.values, fixed_n_rows=args.rows, fixed_n_cols=args.cols,
        fixed_density=args.density, kinds=args.kinds, algorithms=algorithms,
        repetitions=args.reps, seed=args.seed, warmup=args.warmup,
        memory_cap_bytes=int(args.memory_cap * 1024**3),
    )
    records = bench.run_bench(config)
    bench.write_csv(records, args.out)
    for kind in config.kinds:
        for algo in config.algorithms:
            sel = bench.select(records, algo, kind)
            means = bench.mean_times(sel, vary)
            if len(means) >= 3:
                slope = f"{bench.fit_loglog_slope(sel, vary):.3f}"
            else:
                slope = "n/a"
            print(f"{algo.value}\t{kind}\tslope={slope}\tpoints={len(means)}", file=stdout)
    return EXIT_OK


_COMMANDS = {
    "expand": _cmd_expand,
    "map": _cmd_map,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
}


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None,
         stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args, stdout)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except (OverflowError, MemoryError) as exc:
        print(f"csrpoly: capacity error: {exc}", file=stderr)
        return EXIT_OVERFLOW
    except (CsrPolyError, OSError) as exc:
        print(f"csrpoly: error: {exc}", file=stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
