import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from dotenv import load_dotenv

from src.atomic.analysis import AtomicSetReport, GntOptions, gnt_atomic_sets
from src.atomic.ase import eliminate, parse_variable_map, write_variable_map
from src.atomic.bench import find_instances, rows_to_json, run_bench, write_csv
from src.atomic.corpus import fetch_corpus
from src.atomic.errors import (
    AtomicError,
    DimacsParseError,
    EmptyClauseError,
    OracleLimitError,
    TimeBudgetExceeded,
    UnsatisfiableFormulaError,
)
from src.atomic.formula import CnfFormula, read_dimacs, write_dimacs
from src.atomic.fuzz import fuzz_corpus
from src.atomic.oracle import cross_check, verify_elimination
from src.atomic.records import AnalysisDocument, AnalysisRecord, ReductionRecord

load_dotenv()

# --- Configuration ---
SOLVER = os.environ.get("ATOMIC_SOLVER", "m22")
TIME_LIMIT = float(os.environ.get("ATOMIC_TIME_LIMIT", "600"))
ORACLE_LIMIT = int(os.environ.get("ATOMIC_ORACLE_LIMIT", "25"))
JOBS = int(os.environ.get("ATOMIC_JOBS", "1"))
LOG_LEVEL = os.environ.get("ATOMIC_LOG_LEVEL", "WARNING")
CORPUS_URL = os.environ.get("ATOMIC_CORPUS_URL")

# --- Exit codes ---
EXIT_OK = 0
EXIT_PARSE = 1
EXIT_UNSAT = 2
EXIT_TIMEOUT = 3
EXIT_WRITE = 4
EXIT_ORACLE_LIMIT = 5
EXIT_MISMATCH = 6

logger = logging.getLogger("atomic")


def gnt_options(args) -> GntOptions:
    """Build analysis options from the shared CLI flags."""
    return GntOptions(
        inline_backbone=not args.no_inline_backbone,
        refutation_pruning=not args.no_pruning,
        confinement=not args.no_confinement,
        time_limit=args.time_limit if args.time_limit and args.time_limit > 0 else None,
        solver=args.solver,
    )


def format_members(formula: CnfFormula, members) -> str:
    return "{" + ", ".join(formula.name_of(v) for v in members) + "}"


def print_report(instance: str, formula: CnfFormula, report: AtomicSetReport, seconds: float) -> None:
    record = AnalysisRecord.build(instance, formula, report, seconds)
    core = sorted(report.backbone.core)
    dead = sorted(report.backbone.dead)
    print(f"Instance: {instance} ({formula.var_count} variables, {formula.clause_count} clauses)")
    print(f"Core: {format_members(formula, core) if core else '-'}")
    print(f"Dead: {format_members(formula, dead) if dead else '-'}")
    print(f"Atomic sets: {record.sets}")
    for atomic_set in report.sets:
        print(f"  {atomic_set.kind.value:<8} {format_members(formula, atomic_set.members)}")
    print(f"Variables in sets: {record.set_vars} | mean {record.mean:.2f} | max {record.max}")
    print(f"SAT calls: {record.sat_calls} | {record.seconds:.2f}s")


def cmd_analyze(args) -> int:
    formula = read_dimacs(args.input)
    instance = Path(args.input).stem
    start = time.perf_counter()
    report = gnt_atomic_sets(formula, gnt_options(args))
    seconds = time.perf_counter() - start

    if args.json:
        print(AnalysisDocument.build(instance, formula, report, seconds).model_dump_json(indent=2))
    else:
        print_report(instance, formula, report, seconds)
    return EXIT_OK


def cmd_preprocess(args) -> int:
    formula = read_dimacs(args.input)
    instance = Path(args.input).stem
    report = gnt_atomic_sets(formula, gnt_options(args))
    reduced, variable_map = eliminate(formula, report)

    out_path = Path(args.out) if args.out else Path(args.input).with_suffix(".ase.cnf")
    map_path = Path(args.map) if args.map else out_path.with_suffix(".map")
    try:
        out_path.write_text(write_dimacs(reduced))
        map_path.write_text(write_variable_map(variable_map))
    except OSError as e:
        logger.error("Could not write output: %s", e)
        return EXIT_WRITE

    record = ReductionRecord.build(instance, formula, reduced)
    if args.json:
        print(record.model_dump_json(indent=2))
    else:
        print(record.describe())
        print(f"Wrote {out_path} and {map_path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    options = gnt_options(args)

    if args.fuzz:
        failures = 0
        for i, formula in enumerate(fuzz_corpus(args.fuzz, args.seed, solver=options.solver)):
            result = cross_check(formula, options, args.oracle_limit)
            if not result.passed:
                failures += 1
                logger.error("Instance %d (seed %s): %s", i, args.seed, result.diagnosis)
                logger.error("Failing formula:\n%s", write_dimacs(formula))
                if not args.keep_going:
                    break
        passed = failures == 0
        summary = {"instances": args.fuzz, "seed": args.seed, "failures": failures, "passed": passed}
        print(json.dumps(summary) if args.json else f"{'PASS' if passed else 'FAIL'}: {summary}")
        return EXIT_OK if passed else EXIT_MISMATCH

    if not args.input:
        logger.error("verify needs an input file or --fuzz N")
        return EXIT_PARSE
    formula = read_dimacs(args.input)
    if formula.var_count > args.oracle_limit:
        raise OracleLimitError(
            f"{args.input} has {formula.var_count} variables, oracle limit is {args.oracle_limit}"
        )

    if args.reduced:
        if not args.map:
            logger.error("--reduced needs --map")
            return EXIT_PARSE
        reduced = read_dimacs(args.reduced)
        variable_map = parse_variable_map(Path(args.map).read_text())
        result = verify_elimination(formula, reduced, variable_map, args.oracle_limit)
    else:
        result = cross_check(formula, options, args.oracle_limit)

    if args.json:
        print(result.model_dump_json())
    else:
        print("PASS" if result.passed else f"FAIL: {result.diagnosis}")
    return EXIT_OK if result.passed else EXIT_MISMATCH


def cmd_bench(args) -> int:
    directory = Path(args.directory)
    paths = find_instances(directory) if directory.is_dir() else []
    if not paths:
        logger.error("No DIMACS instances in %s", directory)
        return EXIT_PARSE

    rows = run_bench(paths, gnt_options(args), jobs=args.jobs)

    if args.out:
        base = Path(args.out)
        try:
            with open(base.with_suffix(".csv"), "w", newline="") as f:
                write_csv(rows, f)
            base.with_suffix(".json").write_text(rows_to_json(rows))
        except OSError as e:
            logger.error("Could not write bench results: %s", e)
            return EXIT_WRITE

    if args.json:
        print(rows_to_json(rows))
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_fetch(args) -> int:
    url = args.url or CORPUS_URL
    if not url:
        logger.error("No corpus URL given (use --url or ATOMIC_CORPUS_URL)")
        return EXIT_PARSE
    try:
        found = fetch_corpus(url, Path(args.dest))
    except OSError as e:
        logger.error("Fetching %s failed: %s", url, e)
        return EXIT_WRITE
    print(f"{len(found)} instances in {args.dest}")
    return EXIT_OK


def add_analysis_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    parser.add_argument("--time-limit", type=float, default=TIME_LIMIT, help="seconds per instance (0 disables)")
    parser.add_argument("--solver", default=SOLVER, help="PySAT solver name or 'dpll'")
    parser.add_argument("--no-inline-backbone", action="store_true", help="compute core/dead before GnT")
    parser.add_argument("--no-pruning", action="store_true", help="disable refutation pruning")
    parser.add_argument("--no-confinement", action="store_true", help="disable remainder confinement")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atomic",
        description="Atomic sets and atomic-set elimination for CNF formulas",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="compute backbone and atomic sets")
    analyze.add_argument("input")
    add_analysis_flags(analyze)
    analyze.set_defaults(handler=cmd_analyze)

    preprocess = sub.add_parser("preprocess", help="atomic-set elimination")
    preprocess.add_argument("input")
    preprocess.add_argument("--out", help="reduced DIMACS output path")
    preprocess.add_argument("--map", help="variable map output path")
    add_analysis_flags(preprocess)
    preprocess.set_defaults(handler=cmd_preprocess)

    verify = sub.add_parser("verify", help="cross-check against the enumeration oracle")
    verify.add_argument("input", nargs="?")
    verify.add_argument("--oracle-limit", type=int, default=ORACLE_LIMIT)
    verify.add_argument("--fuzz", type=int, default=0, help="number of random instances")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--keep-going", action="store_true", help="do not stop at the first fuzz failure")
    verify.add_argument("--reduced", help="previously reduced DIMACS to verify against input")
    verify.add_argument("--map", help="variable map belonging to --reduced")
    add_analysis_flags(verify)
    verify.set_defaults(handler=cmd_verify)

    bench = sub.add_parser("bench", help="analyze and eliminate every instance of a directory")
    bench.add_argument("directory")
    bench.add_argument("--jobs", type=int, default=JOBS)
    bench.add_argument("--out", help="write <out>.csv and <out>.json")
    add_analysis_flags(bench)
    bench.set_defaults(handler=cmd_bench)

    fetch = sub.add_parser("fetch", help="download a benchmark corpus archive")
    fetch.add_argument("--url", default=None)
    fetch.add_argument("--dest", default="corpus")
    fetch.set_defaults(handler=cmd_fetch)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else LOG_LEVEL,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.handler(args)
    except EmptyClauseError as e:
        logger.error("Trivially unsatisfiable input: %s", e)
        return EXIT_UNSAT
    except DimacsParseError as e:
        logger.error("Parse error: %s", e)
        return EXIT_PARSE
    except UnsatisfiableFormulaError as e:
        logger.error("%s", e)
        return EXIT_UNSAT
    except TimeBudgetExceeded as e:
        logger.error("%s (limit %ss)", e, getattr(args, "time_limit", None))
        return EXIT_TIMEOUT
    except OracleLimitError as e:
        logger.error("%s", e)
        return EXIT_ORACLE_LIMIT
    except AtomicError as e:
        logger.error("%s", e)
        return EXIT_PARSE
    except OSError as e:
        logger.error("Could not read input: %s", e)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
