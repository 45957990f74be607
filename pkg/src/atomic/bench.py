import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import TextIO

from .analysis import GntOptions, gnt_atomic_sets
from .ase import eliminate
from .errors import AtomicError, DimacsParseError, TimeBudgetExceeded, UnsatisfiableFormulaError
from .formula import read_dimacs
from .records import CSV_COLUMNS, AnalysisRecord, BenchRow, ReductionRecord, csv_row

logger = logging.getLogger(__name__)

CNF_SUFFIXES = (".cnf", ".dimacs")


def find_instances(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix in CNF_SUFFIXES)


def run_instance(path: Path, options: GntOptions) -> BenchRow:
    """Analyze and eliminate one instance; failures become a marked row."""
    instance = path.stem
    try:
        formula = read_dimacs(path)
    except (DimacsParseError, OSError, ValueError) as e:
        logger.warning("%s: %s", instance, e)
        return BenchRow(instance=instance, status="error", error=str(e))

    sizes = {"vars": formula.var_count, "clauses": formula.clause_count}
    try:
        start = time.perf_counter()
        report = gnt_atomic_sets(formula, options)
        seconds = time.perf_counter() - start
        reduced, _ = eliminate(formula, report)
    except TimeBudgetExceeded:
        logger.warning("%s: timeout after %ss", instance, options.time_limit)
        return BenchRow(instance=instance, status="timeout", **sizes)
    except UnsatisfiableFormulaError as e:
        return BenchRow(instance=instance, status="unsat", error=str(e), **sizes)
    except AtomicError as e:
        logger.error("%s: %s", instance, e)
        return BenchRow(instance=instance, status="error", error=str(e), **sizes)

    logger.info("%s: %d sets in %.2fs", instance, len(report.sets), seconds)
    return BenchRow(
        instance=instance,
        status="ok",
        analysis=AnalysisRecord.build(instance, formula, report, seconds),
        reduction=ReductionRecord.build(instance, formula, reduced),
        **sizes,
    )


def run_bench(paths: list[Path], options: GntOptions, jobs: int = 1) -> list[BenchRow]:
    """Run every instance; jobs=1 keeps all measurements in this single thread."""
    if jobs <= 1:
        return [run_instance(path, options) for path in paths]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_instance, paths, [options] * len(paths)))


def write_csv(rows: list[BenchRow], out: TextIO) -> None:
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for row in rows:
        writer.writerow(csv_row(row))


def rows_to_json(rows: list[BenchRow]) -> str:
    return json.dumps([row.model_dump() for row in rows], indent=2)
