"""Ground truth by exhaustive enumeration for small formulas.

A single pass over all 2^n assignments yields the model count, every
variable's cardinality and the partition of variables by truth-value column,
which is exactly the atomic-set structure.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from pydantic import BaseModel

from .analysis import AtomicSetReport, GntOptions, build_report, gnt_atomic_sets
from .ase import FateKind, VariableMap, eliminate
from .errors import OracleLimitError, UnsatisfiableFormulaError, VariableMapError
from .formula import CnfFormula

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 25
_CHUNK_BITS = 16


@dataclass(frozen=True)
class EnumerationResult:
    model_count: int
    cardinalities: dict[int, int]
    var_count: int
    # variables grouped by identical truth-value column over all models
    classes: tuple[tuple[int, ...], ...] = field(default=(), compare=False)


class VerificationResult(BaseModel):
    passed: bool
    diagnosis: Optional[str] = None


def _model_chunks(formula: CnfFormula) -> Iterator[np.ndarray]:
    """Yield boolean matrices of models; column j holds variable j + 1."""
    n = formula.var_count
    total = 1 << n
    step = 1 << min(n, _CHUNK_BITS)
    shifts = np.arange(n, dtype=np.int64)
    for start in range(0, total, step):
        index = np.arange(start, min(start + step, total), dtype=np.int64)
        bits = ((index[:, None] >> shifts) & 1).astype(bool)
        ok = np.ones(len(index), dtype=bool)
        for clause in formula.clauses:
            sat = np.zeros(len(index), dtype=bool)
            for lit in clause:
                column = bits[:, abs(lit) - 1]
                sat |= column if lit > 0 else ~column
            ok &= sat
        yield bits[ok]


def _refine(classes: list[list[int]], columns: np.ndarray) -> list[list[int]]:
    refined = []
    for members in classes:
        if len(members) == 1:
            refined.append(members)
            continue
        groups: dict[bytes, list[int]] = {}
        for var in members:
            groups.setdefault(columns[var - 1].tobytes(), []).append(var)
        refined.extend(groups.values())
    return refined


def _check_limit(formula: CnfFormula, limit: int) -> None:
    if formula.var_count > limit:
        raise OracleLimitError(
            f"Formula has {formula.var_count} variables, oracle limit is {limit}"
        )


def enumerate_models(formula: CnfFormula, limit: int = DEFAULT_LIMIT) -> EnumerationResult:
    """Count models over all declared variables, including unreferenced ones."""
    _check_limit(formula, limit)
    n = formula.var_count
    count = 0
    cardinalities = np.zeros(n, dtype=np.int64)
    classes: list[list[int]] = [list(range(1, n + 1))] if n else []

    for models in _model_chunks(formula):
        if not len(models):
            continue
        count += len(models)
        cardinalities += models.sum(axis=0)
        classes = _refine(classes, np.ascontiguousarray(models.T))

    logger.debug("Enumerated %d models over %d variables", count, n)
    return EnumerationResult(
        model_count=count,
        cardinalities={var: int(cardinalities[var - 1]) for var in range(1, n + 1)},
        var_count=n,
        classes=tuple(tuple(sorted(c)) for c in classes),
    )


def oracle_atomic_sets(formula: CnfFormula, limit: int = DEFAULT_LIMIT) -> AtomicSetReport:
    result = enumerate_models(formula, limit)
    if result.model_count == 0:
        raise UnsatisfiableFormulaError("Formula is unsatisfiable; atomic sets are undefined")
    core = [v for v, card in result.cardinalities.items() if card == result.model_count]
    dead = [v for v, card in result.cardinalities.items() if card == 0]
    backbone = set(core) | set(dead)
    regular = [c for c in result.classes if len(c) >= 2 and c[0] not in backbone]
    return build_report(regular, core, dead)


def verify_elimination(
    original: CnfFormula,
    reduced: CnfFormula,
    variable_map: VariableMap,
    limit: int = DEFAULT_LIMIT,
) -> VerificationResult:
    """Compare model counts and per-variable cardinalities through the map."""
    if set(variable_map.fates) != set(range(1, original.var_count + 1)):
        raise VariableMapError("Variable map does not cover the original variables")
    if variable_map.new_var_count != reduced.var_count:
        raise VariableMapError(
            f"Map declares {variable_map.new_var_count} variables, reduced formula has {reduced.var_count}"
        )

    before = enumerate_models(original, limit)
    after = enumerate_models(reduced, limit)
    if before.model_count != after.model_count:
        return VerificationResult(
            passed=False,
            diagnosis=f"Model count mismatch: {before.model_count} != {after.model_count}",
        )

    for var in range(1, original.var_count + 1):
        fate = variable_map.resolve(var)
        if fate.kind is FateKind.KEPT:
            expected = after.cardinalities[fate.target]
        elif fate.kind is FateKind.TRUE:
            expected = after.model_count
        else:
            expected = 0
        if before.cardinalities[var] != expected:
            return VerificationResult(
                passed=False,
                diagnosis=(
                    f"Cardinality mismatch for variable {var}: "
                    f"{before.cardinalities[var]} != {expected}"
                ),
            )
    return VerificationResult(passed=True)


def cross_check(
    formula: CnfFormula,
    options: Optional[GntOptions] = None,
    limit: int = DEFAULT_LIMIT,
) -> VerificationResult:
    """Check GnT against the oracle, then the elimination and its fixed point."""
    _check_limit(formula, limit)
    options = options or GntOptions()

    report = gnt_atomic_sets(formula, options)
    expected = oracle_atomic_sets(formula, limit)
    if report.backbone != expected.backbone:
        return VerificationResult(
            passed=False,
            diagnosis=f"Backbone mismatch: got {report.backbone}, expected {expected.backbone}",
        )
    if report.partition() != expected.partition():
        got = [s.members for s in report.sets]
        want = [s.members for s in expected.sets]
        return VerificationResult(passed=False, diagnosis=f"Atomic sets mismatch: got {got}, expected {want}")

    reduced, variable_map = eliminate(formula, report)
    result = verify_elimination(formula, reduced, variable_map, limit)
    if not result.passed:
        return result

    again = gnt_atomic_sets(reduced, options)
    if again.sets or again.backbone.core or again.backbone.dead:
        return VerificationResult(passed=False, diagnosis="Eliminated formula still has atomic sets or backbone")
    return VerificationResult(passed=True)
