"""Atomic-set elimination.

Pipeline: merge every regular atomic set onto its smallest member, fix core
variables to true and dead variables to false, propagate units to fixpoint,
drop duplicate clauses and renumber the surviving variables. The returned
VariableMap records what happened to every original variable.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Union

from .analysis import AtomicSetReport
from .errors import InconsistentReportError, VariableMapError
from .formula import Clause, CnfFormula

logger = logging.getLogger(__name__)


class FateKind(str, Enum):
    KEPT = "KEPT"
    MERGED = "MERGED"
    TRUE = "TRUE"
    FALSE = "FALSE"


@dataclass(frozen=True)
class VariableFate:
    kind: FateKind
    # new index for KEPT, original representative index for MERGED
    target: Optional[int] = None

    @classmethod
    def kept(cls, new_index: int) -> "VariableFate":
        return cls(FateKind.KEPT, new_index)

    @classmethod
    def merged_into(cls, representative: int) -> "VariableFate":
        return cls(FateKind.MERGED, representative)

    @property
    def is_constant(self) -> bool:
        return self.kind in (FateKind.TRUE, FateKind.FALSE)


CONST_TRUE = VariableFate(FateKind.TRUE)
CONST_FALSE = VariableFate(FateKind.FALSE)


@dataclass(frozen=True)
class VariableMap:
    fates: Mapping[int, VariableFate]
    new_var_count: int
    old_var_count: int = 0

    def resolve(self, var: int) -> VariableFate:
        """Follow a MERGED fate to its representative's KEPT or constant fate."""
        fate = self.fates[var]
        if fate.kind is FateKind.MERGED:
            fate = self.fates[fate.target]
            if fate.kind is FateKind.MERGED:
                raise VariableMapError(f"Variable {var} merges into another merged variable")
        return fate

    def is_identity(self) -> bool:
        return self.new_var_count == self.old_var_count and all(
            fate == VariableFate.kept(var) for var, fate in self.fates.items()
        )


@dataclass(frozen=True)
class Conflict:
    """Unit propagation falsified this clause."""
    clause: Clause


@dataclass(frozen=True)
class Propagation:
    formula: CnfFormula
    constants: dict[int, bool] = field(default_factory=dict)


def substitute(formula: CnfFormula, representative_of: Mapping[int, int]) -> CnfFormula:
    """Rewrite each literal onto its representative, keeping polarity."""
    for var, rep in representative_of.items():
        if representative_of.get(rep, rep) != rep:
            raise ValueError(f"Map is not a projection: {var} -> {rep} -> {representative_of[rep]}")

    def rewrite(lit: int) -> int:
        rep = representative_of.get(abs(lit), abs(lit))
        return rep if lit > 0 else -rep

    return CnfFormula.from_clauses(
        formula.var_count,
        ([rewrite(lit) for lit in clause] for clause in formula.clauses),
        formula.names,
    )


def unit_propagate(formula: CnfFormula, constants: Mapping[int, bool]) -> Union[Propagation, Conflict]:
    """Propagate constants and unit clauses to fixpoint."""
    assignment: dict[int, bool] = dict(constants)
    occurrences: dict[int, list[int]] = {}
    for ci, clause in enumerate(formula.clauses):
        for lit in clause:
            occurrences.setdefault(abs(lit), []).append(ci)

    def value(lit: int) -> Optional[bool]:
        val = assignment.get(abs(lit))
        return None if val is None else val == (lit > 0)

    satisfied = [False] * formula.clause_count

    def visit(ci: int) -> Optional[Conflict]:
        if satisfied[ci]:
            return None
        clause = formula.clauses[ci]
        open_lits = []
        for lit in clause:
            val = value(lit)
            if val is True:
                satisfied[ci] = True
                return None
            if val is None:
                open_lits.append(lit)
        if not open_lits:
            return Conflict(clause=clause)
        if len(open_lits) == 1:
            unit = open_lits[0]
            assignment[abs(unit)] = unit > 0
            queue.append(abs(unit))
        return None

    queue: deque[int] = deque(assignment)
    for ci in range(formula.clause_count):
        conflict = visit(ci)
        if conflict:
            return conflict
    while queue:
        var = queue.popleft()
        for ci in occurrences.get(var, ()):
            conflict = visit(ci)
            if conflict:
                return conflict

    clauses = []
    for ci, clause in enumerate(formula.clauses):
        if satisfied[ci]:
            continue
        remaining = [lit for lit in clause if value(lit) is None]
        clauses.append(remaining)
    simplified = CnfFormula.from_clauses(formula.var_count, clauses, formula.names)
    return Propagation(formula=simplified, constants=assignment)


def compact(formula: CnfFormula, surviving: set[int]) -> tuple[CnfFormula, dict[int, int]]:
    """Renumber surviving variables to 1..len(surviving), preserving order."""
    renumber = {old: new for new, old in enumerate(sorted(surviving), start=1)}
    clauses = []
    for clause in formula.clauses:
        rewritten = []
        for lit in clause:
            new = renumber.get(abs(lit))
            if new is None:
                raise ValueError(f"Clause {clause} references non-surviving variable {abs(lit)}")
            rewritten.append(new if lit > 0 else -new)
        clauses.append(tuple(rewritten))
    names = {renumber[old]: name for old, name in formula.names.items() if old in renumber}
    return CnfFormula(var_count=len(renumber), clauses=tuple(clauses), names=names), renumber


def _dedup_clauses(formula: CnfFormula) -> CnfFormula:
    unique = tuple(dict.fromkeys(formula.clauses))
    return CnfFormula(var_count=formula.var_count, clauses=unique, names=formula.names)


def _check_report(formula: CnfFormula, report: AtomicSetReport) -> None:
    seen: set[int] = set()
    for atomic_set in report.sets:
        for var in atomic_set.members:
            if not 1 <= var <= formula.var_count:
                raise InconsistentReportError(f"Report mentions variable {var} outside the formula")
    for var in report.backbone.core | report.backbone.dead:
        if not 1 <= var <= formula.var_count:
            raise InconsistentReportError(f"Report mentions variable {var} outside the formula")
    if report.backbone.core & report.backbone.dead:
        raise InconsistentReportError("Variables reported both core and dead")
    backbone = report.backbone.core | report.backbone.dead
    for atomic_set in report.regular_sets():
        members = set(atomic_set.members)
        if members & (seen | backbone):
            raise InconsistentReportError(f"Atomic set {atomic_set.members} overlaps another set")
        seen |= members


def eliminate(formula: CnfFormula, report: AtomicSetReport) -> tuple[CnfFormula, VariableMap]:
    _check_report(formula, report)

    representative_of: dict[int, int] = {}
    for atomic_set in report.regular_sets():
        rep = min(atomic_set.members)
        for var in atomic_set.members:
            representative_of[var] = rep
    merged = substitute(formula, representative_of)

    constants = {var: True for var in report.backbone.core}
    constants.update({var: False for var in report.backbone.dead})
    result = unit_propagate(merged, constants)
    if isinstance(result, Conflict):
        raise InconsistentReportError(f"Unit propagation falsified clause {result.clause}")
    derived = len(result.constants) - len(constants)
    if derived:
        logger.debug("Propagation fixed %d further variables", derived)

    simplified = _dedup_clauses(result.formula)

    fates: dict[int, VariableFate] = {}
    surviving: set[int] = set()
    for var in range(1, formula.var_count + 1):
        if var in result.constants:
            fates[var] = CONST_TRUE if result.constants[var] else CONST_FALSE
        elif representative_of.get(var, var) != var:
            fates[var] = VariableFate.merged_into(representative_of[var])
        else:
            surviving.add(var)

    reduced, renumber = compact(simplified, surviving)
    for old, new in renumber.items():
        fates[old] = VariableFate.kept(new)

    logger.info(
        "Eliminated %d -> %d variables, %d -> %d clauses",
        formula.var_count, reduced.var_count, formula.clause_count, reduced.clause_count,
    )
    return reduced, VariableMap(fates=fates, new_var_count=reduced.var_count, old_var_count=formula.var_count)


def write_variable_map(variable_map: VariableMap) -> str:
    lines = [f"map {variable_map.old_var_count} {variable_map.new_var_count}"]
    for var in sorted(variable_map.fates):
        fate = variable_map.fates[var]
        if fate.is_constant:
            lines.append(f"{var} {fate.kind.value}")
        else:
            lines.append(f"{var} {fate.kind.value} {fate.target}")
    return "\n".join(lines) + "\n"


def parse_variable_map(text: str) -> VariableMap:
    lines = [line.split() for line in text.splitlines() if line.strip()]
    if not lines or len(lines[0]) != 3 or lines[0][0] != "map":
        raise VariableMapError("Missing 'map <old> <new>' header")
    try:
        old_count, new_count = int(lines[0][1]), int(lines[0][2])
        fates: dict[int, VariableFate] = {}
        for fields in lines[1:]:
            var, kind = int(fields[0]), FateKind(fields[1])
            if kind in (FateKind.TRUE, FateKind.FALSE):
                if len(fields) != 2:
                    raise VariableMapError(f"Unexpected target in '{' '.join(fields)}'")
                fates[var] = CONST_TRUE if kind is FateKind.TRUE else CONST_FALSE
            else:
                if len(fields) != 3:
                    raise VariableMapError(f"Missing target in '{' '.join(fields)}'")
                fates[var] = VariableFate(kind, int(fields[2]))
    except (ValueError, IndexError) as e:
        raise VariableMapError(f"Malformed variable map: {e}") from e

    if set(fates) != set(range(1, old_count + 1)):
        raise VariableMapError("Variable map does not cover every original variable")
    kept = sorted(f.target for f in fates.values() if f.kind is FateKind.KEPT)
    if kept != list(range(1, new_count + 1)):
        raise VariableMapError("KEPT indices are not a bijection onto the reduced variables")
    for var, fate in fates.items():
        if fate.kind is FateKind.MERGED and fate.target not in fates:
            raise VariableMapError(f"Variable {var} merges into unknown variable {fate.target}")
    return VariableMap(fates=fates, new_var_count=new_count, old_var_count=old_count)
