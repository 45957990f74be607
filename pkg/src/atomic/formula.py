"""CNF data model and DIMACS parsing/serialization.

Clauses are stored normalized: duplicate literals removed, literals sorted by
variable index, tautologies dropped. A formula never contains an empty clause.
"""

import io
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, TextIO, Union

from .errors import DimacsParseError, EmptyClauseError

logger = logging.getLogger(__name__)

Literal = int
Clause = tuple[Literal, ...]


class Tautology(Enum):
    """Marker returned by normalize_clause for clauses containing x and ¬x."""
    MARKER = "tautology"


TAUTOLOGY = Tautology.MARKER


def normalize_clause(literals: Iterable[Literal]) -> Union[Clause, Tautology]:
    """Deduplicate and sort a clause by variable index.

    Returns TAUTOLOGY when some variable occurs in both polarities.
    """
    unique = set(literals)
    if not unique:
        raise ValueError("Cannot normalize an empty clause")
    if 0 in unique:
        raise ValueError("Literal 0 is not a valid literal")
    for lit in unique:
        if -lit in unique:
            return TAUTOLOGY
    return tuple(sorted(unique, key=abs))


@dataclass(frozen=True)
class CnfFormula:
    var_count: int
    clauses: tuple[Clause, ...] = ()
    names: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.var_count < 0:
            raise ValueError("var_count must be nonnegative")
        for clause in self.clauses:
            if not clause:
                raise ValueError("Formulas cannot hold an empty clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.var_count:
                    raise ValueError(f"Literal {lit} out of range for {self.var_count} variables")

    @classmethod
    def from_clauses(
        cls,
        var_count: int,
        clauses: Iterable[Iterable[Literal]],
        names: Optional[Mapping[int, str]] = None,
    ) -> "CnfFormula":
        """Build a formula from raw clauses, normalizing each and dropping tautologies."""
        normalized = []
        for clause in clauses:
            result = normalize_clause(clause)
            if result is not TAUTOLOGY:
                normalized.append(result)
        return cls(var_count=var_count, clauses=tuple(normalized), names=dict(names or {}))

    @property
    def clause_count(self) -> int:
        return len(self.clauses)

    def variables(self) -> set[int]:
        """Variables that occur in at least one clause."""
        return {abs(lit) for clause in self.clauses for lit in clause}

    def name_of(self, var: int) -> str:
        return self.names.get(var, str(var))


def _numbered_lines(stream: TextIO) -> Iterator[tuple[int, str]]:
    # decoding runs ahead of line splitting, so a decode error carries no line number
    lines = iter(stream)
    line_number = 0
    while True:
        try:
            raw = next(lines)
        except StopIteration:
            return
        except UnicodeDecodeError as e:
            raise DimacsParseError(f"Input is not valid UTF-8 ({e.reason})") from e
        line_number += 1
        yield line_number, raw


def parse_dimacs(text: Union[str, TextIO]) -> CnfFormula:
    """Parse DIMACS CNF from a string or text stream.

    Comment lines of the form ``c <index> <name>`` become variable names.
    Clauses may span several lines; each must end with 0.
    """
    stream = io.StringIO(text) if isinstance(text, str) else text

    var_count: Optional[int] = None
    declared_clauses = 0
    clauses: list[Clause] = []
    pending: list[int] = []
    name_comments: dict[int, str] = {}
    dropped = 0
    line_number = 0

    for line_number, raw in _numbered_lines(stream):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split(maxsplit=2)
            index = parts[1] if len(parts) == 3 and parts[0] == "c" else ""
            # isdigit alone accepts superscripts that int() rejects
            if index.isascii() and index.isdigit() and int(index) > 0:
                name_comments[int(index)] = parts[2].strip()
            continue
        if line.startswith("%"):
            # SATLIB-style end marker
            break
        if line.startswith("p"):
            if var_count is not None:
                raise DimacsParseError("Duplicate problem line", line_number)
            fields = line.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise DimacsParseError(f"Bad problem line '{line}'", line_number)
            try:
                var_count = int(fields[2])
                declared_clauses = int(fields[3])
            except ValueError:
                raise DimacsParseError(f"Bad problem line '{line}'", line_number) from None
            if var_count < 0 or declared_clauses < 0:
                raise DimacsParseError(f"Negative counts in problem line '{line}'", line_number)
            continue

        if var_count is None:
            raise DimacsParseError("Clause before problem line", line_number)
        try:
            tokens = [int(tok) for tok in line.split()]
        except ValueError:
            raise DimacsParseError(f"Non-integer token in '{line}'", line_number) from None

        for lit in tokens:
            if lit == 0:
                if not pending:
                    raise EmptyClauseError("Empty clause in input", line_number)
                result = normalize_clause(pending)
                if result is TAUTOLOGY:
                    dropped += 1
                else:
                    clauses.append(result)
                pending = []
            elif abs(lit) > var_count:
                raise DimacsParseError(
                    f"Literal {lit} exceeds declared variable count {var_count}", line_number
                )
            else:
                pending.append(lit)

    if var_count is None:
        raise DimacsParseError("Missing problem line")
    if pending:
        raise DimacsParseError("Last clause is not terminated by 0", line_number)

    parsed_count = len(clauses) + dropped
    if parsed_count != declared_clauses:
        logger.warning("Problem line declares %d clauses, found %d", declared_clauses, parsed_count)
    if dropped:
        logger.debug("Dropped %d tautological clauses", dropped)

    names = {idx: name for idx, name in name_comments.items() if idx <= var_count}
    return CnfFormula(var_count=var_count, clauses=tuple(clauses), names=names)


def write_dimacs(formula: CnfFormula) -> str:
    """Serialize a formula; names go into a comment block before the problem line."""
    lines = [f"c {idx} {formula.names[idx]}" for idx in sorted(formula.names)]
    lines.append(f"p cnf {formula.var_count} {formula.clause_count}")
    lines.extend(" ".join(str(lit) for lit in clause) + " 0" for clause in formula.clauses)
    return "\n".join(lines) + "\n"


def read_dimacs(path: Union[str, Path]) -> CnfFormula:
    with open(path, encoding="utf-8") as f:
        return parse_dimacs(f)


def save_dimacs(formula: CnfFormula, path: Union[str, Path]) -> None:
    Path(path).write_text(write_dimacs(formula))
