from typing import Optional


class AtomicError(Exception):
    """Base class for every error raised by the atomic package."""


class DimacsParseError(AtomicError):
    """Malformed DIMACS input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"Line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class EmptyClauseError(DimacsParseError):
    """The input contains an explicit empty clause (trivially unsatisfiable)."""


class UnsatisfiableFormulaError(AtomicError):
    """Analysis is only defined for satisfiable formulas."""


class TimeBudgetExceeded(AtomicError):
    """The configured time limit ran out before the analysis finished."""


class SessionClosedError(AtomicError):
    pass


class ContradictoryAssumptionsError(AtomicError):
    pass


class UnknownSolverError(AtomicError):
    pass


class InconsistentReportError(AtomicError):
    """An atomic-set report does not fit the formula it is applied to."""


class OracleLimitError(AtomicError):
    pass


class VariableMapError(AtomicError):
    pass
