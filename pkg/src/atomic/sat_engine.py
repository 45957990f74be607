"""Assumption-based satisfiability queries behind a swappable session contract.

A session is loaded once with the clauses of a formula and answers repeated
``check(assumptions)`` queries. Returned models are total over
1..var_count; variables the backend leaves open are completed with false.
"""

import logging
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from pysat.solvers import Solver

from .errors import (
    ContradictoryAssumptionsError,
    SessionClosedError,
    TimeBudgetExceeded,
    UnknownSolverError,
)
from .formula import CnfFormula, Literal

logger = logging.getLogger(__name__)

DEFAULT_SOLVER = "m22"
NATIVE_SOLVER = "dpll"


@dataclass(frozen=True)
class Model:
    """Total truth assignment; values[i] is the value of variable i + 1."""
    values: tuple[bool, ...]

    @classmethod
    def from_literals(cls, var_count: int, literals: Iterable[Literal]) -> "Model":
        values = [False] * var_count
        for lit in literals:
            if lit != 0 and abs(lit) <= var_count:
                values[abs(lit) - 1] = lit > 0
        return cls(values=tuple(values))

    @property
    def var_count(self) -> int:
        return len(self.values)

    def value(self, var: int) -> bool:
        return self.values[var - 1]

    def positives(self) -> set[int]:
        return {i + 1 for i, val in enumerate(self.values) if val}

    def negatives(self) -> set[int]:
        return {i + 1 for i, val in enumerate(self.values) if not val}

    def literals(self) -> list[Literal]:
        return [i + 1 if val else -(i + 1) for i, val in enumerate(self.values)]

    def satisfies(self, formula: CnfFormula, assumptions: Iterable[Literal] = ()) -> bool:
        def holds(lit: Literal) -> bool:
            return self.value(abs(lit)) == (lit > 0)

        return all(any(holds(lit) for lit in clause) for clause in formula.clauses) and all(
            holds(lit) for lit in assumptions
        )


@dataclass(frozen=True)
class Satisfiable:
    model: Model

    @property
    def is_sat(self) -> bool:
        return True


@dataclass(frozen=True)
class Unsatisfiable:
    @property
    def is_sat(self) -> bool:
        return False


SatOutcome = Union[Satisfiable, Unsatisfiable]


class SolverSession(ABC):
    """Single-consumer query session over one immutable formula."""

    def __init__(self, formula: CnfFormula, deadline: Optional[float] = None):
        self.formula = formula
        self.var_count = formula.var_count
        # absolute time.monotonic() value; None disables the budget
        self.deadline = deadline
        self.calls = 0
        self._closed = False
        self._occurring = formula.variables()

    def check(self, assumptions: Iterable[Literal] = ()) -> SatOutcome:
        """Decide F ∧ assumptions; assumptions are not kept after the query."""
        if self._closed:
            raise SessionClosedError("Query on a closed solver session")

        assumed: dict[int, bool] = {}
        for lit in assumptions:
            var = abs(lit)
            if lit == 0 or var > self.var_count:
                raise ValueError(f"Assumption {lit} out of range for {self.var_count} variables")
            if assumed.get(var, lit > 0) != (lit > 0):
                raise ContradictoryAssumptionsError(f"Assumptions contain both {var} and {-var}")
            assumed[var] = lit > 0

        if self.deadline is not None and time.monotonic() >= self.deadline:
            raise TimeBudgetExceeded("Time budget exhausted")

        # variables absent from every clause cannot interact with the rest
        passed = [var if val else -var for var, val in assumed.items() if var in self._occurring]
        self.calls += 1
        literals = self._solve(passed)
        if literals is None:
            return Unsatisfiable()

        values = list(Model.from_literals(self.var_count, literals).values)
        for var, val in assumed.items():
            values[var - 1] = val
        return Satisfiable(Model(values=tuple(values)))

    @abstractmethod
    def _solve(self, assumptions: list[Literal]) -> Optional[list[Literal]]:
        """Return a (possibly partial) list of model literals, or None if unsatisfiable."""

    def close(self) -> None:
        self._closed = True

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class PySatSession(SolverSession):
    """Session backed by a PySAT solver (MiniSat 2.2 by default).

    With a deadline, one timer per session interrupts whatever query is running
    when the budget runs out.
    """

    def __init__(self, formula: CnfFormula, name: str = DEFAULT_SOLVER, deadline: Optional[float] = None):
        super().__init__(formula, deadline)
        self.name = name
        try:
            self._solver = Solver(name=name, bootstrap_with=[list(c) for c in formula.clauses])
        except (NotImplementedError, ValueError, AssertionError) as e:
            raise UnknownSolverError(f"Unknown SAT solver '{name}': {e}") from e

        self._timer: Optional[threading.Timer] = None
        if deadline is not None:
            self._timer = threading.Timer(max(0.0, deadline - time.monotonic()), self._solver.interrupt)
            self._timer.daemon = True
            self._timer.start()

    def _solve(self, assumptions: list[Literal]) -> Optional[list[Literal]]:
        if self._timer is None:
            result = self._solver.solve(assumptions=assumptions)
        else:
            result = self._solve_interruptible(assumptions)
        if not result:
            return None
        return self._solver.get_model() or []

    def _solve_interruptible(self, assumptions: list[Literal]) -> bool:
        try:
            result = self._solver.solve_limited(assumptions=assumptions, expect_interrupt=True)
        except NotImplementedError:
            logger.debug("Solver %s cannot be interrupted; solving without limit", self.name)
            result = self._solver.solve(assumptions=assumptions)
        if result is None:
            self._solver.clear_interrupt()
            raise TimeBudgetExceeded("Time budget exhausted during SAT query")
        return result

    def close(self) -> None:
        if self._timer is not None:
            self._timer.cancel()
        if not self._closed:
            self._solver.delete()
        super().close()


def create_session(
    formula: CnfFormula,
    solver: str = DEFAULT_SOLVER,
    deadline: Optional[float] = None,
) -> SolverSession:
    """Load formula into a fresh session of the named backend."""
    if solver == NATIVE_SOLVER:
        from .dpll import DpllSession

        return DpllSession(formula, deadline=deadline)
    return PySatSession(formula, name=solver, deadline=deadline)
