"""Pure-Python DPLL backend with two-watched-literal unit propagation.

Decisions pick the lowest unassigned variable, false first, so the search is
fully deterministic.
"""

import time
from collections import defaultdict
from typing import Optional

from .errors import TimeBudgetExceeded
from .formula import CnfFormula, Literal
from .sat_engine import SolverSession

# decisions between two deadline checks
_DEADLINE_STRIDE = 512


class DpllSession(SolverSession):

    def __init__(self, formula: CnfFormula, deadline: Optional[float] = None):
        super().__init__(formula, deadline)
        self._clauses: list[list[Literal]] = []
        self._units: list[Literal] = []
        self._watches: dict[Literal, list[int]] = defaultdict(list)
        for clause in formula.clauses:
            if len(clause) == 1:
                self._units.append(clause[0])
                continue
            index = len(self._clauses)
            self._clauses.append(list(clause))
            self._watches[clause[0]].append(index)
            self._watches[clause[1]].append(index)
        self._order = sorted(self._occurring)
        self._assign: dict[int, bool] = {}
        self._trail: list[Literal] = []
        self._qhead = 0

    def _value(self, lit: Literal) -> Optional[bool]:
        val = self._assign.get(abs(lit))
        if val is None:
            return None
        return val == (lit > 0)

    def _set(self, lit: Literal) -> None:
        self._assign[abs(lit)] = lit > 0
        self._trail.append(lit)

    def _undo(self, size: int) -> None:
        for lit in self._trail[size:]:
            del self._assign[abs(lit)]
        del self._trail[size:]
        self._qhead = min(self._qhead, size)

    def _propagate(self) -> bool:
        while self._qhead < len(self._trail):
            false_lit = -self._trail[self._qhead]
            self._qhead += 1
            watchers = self._watches[false_lit]
            kept: list[int] = []
            conflict = False
            for pos, ci in enumerate(watchers):
                if conflict:
                    kept.extend(watchers[pos:])
                    break
                clause = self._clauses[ci]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                if self._value(clause[0]) is True:
                    kept.append(ci)
                    continue
                for k in range(2, len(clause)):
                    if self._value(clause[k]) is not False:
                        clause[1], clause[k] = clause[k], clause[1]
                        self._watches[clause[1]].append(ci)
                        break
                else:
                    kept.append(ci)
                    if self._value(clause[0]) is False:
                        conflict = True
                    else:
                        self._set(clause[0])
            self._watches[false_lit] = kept
            if conflict:
                return False
        return True

    def _pick(self) -> Optional[int]:
        for var in self._order:
            if var not in self._assign:
                return var
        return None

    def _solve(self, assumptions: list[Literal]) -> Optional[list[Literal]]:
        self._undo(0)
        for lit in self._units + assumptions:
            val = self._value(lit)
            if val is False:
                return None
            if val is None:
                self._set(lit)
        if not self._propagate():
            return None

        # (trail size before the decision, decision literal, already flipped)
        decisions: list[tuple[int, Literal, bool]] = []
        steps = 0
        while True:
            var = self._pick()
            if var is None:
                return list(self._trail)

            steps += 1
            if self.deadline is not None and steps % _DEADLINE_STRIDE == 0:
                if time.monotonic() >= self.deadline:
                    raise TimeBudgetExceeded("Time budget exhausted during SAT query")

            decisions.append((len(self._trail), -var, False))
            self._set(-var)
            while not self._propagate():
                while decisions and decisions[-1][2]:
                    decisions.pop()
                if not decisions:
                    return None
                size, lit, _ = decisions.pop()
                self._undo(size)
                decisions.append((size, -lit, True))
                self._set(-lit)
