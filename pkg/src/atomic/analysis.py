"""Core/dead variables and atomic sets via generate-and-test.

For every undecided pivot v, one certificate with v true and one with v false
yield the candidates (true in the first, false in the second). Each candidate
u is then confirmed with UNSAT(F ∧ v ∧ ¬u) and UNSAT(F ∧ ¬v ∧ u).

Three augmentations can be toggled independently without changing the result:
  inline_backbone     the two certificate queries double as core/dead detection
  refutation_pruning  a refuting model removes every candidate it also refutes
  confinement         remainders R = C minus A of earlier pivots bound later candidate sets
"""

import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from pydantic import BaseModel

from .errors import UnsatisfiableFormulaError
from .formula import CnfFormula
from .sat_engine import DEFAULT_SOLVER, Model, SolverSession, create_session

logger = logging.getLogger(__name__)


class SetKind(str, Enum):
    CORE = "core"
    DEAD = "dead"
    REGULAR = "regular"


class Direction(str, Enum):
    POS = "pos"  # witness of F ∧ v ∧ ¬u
    NEG = "neg"  # witness of F ∧ ¬v ∧ u


class GntOptions(BaseModel):
    inline_backbone: bool = True
    refutation_pruning: bool = True
    confinement: bool = True
    time_limit: Optional[float] = None
    solver: str = DEFAULT_SOLVER


@dataclass(frozen=True)
class BackboneResult:
    core: frozenset[int] = frozenset()
    dead: frozenset[int] = frozenset()


@dataclass(frozen=True)
class AtomicSet:
    members: tuple[int, ...]
    kind: SetKind = SetKind.REGULAR

    @classmethod
    def of(cls, members: Iterable[int], kind: SetKind = SetKind.REGULAR) -> "AtomicSet":
        return cls(members=tuple(sorted(members)), kind=kind)

    def __len__(self) -> int:
        return len(self.members)


@dataclass
class GntStats:
    sat_calls: int = 0
    pivots: int = 0
    candidates: int = 0  # sum over pivots of undecided candidates
    inline_core: int = 0
    inline_dead: int = 0
    pruned_by_refutation: int = 0
    pruned_by_confinement: int = 0


@dataclass(frozen=True)
class AtomicSetReport:
    sets: tuple[AtomicSet, ...]
    backbone: BackboneResult
    stats: GntStats = field(default_factory=GntStats, compare=False)

    def regular_sets(self) -> list[AtomicSet]:
        return [s for s in self.sets if s.kind is SetKind.REGULAR]

    def partition(self) -> frozenset[tuple[SetKind, frozenset[int]]]:
        """Order-free view of the sets, used to compare reports."""
        return frozenset((s.kind, frozenset(s.members)) for s in self.sets)

    @property
    def set_vars(self) -> int:
        return sum(len(s) for s in self.sets)


def build_report(
    regular: Iterable[Iterable[int]],
    core: Iterable[int],
    dead: Iterable[int],
    stats: Optional[GntStats] = None,
) -> AtomicSetReport:
    """Assemble a report; core/dead become sets only with at least two members."""
    backbone = BackboneResult(core=frozenset(core), dead=frozenset(dead))
    sets = [AtomicSet.of(members) for members in regular]
    if len(backbone.core) >= 2:
        sets.append(AtomicSet.of(backbone.core, SetKind.CORE))
    if len(backbone.dead) >= 2:
        sets.append(AtomicSet.of(backbone.dead, SetKind.DEAD))
    sets.sort(key=lambda s: s.members[0])
    return AtomicSetReport(sets=tuple(sets), backbone=backbone, stats=stats or GntStats())


@dataclass(frozen=True)
class CandidateSet:
    candidates: frozenset[int]
    pivot: Optional[int] = None

    def __contains__(self, var: int) -> bool:
        return var in self.candidates

    def __len__(self) -> int:
        return len(self.candidates)

    def without(self, removed: Iterable[int]) -> "CandidateSet":
        kept = self.candidates - set(removed)
        if self.pivot is not None and self.pivot in self.candidates:
            kept |= {self.pivot}
        return CandidateSet(candidates=frozenset(kept), pivot=self.pivot)


class ConfinementIndex:
    """Remainder sets recorded per variable."""

    def __init__(self):
        self._remainders: dict[int, list[frozenset[int]]] = defaultdict(list)

    def record(self, remainder: Iterable[int]) -> None:
        remainder = frozenset(remainder)
        for var in remainder:
            self._remainders[var].append(remainder)

    def remainders(self, var: int) -> list[frozenset[int]]:
        return list(self._remainders.get(var, ()))


@dataclass(frozen=True)
class PairVerdict:
    confirmed: bool
    witness: Optional[Model] = None
    direction: Optional[Direction] = None


def candidate_set(model_pos: Model, model_neg: Model, pivot: Optional[int] = None) -> CandidateSet:
    """Variables true in model_pos and false in model_neg."""
    if model_pos.var_count != model_neg.var_count:
        raise ValueError(
            f"Models range over {model_pos.var_count} and {model_neg.var_count} variables"
        )
    if pivot is not None and not (model_pos.value(pivot) and not model_neg.value(pivot)):
        raise ValueError(f"Pivot {pivot} must be true in model_pos and false in model_neg")
    candidates = model_pos.positives() & model_neg.negatives()
    return CandidateSet(candidates=frozenset(candidates), pivot=pivot)


def verify_pair(session: SolverSession, v: int, u: int) -> PairVerdict:
    """Confirm that v and u always agree, or return the first refuting model."""
    if v == u:
        raise ValueError("verify_pair needs two distinct variables")
    outcome = session.check([v, -u])
    if outcome.is_sat:
        return PairVerdict(confirmed=False, witness=outcome.model, direction=Direction.POS)
    outcome = session.check([-v, u])
    if outcome.is_sat:
        return PairVerdict(confirmed=False, witness=outcome.model, direction=Direction.NEG)
    return PairVerdict(confirmed=True)


def prune_with_refutation(candidates: CandidateSet, witness: Model, direction: Direction) -> CandidateSet:
    """Drop every candidate the witness shows disagreeing with the pivot."""
    if direction is Direction.POS:
        refuted = witness.negatives()
    else:
        refuted = witness.positives()
    return candidates.without(refuted)


def apply_confinement(candidates: CandidateSet, pivot: int, index: ConfinementIndex) -> CandidateSet:
    confined = set(candidates.candidates)
    for remainder in index.remainders(pivot):
        confined &= remainder
    return CandidateSet(candidates=frozenset(confined), pivot=candidates.pivot)


def _unsatisfiable() -> UnsatisfiableFormulaError:
    return UnsatisfiableFormulaError("Formula is unsatisfiable; atomic sets are undefined")


def compute_backbone(session: SolverSession, var_count: int) -> BackboneResult:
    """Exact core and dead variables, the certificate loop of GnT without verification.

    Satisfiability falls out of the first variable's certificates: the formula
    holds no empty clause, so with no variables it is trivially satisfiable.
    """
    core: set[int] = set()
    dead: set[int] = set()
    satisfiable = False

    for v in range(1, var_count + 1):
        if not session.check([v]).is_sat:
            if not satisfiable and not session.check([-v]).is_sat:
                raise _unsatisfiable()
            satisfiable = True
            dead.add(v)
            continue
        satisfiable = True
        if not session.check([-v]).is_sat:
            core.add(v)

    logger.debug("Backbone: %d core, %d dead", len(core), len(dead))
    return BackboneResult(core=frozenset(core), dead=frozenset(dead))


def gnt_atomic_sets(formula: CnfFormula, options: Optional[GntOptions] = None) -> AtomicSetReport:
    """Compute all atomic sets of a satisfiable formula.

    Raises UnsatisfiableFormulaError, or TimeBudgetExceeded without any partial report.
    """
    options = options or GntOptions()
    deadline = time.monotonic() + options.time_limit if options.time_limit is not None else None
    stats = GntStats()

    with create_session(formula, solver=options.solver, deadline=deadline) as session:
        core: set[int] = set()
        dead: set[int] = set()
        # Without the inline check the backbone pass has already settled satisfiability
        satisfiable = not options.inline_backbone
        if not options.inline_backbone:
            backbone = compute_backbone(session, formula.var_count)
            core |= backbone.core
            dead |= backbone.dead

        decided = core | dead
        index = ConfinementIndex()
        regular: list[set[int]] = []

        for v in range(1, formula.var_count + 1):
            if v in decided:
                continue
            stats.pivots += 1

            pos = session.check([v])
            if not pos.is_sat:
                if not satisfiable and not session.check([-v]).is_sat:
                    raise _unsatisfiable()
                satisfiable = True
                dead.add(v)
                decided.add(v)
                stats.inline_dead += 1
                continue
            satisfiable = True
            neg = session.check([-v])
            if not neg.is_sat:
                core.add(v)
                decided.add(v)
                stats.inline_core += 1
                continue

            candidates = candidate_set(pos.model, neg.model, pivot=v)
            if options.confinement:
                confined = apply_confinement(candidates, v, index)
                stats.pruned_by_confinement += len(candidates) - len(confined)
                candidates = confined
            generated = candidates

            members = {v}
            undecided = sorted(generated.candidates - decided - {v})
            stats.candidates += len(undecided)
            for u in undecided:
                if u not in candidates:
                    continue
                verdict = verify_pair(session, v, u)
                if verdict.confirmed:
                    members.add(u)
                    continue
                candidates = candidates.without([u])
                if options.refutation_pruning:
                    pruned = prune_with_refutation(candidates, verdict.witness, verdict.direction)
                    stats.pruned_by_refutation += len(
                        (candidates.candidates - pruned.candidates) - decided
                    )
                    candidates = pruned

            logger.debug("Pivot %d: %d candidates, %d members", v, len(generated), len(members))
            if len(members) > 1:
                regular.append(members)
            decided |= members
            if options.confinement:
                index.record(generated.candidates - members)

        stats.sat_calls = session.calls

    report = build_report(regular, core, dead, stats)
    logger.info(
        "Found %d atomic sets (%d variables) with %d SAT calls",
        len(report.sets), report.set_vars, stats.sat_calls,
    )
    return report
