from typing import Literal, Optional

from pydantic import BaseModel, Field

from .analysis import AtomicSetReport
from .formula import CnfFormula


# --- Analysis document (analyze --json) ---

class BackboneEntry(BaseModel):
    core: list[int] = Field(default_factory=list)
    dead: list[int] = Field(default_factory=list)


class AtomicSetEntry(BaseModel):
    kind: str
    members: list[int]


class RunStats(BaseModel):
    sat_calls: int
    seconds: float


class AnalysisDocument(BaseModel):
    instance: str
    vars: int
    clauses: int
    backbone: BackboneEntry
    atomic_sets: list[AtomicSetEntry]
    stats: RunStats

    @classmethod
    def build(cls, instance: str, formula: CnfFormula, report: AtomicSetReport, seconds: float) -> "AnalysisDocument":
        return cls(
            instance=instance,
            vars=formula.var_count,
            clauses=formula.clause_count,
            backbone=BackboneEntry(
                core=sorted(report.backbone.core),
                dead=sorted(report.backbone.dead),
            ),
            atomic_sets=[
                AtomicSetEntry(kind=s.kind.value, members=list(s.members)) for s in report.sets
            ],
            stats=RunStats(sat_calls=report.stats.sat_calls, seconds=round(seconds, 4)),
        )


# --- Table rows ---

class AnalysisRecord(BaseModel):
    instance: str
    vars: int
    clauses: int
    sets: int
    set_vars: int
    mean: float
    max: int
    seconds: float
    sat_calls: int

    @classmethod
    def build(cls, instance: str, formula: CnfFormula, report: AtomicSetReport, seconds: float) -> "AnalysisRecord":
        sizes = [len(s) for s in report.sets]
        return cls(
            instance=instance,
            vars=formula.var_count,
            clauses=formula.clause_count,
            sets=len(sizes),
            set_vars=sum(sizes),
            mean=round(sum(sizes) / len(sizes), 2) if sizes else 0.0,
            max=max(sizes, default=0),
            seconds=round(seconds, 4),
            sat_calls=report.stats.sat_calls,
        )


def percent_delta(before: int, after: int) -> float:
    """(after - before) / before, 0 for an empty input."""
    return (after - before) / before if before else 0.0


def format_percent(delta: float) -> str:
    return f"{delta * 100:.1f}%"


class ReductionRecord(BaseModel):
    instance: str
    vars_before: int
    vars_after: int
    vars_delta: float
    clauses_before: int
    clauses_after: int
    clauses_delta: float

    @classmethod
    def build(cls, instance: str, original: CnfFormula, reduced: CnfFormula) -> "ReductionRecord":
        return cls(
            instance=instance,
            vars_before=original.var_count,
            vars_after=reduced.var_count,
            vars_delta=percent_delta(original.var_count, reduced.var_count),
            clauses_before=original.clause_count,
            clauses_after=reduced.clause_count,
            clauses_delta=percent_delta(original.clause_count, reduced.clause_count),
        )

    def describe(self) -> str:
        return "\n".join([
            f"Variables: {self.vars_before:,} -> {self.vars_after:,} ({format_percent(self.vars_delta)})",
            f"Clauses:   {self.clauses_before:,} -> {self.clauses_after:,} ({format_percent(self.clauses_delta)})",
        ])


class BenchRow(BaseModel):
    instance: str
    status: Literal["ok", "timeout", "unsat", "error"]
    vars: Optional[int] = None
    clauses: Optional[int] = None
    analysis: Optional[AnalysisRecord] = None
    reduction: Optional[ReductionRecord] = None
    error: Optional[str] = None


CSV_COLUMNS = [
    "instance", "vars", "clauses", "sets", "set_vars", "mean", "max", "seconds", "sat_calls",
    "vars_after", "vars_delta", "clauses_after", "clauses_delta", "status",
]


def csv_row(row: BenchRow) -> dict:
    values = {column: "" for column in CSV_COLUMNS}
    values["instance"] = row.instance
    values["status"] = row.status
    if row.vars is not None:
        values["vars"] = row.vars
        values["clauses"] = row.clauses
    if row.analysis:
        values.update(row.analysis.model_dump(exclude={"instance"}))
    if row.reduction:
        values.update({
            "vars_after": row.reduction.vars_after,
            "vars_delta": format_percent(row.reduction.vars_delta),
            "clauses_after": row.reduction.clauses_after,
            "clauses_delta": format_percent(row.reduction.clauses_delta),
        })
    return values
