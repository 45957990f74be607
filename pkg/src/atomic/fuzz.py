"""Seeded random CNF instances for oracle cross-checks."""

import random
from typing import Iterator

from .formula import CnfFormula
from .sat_engine import DEFAULT_SOLVER, create_session


def random_cnf(rng: random.Random, var_count: int, ratio: float, width: int = 3) -> CnfFormula:
    """Random width-k CNF with ratio * var_count clauses.

    A few bi-implications and unit clauses are planted so that instances
    regularly contain atomic sets and backbone variables.
    """
    clause_budget = max(1, round(ratio * var_count))
    clauses: list[list[int]] = []

    def sign() -> int:
        return rng.choice((1, -1))

    for _ in range(rng.randint(0, var_count // 4)):
        if len(clauses) + 2 > clause_budget:
            break
        x, y = rng.sample(range(1, var_count + 1), 2)
        clauses += [[-x, y], [x, -y]]
    for _ in range(rng.randint(0, 2)):
        if len(clauses) >= clause_budget:
            break
        clauses.append([sign() * rng.randint(1, var_count)])
    while len(clauses) < clause_budget:
        chosen = rng.sample(range(1, var_count + 1), min(width, var_count))
        clauses.append([sign() * var for var in chosen])
    rng.shuffle(clauses)
    return CnfFormula.from_clauses(var_count, clauses)


def is_satisfiable(formula: CnfFormula, solver: str = DEFAULT_SOLVER) -> bool:
    with create_session(formula, solver=solver) as session:
        return session.check([]).is_sat


def fuzz_corpus(
    count: int,
    seed: int,
    min_vars: int = 8,
    max_vars: int = 20,
    min_ratio: float = 1.5,
    max_ratio: float = 4.0,
    solver: str = DEFAULT_SOLVER,
) -> Iterator[CnfFormula]:
    """Yield `count` satisfiable instances; the same seed yields the same corpus."""
    for i in range(count):
        rng = random.Random(f"{seed}:{i}")
        while True:
            formula = random_cnf(
                rng,
                var_count=rng.randint(min_vars, max_vars),
                ratio=rng.uniform(min_ratio, max_ratio),
            )
            if is_satisfiable(formula, solver):
                yield formula
                break
