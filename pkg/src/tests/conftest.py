import os
from pathlib import Path

import pytest

from src.atomic.formula import CnfFormula, read_dimacs
from src.atomic.fuzz import fuzz_corpus

# Build absolute path: tests/ -> src/ -> fixtures/fig1.cnf
FIG1_PATH = Path(__file__).parent.parent / "fixtures" / "fig1.cnf"


FUZZ_INSTANCES = int(os.environ.get("ATOMIC_FUZZ_INSTANCES", "500"))
FUZZ_SEED = int(os.environ.get("ATOMIC_FUZZ_SEED", "2024"))


@pytest.fixture
def fig1() -> CnfFormula:
    """Feature model A(B(D xor E), [C]) with C <=> E, as CNF."""
    return read_dimacs(FIG1_PATH)


@pytest.fixture
def fig1_path() -> Path:
    return FIG1_PATH


@pytest.fixture(scope="session")
def fuzz_instances() -> list[CnfFormula]:
    """Seeded satisfiable random CNFs, 8 to 20 variables."""
    return list(fuzz_corpus(FUZZ_INSTANCES, FUZZ_SEED, min_vars=8, max_vars=20))
