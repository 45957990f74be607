from .analysis import (
    AtomicSet,
    AtomicSetReport,
    BackboneResult,
    GntOptions,
    SetKind,
    compute_backbone,
    gnt_atomic_sets,
)
from .ase import VariableMap, eliminate
from .formula import CnfFormula, parse_dimacs, read_dimacs, write_dimacs
from .oracle import enumerate_models, oracle_atomic_sets, verify_elimination
from .sat_engine import create_session

__all__ = [
    "AtomicSet",
    "AtomicSetReport",
    "BackboneResult",
    "CnfFormula",
    "GntOptions",
    "SetKind",
    "VariableMap",
    "compute_backbone",
    "create_session",
    "eliminate",
    "enumerate_models",
    "gnt_atomic_sets",
    "oracle_atomic_sets",
    "parse_dimacs",
    "read_dimacs",
    "verify_elimination",
    "write_dimacs",
]
