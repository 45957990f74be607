"""
Tests for the enumeration oracle and elimination verification.

Run with: pytest src/tests/test_oracle.py -v
"""

import pytest

from src.atomic.analysis import AtomicSet, SetKind, gnt_atomic_sets
from src.atomic.ase import eliminate
from src.atomic.errors import OracleLimitError, UnsatisfiableFormulaError, VariableMapError
from src.atomic.formula import CnfFormula
from src.atomic.oracle import (
    cross_check,
    enumerate_models,
    oracle_atomic_sets,
    verify_elimination,
)


class TestEnumerateModels:
    """Tests for enumerate_models."""

    def test_fig1(self, fig1):
        result = enumerate_models(fig1)

        assert result.model_count == 2
        assert result.cardinalities == {1: 2, 2: 2, 3: 1, 4: 1, 5: 1}

    def test_empty_formula(self):
        result = enumerate_models(CnfFormula(var_count=3))

        assert result.model_count == 8
        assert result.cardinalities == {1: 4, 2: 4, 3: 4}

    def test_unsatisfiable(self):
        result = enumerate_models(CnfFormula.from_clauses(1, [[1], [-1]]))

        assert result.model_count == 0
        assert result.cardinalities == {1: 0}

    def test_unreferenced_variable_doubles_count(self, fig1):
        wider = CnfFormula(var_count=6, clauses=fig1.clauses)
        result = enumerate_models(wider)

        assert result.model_count == 4
        assert result.cardinalities[6] == 2

    def test_classes(self, fig1):
        assert set(enumerate_models(fig1).classes) == {(1, 2), (3, 5), (4,)}

    def test_over_limit(self):
        with pytest.raises(OracleLimitError):
            enumerate_models(CnfFormula(var_count=4), limit=3)

    def test_more_than_one_chunk(self):
        """17 variables span two enumeration chunks."""
        formula = CnfFormula.from_clauses(17, [[1, 17]])
        result = enumerate_models(formula)

        assert result.model_count == 3 * 2 ** 15
        assert result.cardinalities[17] == 2 ** 16
        assert result.cardinalities[2] == 3 * 2 ** 14


class TestOracleAtomicSets:
    """Tests for oracle_atomic_sets."""

    def test_fig1(self, fig1):
        report = oracle_atomic_sets(fig1)

        assert report.sets == (
            AtomicSet((1, 2), SetKind.CORE),
            AtomicSet((3, 5), SetKind.REGULAR),
        )

    def test_equivalence(self):
        formula = CnfFormula.from_clauses(2, [[-1, 2], [1, -2]])
        assert oracle_atomic_sets(formula).sets == (AtomicSet((1, 2)),)

    def test_agrees_with_gnt(self, fig1):
        assert oracle_atomic_sets(fig1) == gnt_atomic_sets(fig1)

    def test_unsatisfiable(self):
        with pytest.raises(UnsatisfiableFormulaError):
            oracle_atomic_sets(CnfFormula.from_clauses(1, [[1], [-1]]))


class TestVerifyElimination:
    """Tests for verify_elimination."""

    def test_fig1_passes(self, fig1):
        reduced, variable_map = eliminate(fig1, gnt_atomic_sets(fig1))
        assert verify_elimination(fig1, reduced, variable_map).passed

    def test_tampered_formula_fails(self, fig1):
        reduced, variable_map = eliminate(fig1, gnt_atomic_sets(fig1))
        tampered = CnfFormula(var_count=reduced.var_count, clauses=reduced.clauses + ((1,),))

        result = verify_elimination(fig1, tampered, variable_map)
        assert not result.passed
        assert "Model count" in result.diagnosis

    def test_cardinality_mismatch(self, fig1):
        """Equal model counts still fail when a kept variable changes frequency."""
        _, variable_map = eliminate(fig1, gnt_atomic_sets(fig1))
        wrong = CnfFormula.from_clauses(2, [[1]])

        result = verify_elimination(fig1, wrong, variable_map)
        assert not result.passed
        assert "Cardinality mismatch for variable 3" in result.diagnosis

    def test_map_does_not_match(self, fig1):
        reduced, variable_map = eliminate(fig1, gnt_atomic_sets(fig1))
        with pytest.raises(VariableMapError):
            verify_elimination(fig1, CnfFormula(var_count=3), variable_map)


class TestCrossCheck:
    """Tests for cross_check."""

    def test_fig1(self, fig1):
        assert cross_check(fig1).passed

    def test_over_limit(self, fig1):
        with pytest.raises(OracleLimitError):
            cross_check(fig1, limit=4)
