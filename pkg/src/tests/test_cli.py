"""
Tests for the command-line entry point and its exit codes.

Run with: pytest src/tests/test_cli.py -v
"""

import csv
import io
import json
import re
import shutil

import pytest
import requests

from main import (
    EXIT_OK,
    EXIT_ORACLE_LIMIT,
    EXIT_PARSE,
    EXIT_TIMEOUT,
    EXIT_UNSAT,
    EXIT_WRITE,
    main,
)
from src.atomic.formula import read_dimacs
from src.atomic.records import CSV_COLUMNS

SECONDS = re.compile(r'"seconds":\s*[0-9.eE+-]+')


@pytest.fixture
def unsat_path(tmp_path):
    path = tmp_path / "unsat.cnf"
    path.write_text("p cnf 1 2\n1 0\n-1 0\n")
    return path


@pytest.fixture
def bench_dir(tmp_path, fig1_path):
    directory = tmp_path / "instances"
    directory.mkdir()
    shutil.copy(fig1_path, directory / "fig1.cnf")
    (directory / "equiv.dimacs").write_text("p cnf 2 2\n-1 2 0\n1 -2 0\n")
    (directory / "notes.txt").write_text("not an instance\n")
    return directory


class TestAnalyze:
    """Tests for the analyze command."""

    def test_json_output(self, fig1_path, capsys):
        assert main(["analyze", str(fig1_path), "--json"]) == EXIT_OK
        document = json.loads(capsys.readouterr().out)

        assert document["instance"] == "fig1"
        assert document["vars"] == 5
        assert document["clauses"] == 10
        assert document["backbone"] == {"core": [1, 2], "dead": []}
        assert document["atomic_sets"] == [
            {"members": [1, 2], "kind": "core"},
            {"members": [3, 5], "kind": "regular"},
        ]
        assert document["stats"]["sat_calls"] > 0

    def test_json_is_deterministic(self, fig1_path, capsys):
        """Two runs print the same bytes apart from the timing value."""
        outputs = []
        for _ in range(2):
            main(["analyze", str(fig1_path), "--json"])
            out = capsys.readouterr().out
            assert SECONDS.search(out)
            outputs.append(SECONDS.sub('"seconds": X', out))

        assert outputs[0] == outputs[1]

    def test_human_output_uses_names(self, fig1_path, capsys):
        assert main(["analyze", str(fig1_path)]) == EXIT_OK
        out = capsys.readouterr().out

        assert "{A, B}" in out
        assert "{C, E}" in out

    def test_native_solver(self, fig1_path, capsys):
        assert main(["analyze", str(fig1_path), "--json", "--solver", "dpll"]) == EXIT_OK
        assert len(json.loads(capsys.readouterr().out)["atomic_sets"]) == 2

    def test_unsatisfiable(self, unsat_path):
        assert main(["analyze", str(unsat_path)]) == EXIT_UNSAT

    def test_parse_error(self, tmp_path):
        path = tmp_path / "broken.cnf"
        path.write_text("p cnf 2 1\n3 0\n")
        assert main(["analyze", str(path)]) == EXIT_PARSE

    def test_empty_clause(self, tmp_path):
        """An explicit empty clause is reported as unsatisfiable input."""
        path = tmp_path / "empty.cnf"
        path.write_text("p cnf 2 1\n0\n")
        assert main(["analyze", str(path)]) == EXIT_UNSAT

    def test_invalid_utf8(self, tmp_path, caplog):
        path = tmp_path / "binary.cnf"
        path.write_bytes(b"c \xff\xfe name\np cnf 1 1\n1 0\n")

        assert main(["analyze", str(path)]) == EXIT_PARSE
        assert "UTF-8" in caplog.text

    def test_missing_file(self, tmp_path):
        assert main(["analyze", str(tmp_path / "nope.cnf")]) == EXIT_PARSE

    def test_timeout(self, fig1_path):
        assert main(["analyze", str(fig1_path), "--time-limit", "1e-9"]) == EXIT_TIMEOUT


class TestPreprocess:
    """Tests for the preprocess command."""

    def test_writes_reduced_formula_and_map(self, fig1_path, tmp_path, capsys):
        out = tmp_path / "fig1.ase.cnf"
        map_path = tmp_path / "fig1.map"

        code = main(["preprocess", str(fig1_path), "--out", str(out), "--map", str(map_path), "--json"])
        assert code == EXIT_OK

        record = json.loads(capsys.readouterr().out)
        assert record["vars_after"] == 2
        assert record["clauses_after"] == 2

        reduced = read_dimacs(out)
        assert reduced.var_count == 2
        assert sorted(reduced.clauses) == [(-1, -2), (1, 2)]
        assert map_path.read_text().startswith("map 5 2\n")

    def test_reduced_formula_is_a_fixed_point(self, fig1_path, tmp_path, capsys):
        out = tmp_path / "reduced.cnf"
        main(["preprocess", str(fig1_path), "--out", str(out)])
        capsys.readouterr()

        assert main(["analyze", str(out), "--json"]) == EXIT_OK
        document = json.loads(capsys.readouterr().out)
        assert document["atomic_sets"] == []
        assert document["backbone"] == {"core": [], "dead": []}

    def test_default_output_paths(self, fig1_path, tmp_path):
        local = tmp_path / "fig1.cnf"
        shutil.copy(fig1_path, local)

        assert main(["preprocess", str(local)]) == EXIT_OK
        assert (tmp_path / "fig1.ase.cnf").exists()
        assert (tmp_path / "fig1.ase.map").exists()

    def test_unwritable_output(self, fig1_path, tmp_path):
        out = tmp_path / "missing" / "out.cnf"
        assert main(["preprocess", str(fig1_path), "--out", str(out)]) == EXIT_WRITE


class TestVerify:
    """Tests for the verify command."""

    def test_single_instance(self, fig1_path, capsys):
        assert main(["verify", str(fig1_path)]) == EXIT_OK
        assert "PASS" in capsys.readouterr().out

    def test_oracle_limit(self, fig1_path):
        assert main(["verify", str(fig1_path), "--oracle-limit", "3"]) == EXIT_ORACLE_LIMIT

    def test_fuzz(self, capsys):
        assert main(["verify", "--fuzz", "5", "--seed", "1", "--json"]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary == {"instances": 5, "seed": 1, "failures": 0, "passed": True}

    def test_reduced_with_map(self, fig1_path, tmp_path):
        out = tmp_path / "reduced.cnf"
        map_path = tmp_path / "reduced.map"
        main(["preprocess", str(fig1_path), "--out", str(out), "--map", str(map_path)])

        code = main(["verify", str(fig1_path), "--reduced", str(out), "--map", str(map_path)])
        assert code == EXIT_OK

    def test_needs_input(self):
        assert main(["verify"]) == EXIT_PARSE


class TestBench:
    """Tests for the bench command."""

    def test_csv_to_stdout(self, bench_dir, capsys):
        assert main(["bench", str(bench_dir)]) == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))

        assert [row["instance"] for row in rows] == ["equiv", "fig1"]
        fig1 = rows[1]
        assert fig1["vars"] == "5"
        assert fig1["sets"] == "2"
        assert fig1["set_vars"] == "4"
        assert fig1["vars_after"] == "2"
        assert fig1["status"] == "ok"

    def test_header(self, bench_dir, capsys):
        main(["bench", str(bench_dir)])
        header = capsys.readouterr().out.splitlines()[0]
        assert header.split(",") == list(CSV_COLUMNS)

    def test_out_files(self, bench_dir, tmp_path, capsys):
        base = tmp_path / "results"
        assert main(["bench", str(bench_dir), "--out", str(base)]) == EXIT_OK

        assert (tmp_path / "results.csv").exists()
        data = json.loads((tmp_path / "results.json").read_text())
        assert len(data) == 2

    def test_parallel_matches_serial(self, bench_dir, capsys):
        main(["bench", str(bench_dir), "--json"])
        serial = json.loads(capsys.readouterr().out)
        main(["bench", str(bench_dir), "--json", "--jobs", "2"])
        parallel = json.loads(capsys.readouterr().out)

        def strip(rows):
            for row in rows:
                row["analysis"].pop("seconds", None)
            return rows

        assert strip(serial) == strip(parallel)

    def test_timeout_is_a_row(self, bench_dir, capsys):
        assert main(["bench", str(bench_dir), "--time-limit", "1e-9"]) == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert {row["status"] for row in rows} == {"timeout"}

    def test_unsat_instance_is_a_row(self, bench_dir, capsys):
        (bench_dir / "unsat.cnf").write_text("p cnf 1 2\n1 0\n-1 0\n")

        assert main(["bench", str(bench_dir)]) == EXIT_OK
        rows = {row["instance"]: row for row in csv.DictReader(io.StringIO(capsys.readouterr().out))}
        assert rows["unsat"]["status"] == "unsat"

    def test_unreadable_instances_are_rows(self, bench_dir, capsys):
        """Undecodable bytes and odd name comments never abort the run."""
        (bench_dir / "binary.cnf").write_bytes(b"c \xff\xfe name\np cnf 1 1\n1 0\n")
        (bench_dir / "superscript.cnf").write_text("c \u00b2 x\np cnf 1 1\n1 0\n", encoding="utf-8")

        assert main(["bench", str(bench_dir)]) == EXIT_OK
        rows = {row["instance"]: row for row in csv.DictReader(io.StringIO(capsys.readouterr().out))}
        assert rows["binary"]["status"] == "error"
        assert rows["superscript"]["status"] == "ok"
        assert rows["fig1"]["status"] == "ok"

    def test_empty_directory(self, tmp_path):
        assert main(["bench", str(tmp_path)]) == EXIT_PARSE


class TestFetch:
    """Tests for the fetch command."""

    def test_needs_url(self, monkeypatch, tmp_path):
        monkeypatch.setattr("main.CORPUS_URL", None)
        assert main(["fetch", "--dest", str(tmp_path)]) == EXIT_PARSE

    def test_download_error(self, monkeypatch, tmp_path):
        def refuse(url, stream=False, timeout=None):
            raise requests.ConnectionError("unreachable")

        monkeypatch.setattr("src.atomic.corpus.requests.get", refuse)
        assert main(["fetch", "--url", "https://example.org/c.zip", "--dest", str(tmp_path)]) == EXIT_WRITE
