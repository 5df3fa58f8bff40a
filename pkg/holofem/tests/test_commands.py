import io
import json
from unittest.mock import patch

import pytest

from holofem import cli, properties
from holofem import study as study_module
from holofem.base import HolofemDict
from holofem.commands import solve
from holofem.mesh import generate_uniform_mesh, write_mesh
from holofem.properties import CheckResult
from holofem.sim.search import SearchResult
from holofem.study import ConvergenceRecord


def run(*argv):
    stdout, stderr = io.StringIO(), io.StringIO()
    status = cli.main(list(argv), stdout=stdout, stderr=stderr)
    return status, stdout.getvalue(), stderr.getvalue()


class TestMain:
    def test_no_arguments(self):
        status, stdout, stderr = run()
        assert status == 1
        assert not stdout
        assert stderr.startswith("usage: holofem {solve,study,oracle,indicator-map,check}")

    def test_help(self):
        status, stdout, _ = run("--help")
        assert status == 0
        assert "Exit status" in stdout

    def test_unknown_command(self):
        status, _, stderr = run("invert")
        assert status == 1
        assert "unknown command 'invert'" in stderr

    def test_command_help(self, capsys):
        status, _, _ = run("solve", "--help")
        assert status == 0
        assert "--region" in capsys.readouterr().out

    @pytest.mark.parametrize(
        "argv",
        [
            ("solve", "--nx", "2"),
            ("solve", "--nx", "2", "--region", "20,40"),
            ("solve", "--nx", "2", "--region", "20,40,-1,1", "--colour", "red"),
            ("study", "--nx", "4,0"),
            ("solve", "--nx", "2", "--region=-1,1,-1,1"),
            ("solve", "--mesh", "/nonexistent/mesh.txt", "--region", "20,40,-1,1"),
        ],
    )
    def test_invalid_input(self, argv):
        status, stdout, stderr = run(*argv)
        assert status == 1
        assert not stdout
        assert "error" in stderr


class TestSolve:
    def test_single_eigenvalue(self):
        status, stdout, _ = run("solve", "--nx", "2", "--region", "20,40,-1,1")
        assert status == 0
        lines = stdout.splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("32.000000000000 ")

    def test_json(self):
        status, stdout, _ = run(
            "solve", "--nx", "2", "--region", "20,40,-1,1", "--format", "json"
        )
        assert status == 0
        data = json.loads(stdout)
        assert data["region"] == [20, 40, -1, 1]
        assert data["estimates"][0]["value"][0] == pytest.approx(32)

    def test_deterministic(self):
        argv = ("solve", "--nx", "4", "--region", "15,60,-1,1", "--format", "json")
        assert run(*argv) == run(*argv)

    def test_crisscross_pattern(self):
        status, stdout, _ = run(
            "solve", "--nx", "10", "--pattern", "crisscross", "--region", "15,25,-0.5,0.5"
        )
        assert status == 0
        assert stdout.startswith("19.8751")

    def test_mesh_file(self, tmp_path):
        path = tmp_path / "square.txt"
        write_mesh(generate_uniform_mesh(2), path)
        status, stdout, _ = run("solve", "--mesh", str(path), "--region", "20,40,-1,1")
        assert status == 0
        assert stdout.startswith("32.000000000000 ")

    def test_dump_matrices(self, tmp_path):
        status, _, _ = run(
            "solve", "--nx", "2", "--region", "20,40,-1,1", "--dump-matrices", str(tmp_path)
        )
        assert status == 0
        assert (tmp_path / "stiffness.txt").exists()
        assert (tmp_path / "mass.txt").exists()

    def test_unresolved_cluster(self):
        warning = HolofemDict(
            kind="unresolved-cluster", center=[21.0, 0.5], level=5, indicator=0.25
        )
        with patch.object(solve, "search", return_value=SearchResult([], [warning])):
            status, stdout, stderr = run("solve", "--nx", "2", "--region", "20,40,-1,1")
        assert status == 2
        assert not stdout
        assert "unresolved cluster at (21+0.5j) (level 5, indicator 0.25)" in stderr
        assert "numerical failure: 1 boxes could not be resolved" in stderr

    def test_config_file(self, tmp_path):
        config = tmp_path / "holofem.cfg"
        config.write_text("nx = 2\nregion = 20,40,-1,1\nquad-points = 16\n")
        with patch.object(solve, "search", wraps=solve.search) as mock_search:
            status, stdout, _ = run("solve", "--config", str(config))
        assert status == 0
        assert stdout.startswith("32.000000000000 ")
        assert mock_search.call_args.args[2]["quad_points"] == 16

    def test_command_line_overrides_config(self, tmp_path):
        config = tmp_path / "holofem.cfg"
        config.write_text("nx = 2\nregion = 1,10,-1,1\n")
        status, stdout, _ = run(
            "solve", "--config", str(config), "--region", "20,40,-1,1"
        )
        assert status == 0
        assert stdout.startswith("32.000000000000 ")

    @pytest.mark.parametrize(
        "text", ["colour = red\n", "nx = two\n", "format = yaml\n", "region\n"]
    )
    def test_bad_config(self, tmp_path, text):
        config = tmp_path / "holofem.cfg"
        config.write_text(text)
        status, _, stderr = run("solve", "--config", str(config), "--region", "20,40,-1,1")
        assert status == 1
        assert str(config) in stderr

    def test_out_file(self, tmp_path):
        out = tmp_path / "values.txt"
        status, stdout, _ = run(
            "solve", "--nx", "2", "--region", "20,40,-1,1", "--out", str(out)
        )
        assert status == 0
        assert not stdout
        assert out.read_text().startswith("32.000000000000 ")


class TestOracle:
    def test_values(self, oracle_spectrum):
        status, stdout, _ = run("oracle", "--nx", "4")
        assert status == 0
        values = [float(line) for line in stdout.splitlines()]
        assert values == pytest.approx(list(oracle_spectrum(4)), rel=1e-11)

    def test_crisscross_count(self):
        status, stdout, _ = run("oracle", "--nx", "2", "--pattern", "crisscross")
        assert status == 0
        # one grid vertex and four cell centers
        assert len(stdout.splitlines()) == 5

    def test_lapack(self):
        status, stdout, _ = run("oracle", "--nx", "2", "--method", "lapack")
        assert status == 0
        assert stdout == "32.000000000000\n"


class TestStudy:
    records = [
        ConvergenceRecord(10, 0.1, 19.928, 0.18879, None),
        ConvergenceRecord(20, 0.05, 19.787, 0.04779, 1.982),
    ]

    def test_formats(self):
        with patch.object(
            study_module, "convergence_study", return_value=self.records
        ) as mock_study:
            status, stdout, _ = run("study", "--nx", "10,20", "--format", "md")
        assert status == 0
        assert stdout.splitlines()[2] == "| 1/10 | 19.9280 | 0.1888 | - |"
        args, kwargs = mock_study.call_args
        assert args[1] == (10, 20)
        assert args[2] == (1, 1)
        assert kwargs == {"progress": True, "pattern": "diagonal"}

    def test_no_progress(self):
        with patch.object(
            study_module, "convergence_study", return_value=self.records
        ) as mock_study:
            run("study", "--no-progress")
            assert mock_study.call_args.kwargs["progress"] is False
            run("study", "-v", "0")
            assert mock_study.call_args.kwargs["progress"] is False

    def test_pattern(self):
        with patch.object(
            study_module, "convergence_study", return_value=self.records
        ) as mock_study:
            status, _, _ = run("study", "--pattern", "crisscross")
        assert status == 0
        assert mock_study.call_args.kwargs["pattern"] == "crisscross"
        status, _, stderr = run("study", "--pattern", "union-jack")
        assert status == 1
        assert "invalid choice" in stderr

    def test_small_study(self):
        status, stdout, _ = run("study", "--nx", "2,4", "--no-progress")
        assert status == 0
        lines = stdout.splitlines()
        assert lines[0] == "h,lambda_h,error,order"
        assert float(lines[1].split(",")[1]) == pytest.approx(32.0)
        assert len(lines) == 3

    def test_deterministic_csv(self):
        argv = ("study", "--nx", "2,4", "--no-progress")
        assert run(*argv)[1] == run(*argv)[1]


def test_indicator_map():
    status, stdout, _ = run(
        "indicator-map", "--nx", "2", "--region", "20,44,-2,2", "--grid", "6,1"
    )
    assert status == 0
    lines = stdout.splitlines()
    assert lines[0] == "re,im,indicator"
    assert len(lines) == 7
    assert lines[1].startswith("22.0,0.0,")


class TestCheck:
    def test_passed(self):
        results = [CheckResult("consistency", True, "observed orders 2.000", [])]
        with patch.object(properties, "run_checks", return_value=results):
            status, stdout, _ = run("check")
        assert status == 0
        assert stdout.startswith("consistency        ok  observed orders 2.000")

    def test_failed(self):
        results = [
            CheckResult("projection-norm", True, "", []),
            CheckResult("operator-gap", False, "observed orders 1.200", []),
        ]
        with patch.object(properties, "run_checks", return_value=results):
            status, stdout, stderr = run("check")
        assert status == 2
        assert "operator-gap       FAILED" in stdout
        assert "property checks failed: operator-gap" in stderr
