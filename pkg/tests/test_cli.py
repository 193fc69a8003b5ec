"""Command-line interface: exit codes, outputs, artifacts."""

import json
import math
import pathlib

import pytest

from cyclebound.cli import main

SYSTEMS = pathlib.Path(__file__).resolve().parent.parent / "systems"

EXIT_OK = 0
EXIT_VIOLATED = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64
EXIT_BADARG = 65


@pytest.fixture()
def pair_file(tmp_path):
    path = tmp_path / "pair.vf"
    path.write_text("P = x^2 - 1\nQ = y\nbox = [-5, 5] x [-5, 5]\n")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_holds(self, capsys, pair_file):
        code, out, _ = run(capsys, "analyze", pair_file)
        assert code == EXIT_OK
        assert "verdict: inequality_holds" in out

    def test_violated(self, capsys):
        code, out, _ = run(capsys, "analyze",
                           str(SYSTEMS / "two-cycle.vf"))
        assert code == EXIT_VIOLATED
        assert "verdict: inequality_violated" in out
        assert "detected cycles = 2" in out

    def test_inconclusive_on_zero_curve(self, capsys, tmp_path):
        """A whole line of equilibria defeats the point solver."""
        path = tmp_path / "line.vf"
        path.write_text("P = x\nQ = 0\nbox = [-5, 5] x [-5, 5]\n")
        code, out, _ = run(capsys, "analyze", str(path))
        assert code == EXIT_INCONCLUSIVE
        assert "verdict: inconclusive" in out
        assert "critical point search failed" in out

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "bad.vf"
        path.write_text("P = x +\nQ = y\nbox = [-5, 5] x [-5, 5]\n")
        code, _, err = run(capsys, "critpoints", str(path))
        assert code == EXIT_USAGE
        assert "line 1" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "critpoints", "/nonexistent/x.vf")
        assert code == EXIT_USAGE

    def test_unknown_point_id(self, capsys):
        code, _, err = run(capsys, "fiber",
                           str(SYSTEMS / "linear-center.vf"),
                           "--point-id", "7", "--eta", "0.1")
        assert code == EXIT_BADARG
        assert "available: [0]" in err

    def test_eta_out_of_range_names_the_limit(self, capsys):
        code, _, err = run(capsys, "fiber",
                           str(SYSTEMS / "linear-center.vf"),
                           "--point-id", "0", "--eta", "99.0")
        assert code == EXIT_BADARG
        assert "eta_max" in err

    def test_grid_floor(self, capsys):
        code, _, err = run(capsys, "fiber",
                           str(SYSTEMS / "linear-center.vf"),
                           "--point-id", "0", "--eta", "0.1",
                           "--grid", "32")
        assert code == EXIT_BADARG
        assert "64" in err

    def test_empty_perturbation_list(self, capsys):
        code, _, err = run(capsys, "morsify",
                           str(SYSTEMS / "degenerate-demo.vf"), "--s", "")
        assert code == EXIT_USAGE

    def test_no_command(self, capsys):
        code, _, err = run(capsys)
        assert code == EXIT_USAGE


class TestShowConfig:
    def test_prints_defaults(self, capsys):
        code, out, _ = run(capsys, "--show-config")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert set(doc) == {"solve", "fiber", "detect", "threads"}
        assert doc["fiber"]["grid"] == 256
        assert doc["detect"]["cycle_vertices"] == 512


class TestCritpoints:
    def test_table(self, capsys):
        code, out, _ = run(capsys, "critpoints",
                           str(SYSTEMS / "linear-center.vf"))
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0].split() == ["id", "x", "y", "index", "det",
                                    "nondeg", "bdry"]
        assert len(lines) == 2
        assert lines[1].split()[0] == "0"

    def test_empty_table_is_not_an_error(self, capsys, tmp_path):
        path = tmp_path / "nozero.vf"
        path.write_text("P = x + 5\nQ = y + 9\nbox = [-1, 1] x [-1, 1]\n")
        code, out, _ = run(capsys, "critpoints", str(path))
        assert code == EXIT_OK
        assert len(out.strip().splitlines()) == 1


class TestArtifacts:
    def test_fiber_json(self, capsys, tmp_path):
        out_json = tmp_path / "fiber.json"
        code, _, _ = run(capsys, "fiber", str(SYSTEMS / "linear-center.vf"),
                         "--point-id", "0", "--eta", "0.5",
                         "--json", str(out_json))
        assert code == EXIT_OK
        doc = json.loads(out_json.read_text())
        assert doc["closed"] == 1
        assert doc["arcs"] == 0
        assert doc["eta"] == 0.5
        assert doc["grid_resolution"] >= 256
        assert len(doc["components"]) == 1

    def test_cycles_json_and_csv(self, capsys, tmp_path):
        out_json = tmp_path / "cycles.json"
        out_csv = tmp_path / "cycles.csv"
        code, out, _ = run(capsys, "cycles",
                           str(SYSTEMS / "cubic-one-cycle.vf"),
                           "--json", str(out_json), "--csv", str(out_csv))
        assert code == EXIT_OK
        assert "1 limit cycle(s)" in out
        doc = json.loads(out_json.read_text())
        assert len(doc) == 1
        assert doc[0]["period"] == pytest.approx(2.0 * math.pi, abs=1e-6)
        assert doc[0]["stability"] == "attracting"
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "cycle,vertex,x,y"
        assert len(lines) > 500

    def test_analyze_report_and_figure(self, capsys, tmp_path, pair_file):
        out_json = tmp_path / "report.json"
        out_svg = tmp_path / "portrait.svg"
        code, _, _ = run(capsys, "analyze", pair_file,
                         "--json", str(out_json), "--svg", str(out_svg))
        assert code == EXIT_OK
        doc = json.loads(out_json.read_text())
        assert doc["bound"] == 2
        assert doc["verdict"] == "inequality_holds"
        svg = out_svg.read_text()
        assert svg.lstrip().startswith("<svg")
        assert len(svg) > 1000

    def test_reports_identical_modulo_timestamp(self, capsys, tmp_path,
                                                pair_file):
        """Same input and config give byte-identical reports."""
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            code, _, _ = run(capsys, "analyze", pair_file,
                             "--json", str(p))
            assert code == EXIT_OK
        docs = [json.loads(p.read_text()) for p in paths]
        stamps = [d.pop("timestamp") for d in docs]
        assert all(stamps)
        raw = [json.dumps(d, sort_keys=True) for d in docs]
        assert raw[0] == raw[1]


class TestMorsifyCommand:
    def test_repeat_runs_identical(self, capsys):
        argv = ["morsify", str(SYSTEMS / "degenerate-demo.vf"),
                "--s", "1e-2", "--seeds", "3"]
        code1, out1, _ = run(capsys, *argv)
        code2, out2, _ = run(capsys, *argv)
        assert code1 == code2 == EXIT_OK
        assert out1 == out2
        lines = out1.strip().splitlines()
        assert lines[0].split() == ["s", "seed", "k", "B", "cycles",
                                    "changed"]
        assert lines[1].split() == ["0", "-", "1", "1", "0", "False"]
        assert lines[2].split() == ["0.01", "3", "2", "2", "0", "True"]
