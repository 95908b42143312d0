"""End-to-end command-line checks; every run is a real subprocess."""

import json
import subprocess
import sys

import pytest

TWO_BY_TWO = {
    "n_students": 2,
    "n_schools": 2,
    "capacities": [1, 1],
    "utilities": [[4.0, 3.0], [2.0, 1.0]],
}


def run_cli(*args, stdin=None):
    return subprocess.run(
        [sys.executable, "-m", "lexmatch", *args],
        input=stdin,
        capture_output=True,
        text=True,
        timeout=120,
    )


@pytest.fixture
def fixture_file(tmp_path):
    path = tmp_path / "two.json"
    path.write_text(json.dumps(TWO_BY_TWO))
    return str(path)


class TestSolve:
    @pytest.mark.parametrize(
        "algorithm,expected",
        [("max-max-lex", [0, 1]), ("da", [0, 1]), ("max-min-lex", [1, 0])],
    )
    def test_fixture_assignments(self, fixture_file, algorithm, expected):
        result = run_cli("solve", algorithm, fixture_file)
        assert result.returncode == 0
        doc = json.loads(result.stdout)
        assert doc["allocation"]["assignment"] == expected

    def test_file_output_is_bare_allocation(self, fixture_file, tmp_path):
        out = tmp_path / "alloc.json"
        result = run_cli("solve", "max-max-lex", fixture_file, "-o", str(out))
        assert result.returncode == 0
        doc = json.loads(out.read_text())
        assert sorted(doc) == ["algorithm", "assignment", "utilities"]
        assert doc["utilities"] == [4.0, 1.0]

    def test_trace_file_lands_next_to_output(self, fixture_file, tmp_path):
        out = tmp_path / "alloc.json"
        run_cli("solve", "max-min-lex", fixture_file, "-o", str(out), "--trace")
        trace = json.loads((tmp_path / "alloc.trace.json").read_text())
        assert trace["algorithm"] == "max-min-lex"
        kinds = [e["type"] for e in trace["events"]]
        assert kinds == ["probe", "probe", "fix", "probe", "fix"]

    def test_unknown_algorithm_exits_2(self, fixture_file):
        result = run_cli("solve", "newest-lex", fixture_file)
        assert result.returncode == 2

    def test_malformed_input_exits_2(self):
        result = run_cli("solve", "da", stdin="{broken")
        assert result.returncode == 2
        assert "error" in result.stderr

    def test_tied_instance_needs_no_strict(self, tmp_path):
        doc = dict(TWO_BY_TWO, utilities=[[4.0, 4.0], [2.0, 1.0]])
        path = tmp_path / "tied.json"
        path.write_text(json.dumps(doc))
        assert run_cli("solve", "da", str(path)).returncode == 2
        assert run_cli("solve", "da", str(path), "--no-strict").returncode == 0


class TestAudit:
    def test_stable_allocation_exits_0(self, fixture_file, tmp_path):
        alloc = tmp_path / "alloc.json"
        run_cli("solve", "max-max-lex", fixture_file, "-o", str(alloc))
        result = run_cli("audit", fixture_file, str(alloc))
        assert result.returncode == 0
        report = json.loads(result.stdout)
        assert report["stable"] is True
        assert report["blocking_pairs"] == []
        assert report["metrics"]["n_unassigned"] == 0

    def test_swapped_allocation_exits_1_with_one_pair(self, fixture_file, tmp_path):
        alloc = tmp_path / "egal.json"
        run_cli("solve", "max-min-lex", fixture_file, "-o", str(alloc))
        result = run_cli("audit", fixture_file, str(alloc))
        assert result.returncode == 1
        report = json.loads(result.stdout)
        assert len(report["blocking_pairs"]) == 1
        pair = report["blocking_pairs"][0]
        assert (pair["student"], pair["school"]) == (0, 0)

    def test_infeasible_allocation_exits_2(self, fixture_file, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"assignment": [0, 0], "algorithm": "x", "utilities": []}))
        result = run_cli("audit", fixture_file, str(bad))
        assert result.returncode == 2

    def test_audit_reads_pipe_envelope(self, fixture_file):
        solved = run_cli("solve", "max-max-lex", fixture_file).stdout
        result = run_cli("audit", stdin=solved)
        assert result.returncode == 0


class TestGenerate:
    def test_random_instance_validates(self, tmp_path):
        out = tmp_path / "inst.json"
        result = run_cli(
            "generate", "random", "--students", "6", "--schools", "2",
            "--seed", "1", "-o", str(out),
        )
        assert result.returncode == 0
        doc = json.loads(out.read_text())
        assert doc["n_students"] == 6
        assert len(doc["utilities"]) == 6

    def test_more_schools_than_students_exits_2(self):
        result = run_cli(
            "generate", "random", "--students", "2", "--schools", "3", "--seed", "1"
        )
        assert result.returncode == 2

    def test_spatial_writes_instance_and_sidecar(self, tmp_path):
        inst = tmp_path / "inst.json"
        side = tmp_path / "side.json"
        result = run_cli(
            "generate", "spatial", "--grid", "4", "--schools", "2", "--seed", "8",
            "-o", str(inst), "--sidecar", str(side),
        )
        assert result.returncode == 0
        assert json.loads(inst.read_text())["n_students"] == 16
        sidecar = json.loads(side.read_text())
        assert sidecar["mode"] == "grid"
        assert len(sidecar["school_points"]) == 2

    def test_spatial_stdout_envelope_carries_geometry(self):
        result = run_cli(
            "generate", "spatial", "--grid", "3", "--schools", "2", "--seed", "8"
        )
        doc = json.loads(result.stdout)
        assert set(doc) == {"instance", "spatial"}
        assert doc["instance"]["n_students"] == 9

    def test_explicit_capacities(self, tmp_path):
        out = tmp_path / "inst.json"
        run_cli(
            "generate", "spatial", "--grid", "2", "--schools", "2", "--seed", "1",
            "--capacities", "3,1", "-o", str(out),
        )
        assert json.loads(out.read_text())["capacities"] == [3, 1]


class TestPipeline:
    def test_generate_solve_audit_pipe(self):
        gen = run_cli("generate", "spatial", "--grid", "6", "--schools", "3", "--seed", "5")
        solved = run_cli("solve", "max-max-lex", stdin=gen.stdout)
        audited = run_cli("audit", stdin=solved.stdout)
        assert audited.returncode == 0
        assert json.loads(audited.stdout)["stable"] is True

    def test_pipe_render_without_tempfiles(self):
        gen = run_cli("generate", "spatial", "--grid", "5", "--schools", "2", "--seed", "5")
        solved = run_cli("solve", "max-max-lex", stdin=gen.stdout)
        rendered = run_cli("render", stdin=solved.stdout)
        assert rendered.returncode == 0
        assert rendered.stdout.count("<circle") == 2
        assert rendered.stdout.count("<rect") == 25

    def test_artifacts_are_reproducible(self, tmp_path):
        files = {}
        for attempt in ("a", "b"):
            d = tmp_path / attempt
            d.mkdir()
            inst, side = d / "inst.json", d / "side.json"
            alloc, svg, csv = d / "alloc.json", d / "map.svg", d / "map.csv"
            run_cli(
                "generate", "spatial", "--grid", "8", "--schools", "3", "--seed", "21",
                "-o", str(inst), "--sidecar", str(side),
            )
            run_cli("solve", "max-max-lex", str(inst), "-o", str(alloc))
            run_cli(
                "render", str(inst), str(alloc), "--sidecar", str(side),
                "-o", str(svg), "--csv", str(csv),
            )
            files[attempt] = [p.read_bytes() for p in (inst, side, alloc, svg, csv)]
        assert files["a"] == files["b"]


class TestVerify:
    def test_small_strict_instance_passes(self, fixture_file):
        result = run_cli("verify", fixture_file)
        assert result.returncode == 0
        report = json.loads(result.stdout)
        assert report["all_pass"] is True
        assert report["checks"]["egalitarian_is_lex_bottom"] is True

    def test_budget_exceeded_exits_3(self, tmp_path):
        gen = run_cli("generate", "random", "--students", "8", "--schools", "2", "--seed", "1")
        result = run_cli("verify", "--max-students", "7", stdin=gen.stdout)
        assert result.returncode == 3

    def test_tied_instance_skips_optimality(self, tmp_path):
        doc = dict(TWO_BY_TWO, utilities=[[4.0, 4.0], [2.0, 1.0]])
        path = tmp_path / "tied.json"
        path.write_text(json.dumps(doc))
        result = run_cli("verify", str(path), "--no-strict")
        assert result.returncode == 0
        report = json.loads(result.stdout)
        assert report["tie_free"] is False
        assert "egalitarian_is_lex_bottom" not in report["checks"]


class TestRender:
    def test_sidecar_file_flow_with_figure(self, tmp_path):
        inst, side = tmp_path / "i.json", tmp_path / "s.json"
        alloc, svg = tmp_path / "a.json", tmp_path / "m.svg"
        png, csv = tmp_path / "m.png", tmp_path / "m.csv"
        run_cli(
            "generate", "spatial", "--grid", "4", "--schools", "2", "--seed", "2",
            "-o", str(inst), "--sidecar", str(side),
        )
        run_cli("solve", "max-max-lex", str(inst), "-o", str(alloc))
        result = run_cli(
            "render", str(inst), str(alloc), "--sidecar", str(side),
            "-o", str(svg), "--csv", str(csv), "--figure", str(png),
        )
        assert result.returncode == 0
        assert svg.read_text().count("<rect") == 16
        assert csv.read_text().startswith("x,y,school_index\n")
        assert png.stat().st_size > 0

    def test_mismatched_sidecar_exits_2(self, tmp_path):
        inst, side = tmp_path / "i.json", tmp_path / "s.json"
        other = tmp_path / "other_side.json"
        alloc = tmp_path / "a.json"
        run_cli(
            "generate", "spatial", "--grid", "4", "--schools", "2", "--seed", "2",
            "-o", str(inst), "--sidecar", str(side),
        )
        run_cli(
            "generate", "spatial", "--grid", "4", "--schools", "2", "--seed", "3",
            "-o", str(tmp_path / "other.json"), "--sidecar", str(other),
        )
        run_cli("solve", "max-max-lex", str(inst), "-o", str(alloc))
        result = run_cli(
            "render", str(inst), str(alloc), "--sidecar", str(other), "-o", "-"
        )
        assert result.returncode == 2

    def test_points_mode_exits_2(self):
        gen = run_cli("generate", "spatial", "--points", "9", "--schools", "2", "--seed", "5")
        solved = run_cli("solve", "max-max-lex", stdin=gen.stdout)
        result = run_cli("render", stdin=solved.stdout)
        assert result.returncode == 2


class TestMetrics:
    def test_report_and_figure(self, fixture_file, tmp_path):
        alloc = tmp_path / "a.json"
        png = tmp_path / "profile.png"
        run_cli("solve", "max-min-lex", fixture_file, "-o", str(alloc))
        result = run_cli(
            "metrics", fixture_file, str(alloc), "--figure", str(png)
        )
        assert result.returncode == 0
        report = json.loads(result.stdout)
        assert report["mean"] == 2.5
        assert report["algorithm"] == "max-min-lex"
        assert png.stat().st_size > 0
