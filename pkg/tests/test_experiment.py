from __future__ import annotations

import csv
import json

import pytest

from beliefgraph.cli import main, parse_seeds
from beliefgraph.experiment import compare, run_experiment
from beliefgraph.scenario import load_bundled, save_scenario
from beliefgraph.trace import Trace, inspected_count_series


@pytest.fixture(scope="module")
def quick_runs(tmp_path_factory):
    """Two methods, two seeds, short budget; shared by several tests."""
    out = tmp_path_factory.mktemp("runs")
    scenario = load_bundled("open-seek")
    rows_full = run_experiment(scenario, "full", [1, 2], out, budget=60.0)
    rows_cov = run_experiment(scenario, "coverage-only", [1, 2], out, budget=60.0)
    return out, rows_full, rows_cov


class TestRunExperiment:
    def test_writes_traces_and_csvs(self, quick_runs):
        out, rows_full, _ = quick_runs
        assert (out / "trace_full_seed1.jsonl").exists()
        assert (out / "trace_full_seed2.jsonl").exists()
        assert (out / "summary_full.csv").exists()
        assert (out / "series_full.csv").exists()
        assert len(rows_full) == 2

    def test_summary_matches_traces(self, quick_runs):
        out, rows_full, _ = quick_runs
        for row in rows_full:
            trace = Trace.read(out / f"trace_full_seed{row['seed']}.jsonl")
            assert trace.summary_record()["inspected_count"] == row["inspected_final"]
            assert trace.hash() == row["trace_hash"]
            recomputed = inspected_count_series(trace)[-1][1]
            assert recomputed == row["inspected_final"]

    def test_series_csv_resolution(self, quick_runs):
        out, _, _ = quick_runs
        with open(out / "series_full.csv") as f:
            rows = list(csv.DictReader(f))
        times = [float(r["t"]) for r in rows]
        assert times[0] == 0.0
        assert all(b - a == pytest.approx(10.0) for a, b in zip(times, times[1:]))
        for r in rows:
            assert float(r["inspected_min"]) <= float(r["inspected_mean"]) \
                <= float(r["inspected_max"])

    def test_coverage_only_never_inspects(self, quick_runs):
        _, _, rows_cov = quick_runs
        assert all(r["inspected_final"] == 0 for r in rows_cov)

    def test_identical_invocation_identical_output(self, tmp_path):
        scenario = load_bundled("open-seek")
        a = run_experiment(scenario, "full", [3], tmp_path / "a", budget=30.0)
        b = run_experiment(scenario, "full", [3], tmp_path / "b", budget=30.0)
        assert a[0]["trace_hash"] == b[0]["trace_hash"]
        csv_a = (tmp_path / "a" / "summary_full.csv").read_text()
        csv_b = (tmp_path / "b" / "summary_full.csv").read_text()
        assert csv_a == csv_b

    def test_unknown_method_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="method"):
            run_experiment(load_bundled("open-seek"), "bogus", [1], tmp_path)

    def test_empty_seeds_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="seed"):
            run_experiment(load_bundled("open-seek"), "full", [], tmp_path)


class TestCompare:
    def test_self_comparison_zero_deltas(self, quick_runs):
        _, rows_full, _ = quick_runs
        cmp = compare(rows_full, rows_full)
        assert cmp.inspected_deltas == [0, 0]
        assert cmp.reward_deltas == [0.0, 0.0]
        assert cmp.verdict == "inconclusive"

    def test_detects_consistent_winner(self, quick_runs):
        _, rows_full, rows_cov = quick_runs
        cmp = compare(rows_full, rows_cov)
        assert cmp.verdict == "a"
        assert all(d > 0 for d in cmp.inspected_deltas)

    def test_mismatched_seeds_error(self, quick_runs):
        _, rows_full, rows_cov = quick_runs
        shifted = [dict(r, seed=r["seed"] + 10) for r in rows_cov]
        with pytest.raises(ValueError, match="seed"):
            compare(rows_full, shifted)

    def test_single_seed_error(self, quick_runs):
        _, rows_full, _ = quick_runs
        with pytest.raises(ValueError, match="two"):
            compare(rows_full[:1], rows_full[:1])


class TestCli:
    def test_parse_seeds(self):
        assert parse_seeds("1..5") == [1, 2, 3, 4, 5]
        assert parse_seeds("2,4,8") == [2, 4, 8]

    def scenario_path(self, tmp_path) -> str:
        path = tmp_path / "scenario.json"
        save_scenario(load_bundled("open-seek"), path)
        return str(path)

    def test_run_and_replay_roundtrip(self, tmp_path, capsys):
        spath = self.scenario_path(tmp_path)
        out = tmp_path / "out"
        code = main(["run", "--scenario", spath, "--method", "full",
                     "--seeds", "1", "--budget", "30", "--out", str(out)])
        assert code == 0
        assert (out / "summary_full.csv").exists()
        code = main(["replay", "--trace", str(out / "trace_full_seed1.jsonl")])
        assert code == 0
        assert "replay ok" in capsys.readouterr().out

    def test_compare_cli(self, tmp_path, capsys):
        spath = self.scenario_path(tmp_path)
        out = tmp_path / "out"
        main(["run", "--scenario", spath, "--method", "full",
              "--seeds", "1,2", "--budget", "30", "--out", str(out)])
        main(["run", "--scenario", spath, "--method", "coverage-only",
              "--seeds", "1,2", "--budget", "30", "--out", str(out)])
        code = main(["compare", "--in",
                     str(out / "summary_full.csv"),
                     str(out / "summary_coverage-only.csv")])
        assert code == 0
        assert "full vs coverage-only" in capsys.readouterr().out
        # a directory resolves to every summary inside it
        code = main(["compare", "--in", str(out)])
        assert code == 0
        assert "vs" in capsys.readouterr().out

    def test_missing_scenario_is_usage_error(self, tmp_path):
        code = main(["run", "--scenario", str(tmp_path / "nope.json"),
                     "--method", "full", "--seeds", "1", "--out", str(tmp_path)])
        assert code == 2

    def test_invalid_scenario_is_usage_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        code = main(["run", "--scenario", str(bad), "--method", "full",
                     "--seeds", "1", "--out", str(tmp_path)])
        assert code == 2

    def test_gen_scenario_cli(self, tmp_path):
        d = load_bundled("open-empty").to_dict()
        d["generator"] = {"counts": {"fire_extinguisher": 2}, "min_separation": 1.0}
        template = tmp_path / "template.json"
        template.write_text(json.dumps(d))
        out = tmp_path / "generated.json"
        code = main(["gen-scenario", "--template", str(template),
                     "--seed", "5", "--out", str(out)])
        assert code == 0
        from beliefgraph.scenario import load_scenario
        assert len(load_scenario(out).objects) == 2
