"""Tests for the experiment harness and the command line."""

import json

import pytest

from app.cli import EXIT_ERROR, EXIT_OK, EXIT_ORACLE, main
from app.core.errors import ConfigError, InfeasibleParams
from app.schemas.experiment import BatchSource, ExperimentConfig, GraphSource, Scenario
from app.services.experiment_service import CSV_COLUMNS, MetricRow, alpha_exponent, fit_summary, metrics_csv, run_experiment
from app.services.scenarios import MstScenario

SCENARIOS = [
    ("mst", "random-gnm", 12, None, "weights", 3),
    ("cliques", "random-gnm", 10, 25, "bits", 4),
    ("local1", "grid", 9, None, "bits", 3),
    ("universal-apsp", "cycle", 8, None, "bits", 2),
    ("universal-diameter", "path", 6, None, "bits", 1),
    ("universal-cycles", "random-gnm", 9, 18, "bits", 3),
    ("universal-cliques", "random-gnm", 10, 25, "bits", 3),
    ("local-cycles", "grid", 9, None, "bits", 2),
    ("cc-universal", "clique", 6, None, "bits", 3),
    ("cc-matmul", "clique", 5, None, "matrix", 4),
    ("cc-triangles", "clique", 6, None, "bits", 4),
]


def make_config(scenario, kind, n, m=None, batch_kind=None, alpha=1, count=2, **extra):
    return ExperimentConfig(
        scenario=Scenario(scenario),
        graph=GraphSource(kind=kind, n=n, seed=1, m=m),
        batches=BatchSource(kind=batch_kind, alpha=alpha, count=count, seed=1),
        **extra,
    )


class TestRunExperiment:
    """Test running every scenario with its oracle."""

    @pytest.mark.parametrize("scenario,kind,n,m,batch_kind,alpha", SCENARIOS)
    def test_scenario_passes_oracle(self, scenario, kind, n, m, batch_kind, alpha):
        """Test each scenario agrees with its reference on every batch."""
        result = run_experiment(make_config(scenario, kind, n, m, batch_kind, alpha, count=3))
        assert result.oracle_checked
        assert result.ok, result.report.mismatches()
        assert [row.alpha for row in result.rows] == [alpha] * 3
        assert all(row.rounds > 0 for row in result.rows)

    @pytest.mark.parametrize("scenario,k", [("universal-cycles", 4), ("universal-cycles", 5), ("local-cycles", 4), ("local-cycles", 6), ("universal-cliques", 4)])
    def test_k_parametrized_scenarios(self, scenario, k):
        """Test the cycle and clique scenarios for k beyond triangles."""
        result = run_experiment(make_config(scenario, "random-gnm", 10, 24, "bits", alpha=3, count=3, k=k))
        assert result.ok, result.report.mismatches()

    def test_oracle_off(self):
        """Test oracle columns stay empty when checks are off."""
        result = run_experiment(make_config("mst", "cycle", 6, batch_kind="weights", oracle=False))
        assert not result.oracle_checked
        assert all(row.oracle_ok is None for row in result.rows)

    def test_output_files(self, tmp_path):
        """Test the CSV, JSON and transcript files."""
        metrics, payload, transcript = tmp_path / "m.csv", tmp_path / "r.json", tmp_path / "t.txt"
        result = run_experiment(
            make_config(
                "universal-apsp", "path", 5, batch_kind="bits", alpha=2,
                metrics_path=str(metrics), json_path=str(payload), transcript_path=str(transcript), summary=True,
            )
        )
        lines = metrics.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[1].startswith("0,2,")
        assert lines[1].endswith(",true")
        assert lines[-1].startswith("# summary c_alpha=")

        data = json.loads(payload.read_text())
        assert data["scenario"] == "universal-apsp"
        assert data["diameter"] == 4
        assert data["oracle_ok"] is True
        assert len(data["rows"]) == 2
        assert data["summary"]["batches"] == 2

        text = transcript.read_text().splitlines()
        assert text[0] == "# batch 0"
        assert "# batch 1" in text
        assert len(text[1].split()) == 5
        assert len(result.transcript) == len(text)

    def test_graph_files_with_sparse_ids(self, tmp_path):
        """Test a square given with external ids 10..40."""
        (tmp_path / "g.txt").write_text("4 4\n10 20\n20 30\n30 40\n40 10\n")
        (tmp_path / "w.txt").write_text("10 20 1\n20 30 2\n30 40 3\n40 10 4\n")
        (tmp_path / "b.txt").write_text("20 30 10\n---\n20 30 2\n")
        config = ExperimentConfig(
            scenario=Scenario.MST,
            graph=GraphSource(path=str(tmp_path / "g.txt"), labelling_path=str(tmp_path / "w.txt")),
            batches=BatchSource(path=str(tmp_path / "b.txt")),
        )
        result = run_experiment(config)
        assert result.ok
        assert [row.oracle_ok for row in result.rows] == [True, True]

    def test_triangle_matrix_batches(self, tmp_path):
        """Test triangle counting fed with symmetric adjacency-matrix batches."""
        (tmp_path / "g.txt").write_text("4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
        (tmp_path / "a.txt").write_text("0 1 0\n0 2 0\n0 3 0\n1 2 0\n1 3 0\n2 3 0\n")
        (tmp_path / "b.txt").write_text("S 0 1 1\nS 1 0 1\n---\nS 0 2 1\nS 2 0 1\nS 1 2 1\nS 2 1 1\n")
        config = ExperimentConfig(
            scenario=Scenario.CC_TRIANGLES,
            graph=GraphSource(path=str(tmp_path / "g.txt"), labelling_path=str(tmp_path / "a.txt")),
            batches=BatchSource(path=str(tmp_path / "b.txt")),
        )
        result = run_experiment(config)
        assert result.ok
        assert [row.alpha for row in result.rows] == [1, 2]
        assert [row.expected for row in result.report.rows] == [0, 1]

    def test_wrong_batch_kind(self):
        """Test a scenario given batches of another kind."""
        with pytest.raises(ConfigError):
            run_experiment(make_config("mst", "cycle", 6, batch_kind="bits"))

    def test_clique_scenario_on_sparse_graph(self):
        """Test congested-clique scenarios refuse non-clique graphs."""
        with pytest.raises(ConfigError):
            run_experiment(make_config("cc-matmul", "path", 5, batch_kind="matrix"))

    def test_alpha_larger_than_m(self):
        """Test a batch size the graph cannot supply."""
        with pytest.raises(InfeasibleParams):
            run_experiment(make_config("cliques", "path", 4, batch_kind="bits", alpha=10))


class TestSummary:
    """Test the least-squares fit."""

    def test_exact_fit(self):
        """Test rounds = 2 alpha + 3 D is recovered."""
        rows = [MetricRow(i, a, 2 * a + 15, 0, 0, 0, None) for i, a in enumerate([1, 2, 3, 4])]
        summary = fit_summary(rows, diameter=5)
        assert summary.batches == 4
        assert summary.c_alpha == pytest.approx(2.0)
        assert summary.c_diameter == pytest.approx(3.0)
        assert summary.residual == pytest.approx(0.0, abs=1e-6)

    def test_empty(self):
        """Test an empty trace."""
        assert fit_summary([], diameter=3).batches == 0

    def test_alpha_exponent(self):
        """Test the log-log slope."""
        assert alpha_exponent([2, 4, 8], [4, 16, 64]) == pytest.approx(2.0)
        assert alpha_exponent([3, 3], [5, 6]) is None

    def test_csv_summary_line(self):
        """Test the summary line is appended to the CSV."""
        result = run_experiment(make_config("universal-apsp", "cycle", 6, batch_kind="bits", alpha=1, summary=True))
        assert metrics_csv(result).splitlines()[-1].startswith("# summary")


class TestCli:
    """Test the simulate command."""

    def test_success(self, tmp_path):
        """Test a passing run writes metrics and exits 0."""
        out = tmp_path / "m.csv"
        code = main([
            "simulate", "--scenario", "mst", "--gen", "random-gnm,10,1",
            "--gen-batches", "weights,2,2,1", "--metrics", str(out),
        ])
        assert code == EXIT_OK
        assert len(out.read_text().splitlines()) == 3

    def test_summary_printed(self, capsys):
        """Test --summary prints the fit."""
        code = main(["simulate", "--scenario", "cc-triangles", "--gen", "clique,6,0", "--gen-batches", "bits,3,2,0", "--summary"])
        assert code == EXIT_OK
        assert capsys.readouterr().out.startswith("c_alpha=")

    def test_strict_bandwidth(self):
        """Test the strict bandwidth flags."""
        code = main([
            "simulate", "--scenario", "universal-apsp", "--gen", "cycle,6,0",
            "--gen-batches", "bits,2,1,0", "--bandwidth", "strict", "--words", "4",
        ])
        assert code == EXIT_OK

    def test_oracle_failure(self, monkeypatch):
        """Test a wrong distributed result exits 1."""
        monkeypatch.setattr(MstScenario, "observed", lambda self, graph, aux: ())
        code = main(["simulate", "--scenario", "mst", "--gen", "cycle,6,0", "--gen-batches", "weights,1,1,0"])
        assert code == EXIT_ORACLE

    def test_oracle_off_ignores_results(self, monkeypatch):
        """Test --oracle off skips the comparison."""
        monkeypatch.setattr(MstScenario, "observed", lambda self, graph, aux: ())
        code = main(["simulate", "--scenario", "mst", "--gen", "cycle,6,0", "--gen-batches", "weights,1,1,0", "--oracle", "off"])
        assert code == EXIT_OK

    @pytest.mark.parametrize("argv", [
        ["--scenario", "cc-matmul", "--gen", "path,5,0", "--gen-batches", "matrix,1,1,0"],
        ["--scenario", "mst", "--gen", "cycle,6,0", "--gen-batches", "bits,1,1,0"],
        ["--scenario", "mst", "--graph", "does-not-exist.txt", "--gen-batches", "weights,1,1,0"],
        ["--scenario", "cliques", "--gen", "cycle,6,0", "--gen-batches", "bits,1,1,0", "--k", "2"],
    ])
    def test_errors_exit_2(self, argv):
        """Test input errors exit 2."""
        assert main(["simulate", *argv]) == EXIT_ERROR

    def test_bad_generator_argument(self):
        """Test a malformed --gen value is an argparse error."""
        with pytest.raises(SystemExit):
            main(["simulate", "--scenario", "mst", "--gen", "cycle,6", "--gen-batches", "weights,1,1,0"])
