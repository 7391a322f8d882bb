import json

import pytest
from click.testing import CliRunner

from dmera import __version__
from dmera.commands.figures import FIGURE_DEFAULTS
from dmera.core import BenchContext, cli
from dmera.io import read_csv


@pytest.fixture
def runner(isolated_settings):
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, [str(a) for a in args])


def test_version(runner):
    result = invoke(runner, "--version")
    assert result.exit_code == 0
    assert __version__ in result.output


def test_reference(runner, tmp_path):
    out = tmp_path / "ref.csv"
    result = invoke(runner, "reference", "--sites", 8, "--max-distance", 3, "--out", out)
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert list(rows[0]) == ["L", "distance", "family", "value"]
    assert len(rows) == 8


def test_reference_compare(runner, tmp_path):
    out = tmp_path / "ref.csv"
    args = ("reference", "--sites", 8, "--max-distance", 3)
    assert invoke(runner, *args, "--out", out).exit_code == 0
    result = invoke(runner, *args, "--compare", out, "--out", tmp_path / "again.csv")
    assert result.exit_code == 0, result.output
    assert "Matches" in result.output

    lines = out.read_text().splitlines()
    fields = lines[1].split(",")
    fields[-1] = str(float(fields[-1]) + 1e-6)
    lines[1] = ",".join(fields)
    out.write_text("\n".join(lines) + "\n")
    result = invoke(runner, *args, "--compare", out, "--out", tmp_path / "again.csv")
    assert result.exit_code == 1
    assert "[1009]" in result.output


def test_evaluate_identity_angles(runner, tmp_path):
    out = tmp_path / "eval.csv"
    result = invoke(runner, "evaluate", "--depth", 2, "--theta", "0,0,0,0", "--out", out)
    assert result.exit_code == 0, result.output
    row = read_csv(out)[0]
    assert float(row["energy_density"]) == pytest.approx(-1.0)
    assert row["L"] == ""


def test_evaluate_parameter_file(runner, tmp_path):
    theta = tmp_path / "theta.json"
    theta.write_text(json.dumps({"model": "ising", "D": 1, "theta": [0.43188, -1.13891]}))
    out = tmp_path / "eval.csv"
    result = invoke(runner, "evaluate", "--depth", 1, "--theta", theta, "--layers", 3, "--out", out)
    assert result.exit_code == 0, result.output
    row = read_csv(out)[0]
    assert row["L"] == "8"
    assert float(row["energy_rel_error"]) < 0.05


def test_evaluate_grid_over_depths_and_sizes(runner, tmp_path):
    out = tmp_path / "eval.csv"
    result = invoke(runner, "evaluate", "--depths", "1,2,3", "--layers", "3,4", "--out", out)
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert list(rows[0])[:6] == ["model", "D", "L", "energy_density", "energy_rel_error", "normalized_infidelity"]
    assert [(r["D"], r["L"]) for r in rows] == [
        ("1", "8"), ("1", "16"), ("2", "8"), ("2", "16"), ("3", "8"), ("3", "16"),
    ]
    errors = [float(r["energy_rel_error"]) for r in rows if r["L"] == "8"]
    assert all(b < a for a, b in zip(errors, errors[1:]))


def test_evaluate_theta_needs_single_depth(runner):
    result = invoke(runner, "evaluate", "--depth", 1, "--depths", "1,2", "--theta", "0,0")
    assert result.exit_code == 1


def test_config_file_supplies_defaults(runner, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"sites": 6, "max_distance": 2}))
    out = tmp_path / "ref.csv"
    result = invoke(runner, "--config", config, "reference", "--out", out)
    assert result.exit_code == 0, result.output
    assert read_csv(out)[0]["L"] == "6"


def test_odd_sites_is_usage_error(runner):
    result = invoke(runner, "reference", "--sites", 7)
    assert result.exit_code == 2


def test_theta_length_is_usage_error(runner):
    result = invoke(runner, "evaluate", "--depth", 2, "--theta", "0,0")
    assert result.exit_code == 2


def test_domain_error_exit_code(runner):
    result = invoke(runner, "correlate", "--depth", 1, "--layers", 3, "--max-distance", 5)
    assert result.exit_code == 1
    assert "[1001]" in result.output


def test_correlate_and_entropy(runner, tmp_path):
    out = tmp_path / "corr.csv"
    result = invoke(runner, "correlate", "--depth", 1, "--layers", 4, "--max-distance", 4,
                    "--out", out, "--svg")
    assert result.exit_code == 0, result.output
    assert len(read_csv(out)) == 5
    assert out.with_suffix(".svg").exists()

    out = tmp_path / "entropy.csv"
    result = invoke(runner, "entropy", "--depth", 1, "--layers", 4, "--sizes", "1,2,4", "--out", out)
    assert result.exit_code == 0, result.output
    assert [r["N"] for r in read_csv(out)] == ["1", "2", "4"]


def test_subfid(runner, tmp_path):
    out = tmp_path / "subfid.csv"
    result = invoke(runner, "subfid", "--model", "modified_ising", "--depth", 1, "--layers", 3,
                    "--sizes", "1,2", "--out", out)
    assert result.exit_code == 0, result.output
    assert len(read_csv(out)) == 2


def test_qaoa(runner, tmp_path):
    out = tmp_path / "qaoa.csv"
    result = invoke(runner, "qaoa", "--rounds", 1, "--sites", 4, "--restarts", 8, "--out", out)
    assert result.exit_code == 0, result.output
    row = read_csv(out)[0]
    assert row["p"] == "1"
    assert row["L"] == "4"


def test_reproduce_energy_figure(runner, tmp_path):
    out = tmp_path / "fig.csv"
    result = invoke(runner, "reproduce-figure", "2a", "--depth", 1, "--out", out)
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert [r["model"] for r in rows] == ["ising", "modified_ising"]


def test_optimize_writes_parameters(runner, tmp_path):
    out = tmp_path / "opt" / "optimize.csv"
    result = invoke(runner, "optimize", "--depth", 1, "--restarts", 0, "--out", out)
    assert result.exit_code == 0, result.output
    assert (tmp_path / "opt" / "theta_ising_D1.json").exists()
    assert out.with_suffix(".jsonl").exists()
    assert float(read_csv(out)[0]["energy_density"]) < -1.0


def test_qaoa_rounds_and_site_grid(runner, tmp_path):
    out = tmp_path / "qaoa.csv"
    result = invoke(runner, "qaoa", "--rounds", 2, "--min-rounds", 1, "--site-grid", "4,8",
                    "--restarts", 8, "--out", out)
    assert result.exit_code == 0, result.output
    assert [(r["p"], r["L"]) for r in read_csv(out)] == [("1", "4"), ("1", "8"), ("2", "4"), ("2", "8")]


def test_qaoa_rejects_odd_site_grid(runner):
    result = invoke(runner, "qaoa", "--rounds", 1, "--site-grid", "4,7")
    assert result.exit_code != 0


def test_reproduce_qaoa_figures(runner, tmp_path):
    out = tmp_path / "fig6a.csv"
    result = invoke(runner, "reproduce-figure", "6a", "--rounds", 3, "--sites", 8, "--restarts", 8, "--out", out)
    assert result.exit_code == 0, result.output
    assert [r["p"] for r in read_csv(out)] == ["2", "3"]

    out = tmp_path / "fig6b.csv"
    result = invoke(runner, "reproduce-figure", "6b", "--rounds", 2, "--site-grid", "4,8", "--restarts", 8,
                    "--out", out)
    assert result.exit_code == 0, result.output
    assert [(r["p"], r["L"]) for r in read_csv(out)] == [("2", "4"), ("2", "8")]


def test_figure_defaults_follow_published_grids(isolated_settings):
    bench = BenchContext(isolated_settings)
    assert bench.config(FIGURE_DEFAULTS["5"]).layers == 9
    assert bench.config(FIGURE_DEFAULTS["4b"]).max_distance == 128
    config = bench.config(FIGURE_DEFAULTS["6b"])
    assert (config.min_rounds, config.rounds) == (2, 8)
    assert config.site_grid == [32, 64, 128, 256]
    assert bench.config(FIGURE_DEFAULTS["6a"], sites=64).sites == 64
