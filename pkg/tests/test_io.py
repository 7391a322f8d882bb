import numpy as np
import pytest

from dmera.exceptions import ERROR_CODES, ConvergenceError, InvalidArgumentError, UnknownParametersError
from dmera.io import RunLog, format_value, read_csv, write_csv
from dmera.plotting import render_line_chart, save_line_chart
from dmera.settings import Settings


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(np.int64(3)) == "3"
    assert format_value("ising") == "ising"


def test_write_csv_header_without_rows(tmp_path):
    path = write_csv(tmp_path / "out" / "empty.csv", [], ["L", "distance", "family", "value"])
    assert path.read_text().strip() == "L,distance,family,value"
    with pytest.raises(ValueError):
        write_csv(tmp_path / "bad.csv", [])


def test_csv_rows_round_trip(tmp_path):
    rows = [{"d": 1, "value": -2.0 / np.pi}, {"d": 2, "value": 0.25}]
    path = write_csv(tmp_path / "rows.csv", rows)
    loaded = read_csv(path)
    assert [r["d"] for r in loaded] == ["1", "2"]
    assert float(loaded[0]["value"]) == -2.0 / np.pi


def test_run_log(tmp_path):
    log = RunLog(tmp_path / "run.jsonl")
    assert log.read() == []
    log.write(D=np.int64(2), params=np.array([0.1, 0.2]), value=np.float64(-1.2), converged=np.bool_(True))
    log.write(D=3, params=[0.0], value=-1.25, converged=False)
    records = log.read()
    assert len(records) == 2
    assert records[0] == {"D": 2, "params": [0.1, 0.2], "value": -1.2, "converged": True}


def test_line_chart(tmp_path):
    svg = render_line_chart({"D=1": [(1, 1e-2), (2, 1e-3)], "D=2": [(1, 1e-4), (2, 1e-5)]},
                            title="errors", xlabel="d", ylabel="error", log_x=True)
    assert svg.startswith("<svg")
    assert svg.count("<polyline") == 2
    path = save_line_chart(tmp_path / "chart.svg", {"a": [(0, 1.0), (1, 2.0)]}, log_y=False)
    assert path.read_text().count("<polyline") == 1
    with pytest.raises(ValueError):
        render_line_chart({})


def test_settings(monkeypatch):
    monkeypatch.setenv("DMERA_LOG_LEVEL", "debug")
    monkeypatch.setenv("DMERA_MAX_WORKERS", "3")
    monkeypatch.setenv("DMERA_SEED", "")
    settings = Settings.from_env()
    assert settings.log_level == "DEBUG"
    assert settings.max_workers == 3
    assert settings.seed == 0
    assert Settings().max_workers >= 1
    with pytest.raises(ValueError):
        Settings(log_level="loud")


def test_error_codes():
    error = ConvergenceError("stuck", residual=1e-3)
    assert error.code == ERROR_CODES["NOT_CONVERGED"]
    assert str(error) == "[1005] stuck"
    assert error.residual == 1e-3
    assert isinstance(InvalidArgumentError("x"), ValueError)
    assert str(UnknownParametersError("none")) == "[1007] none"
