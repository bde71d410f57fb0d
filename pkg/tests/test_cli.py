"""CLI contract: exit codes, determinism, config handling, plot output."""

import json

import pytest

from exthyp import __version__
from exthyp.cli import build_parser, main


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_passing_run_exits_zero_with_json(capsys):
    code, out, err = _run(capsys, ["cone"])
    assert code == 0
    payload = json.loads(out)
    assert payload["experiment"] == "cone"
    assert payload["version"] == __version__
    assert payload["passed"] is True
    assert "elapsed:" in err


def test_stdout_is_byte_deterministic(capsys):
    _, first, _ = _run(capsys, ["contour-eval"])
    _, second, _ = _run(capsys, ["contour-eval"])
    assert first == second


def test_failing_check_exits_one(capsys):
    code, out, _ = _run(
        capsys, ["cone", "--window-lo", "1.5", "--window-hi", "2.0"]
    )
    assert code == 1
    assert json.loads(out)["passed"] is False


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["cone", "--bogus", "1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_bad_parameter_exits_two(capsys):
    code, out, err = _run(capsys, ["cone", "--delta", "-1"])
    assert code == 2
    assert out == ""
    assert "parameter 'delta'" in err


def test_plot_data_requires_plot_path(capsys):
    code, _, err = _run(capsys, ["cone", "--plot-data", "profile"])
    assert code == 2
    assert "--plot-path" in err


def test_unknown_series_exits_two(capsys, tmp_path):
    target = tmp_path / "series.tsv"
    code, _, err = _run(
        capsys,
        ["cone", "--plot-data", "nope", "--plot-path", str(target)],
    )
    assert code == 2
    assert "available" in err


def test_numerical_error_exits_three_with_report(capsys):
    code, out, err = _run(
        capsys, ["density-eval", "--point", "1", "0"]
    )
    assert code == 3
    payload = json.loads(out)
    assert payload["passed"] is False
    assert payload["rows"][0]["name"] == "error"
    assert "error:" in err


def test_csv_format(capsys):
    code, out, _ = _run(capsys, ["cone", "--format", "csv"])
    assert code == 0
    header = out.splitlines()[0]
    assert header == ("name,value_re,value_im,reference_re,reference_im,"
                      "deviation,tolerance,passed,detail")


def test_output_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = _run(capsys, ["cone", "--output", str(target)])
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["experiment"] == "cone"


def test_plot_data_file(capsys, tmp_path):
    target = tmp_path / "profile.tsv"
    code, _, _ = _run(
        capsys, ["cone", "--plot-data", "profile", "--plot-path", str(target)]
    )
    assert code == 0
    lines = target.read_text().splitlines()
    assert lines[0] == "tau\tvalue"
    assert len(lines) > 10
    assert all(len(line.split("\t")) == 2 for line in lines[1:])


def test_config_file_supplies_parameters_and_output(capsys, tmp_path):
    target = tmp_path / "report.csv"
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "experiment": "cone",
        "parameters": {"k": 2.0},
        "output": {"path": str(target), "format": "csv"},
    }))
    code, out, _ = _run(capsys, ["cone", "--config", str(cfg)])
    assert code == 0
    assert out == ""
    assert target.read_text().startswith("name,")

    # flags outrank the file: format json back to stdout, k overridden
    code, out, _ = _run(
        capsys,
        ["cone", "--config", str(cfg), "--format", "json", "--output",
         str(tmp_path / "o.json"), "--k", "3.0"],
    )
    assert code == 0
    payload = json.loads((tmp_path / "o.json").read_text())
    assert payload["parameters"]["k"] == 3.0


def test_config_validation(capsys, tmp_path):
    cfg = tmp_path / "bad.json"

    cfg.write_text(json.dumps({"experiment": "reg2d"}))
    code, _, err = _run(capsys, ["cone", "--config", str(cfg)])
    assert code == 2 and "reg2d" in err

    cfg.write_text(json.dumps({"junk": 1}))
    code, _, err = _run(capsys, ["cone", "--config", str(cfg)])
    assert code == 2 and "unknown config keys" in err

    cfg.write_text(json.dumps({"output": {"format": "xml"}}))
    code, _, err = _run(capsys, ["cone", "--config", str(cfg)])
    assert code == 2 and "format" in err

    cfg.write_text("{not json")
    code, _, err = _run(capsys, ["cone", "--config", str(cfg)])
    assert code == 2 and "not valid JSON" in err

    code, _, err = _run(capsys, ["cone", "--config", str(tmp_path / "gone")])
    assert code == 2 and "cannot read" in err


def test_report_parameters_round_trip_as_config(capsys, tmp_path):
    _, out, _ = _run(capsys, ["density-eval", "--point", "0.25", "0.1"])
    payload = json.loads(out)
    cfg = tmp_path / "echo.json"
    cfg.write_text(json.dumps({
        "experiment": "density-eval",
        "parameters": payload["parameters"],
    }))
    _, again, _ = _run(capsys, ["density-eval", "--config", str(cfg)])
    assert again == out


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == __version__


def test_every_experiment_has_a_subcommand():
    parser = build_parser()
    text = parser.format_help()
    for tag in ("equivalence", "variants", "reg2d", "reg3d", "logexample",
                "cone", "invariance", "additivity", "density-eval",
                "contour-eval"):
        assert tag in text
