import json

import numpy as np
import pytest

from splitstab.cli import EXIT_CONFIG, EXIT_CRASH, EXIT_OK, main
from splitstab.experiments import PRESETS, ScenarioConfigError, catalog, plot_lines, preset, run_scenario
from splitstab.experiments.artifacts import write_csv
from splitstab.experiments.config import ScenarioConfig, load_config
from splitstab.experiments.svg import PlotError, PlotSpec


def test_catalog_contents_and_round_trip():
    names = catalog()
    assert len(names) >= 12
    for required in ("spectra-fig2a", "error-growth", "floquet-lce", "near-vacuum-lce", "euler-density-wave", "burgers-demo"):
        assert required in names
    for name in names:
        cfg = preset(name)
        again = ScenarioConfig.from_json(cfg.to_json())
        assert again == cfg
        assert again.to_json() == cfg.to_json()
    with pytest.raises(KeyError):
        preset("no-such-thing")


def test_schema_errors_name_the_keys():
    doc = dict(PRESETS["spectra-fig2a"])
    doc["grdi"] = {}
    doc["scheme"] = {"alpha": "zero"}
    with pytest.raises(ScenarioConfigError) as exc:
        ScenarioConfig.from_dict(doc)
    assert "grdi" in exc.value.keys
    assert any("scheme/alpha" in k for k in exc.value.keys)
    with pytest.raises(ScenarioConfigError):
        ScenarioConfig.from_json("{not json")


def test_empty_config_file(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("")
    with pytest.raises(ScenarioConfigError):
        load_config(p)


def test_spectra_scenario_artifacts(tmp_path):
    target, result = run_scenario(preset("spectra-fig2a"), tmp_path)
    assert (target / "inputs.json").exists()
    doc = json.loads((target / "spectra.json").read_text())
    assert doc["re_lambda_max"] == pytest.approx(3.1, rel=0.05)
    assert result.crash is None
    assert list(tmp_path.iterdir()) == [target]


def test_presets_are_byte_deterministic(tmp_path):
    for name in ("spectra-fig2c", "burgers-demo"):
        a, _ = run_scenario(preset(name), tmp_path / "a")
        b, _ = run_scenario(preset(name), tmp_path / "b")
        csvs = sorted(p.name for p in a.glob("*.csv"))
        assert csvs
        for f in csvs:
            assert (a / f).read_bytes() == (b / f).read_bytes()
        for f in sorted(p.name for p in (a / "plots").glob("*.svg")):
            assert (a / "plots" / f).read_bytes() == (b / "plots" / f).read_bytes()


def test_write_csv_format(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(p, {"x": np.array([0.1, np.nan]), "y": np.array([1 / 3, np.inf])})
    lines = p.read_text().splitlines()
    assert lines[0] == "x,y"
    assert lines[1] == "0.10000000000000001,0.33333333333333331"
    assert lines[2] == "nan,inf"
    with pytest.raises(ValueError):
        write_csv(p, {"x": np.ones(2), "y": np.ones(3)})


def _csv(tmp_path, text):
    p = tmp_path / "d.csv"
    p.write_text(text)
    return p


def test_plot_two_columns_single_polyline(tmp_path):
    p = _csv(tmp_path, "t,e\n0,1\n1,2\n2,0.5\n")
    out = plot_lines(p, PlotSpec("t", ("e",)), tmp_path / "a.svg")
    svg = out.read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 1
    again = plot_lines(p, PlotSpec("t", ("e",)), tmp_path / "b.svg")
    assert out.read_bytes() == again.read_bytes()


def test_plot_log_clipping_and_errors(tmp_path):
    p = _csv(tmp_path, "t,e\n0,1\n1,0\n2,-3\n")
    with pytest.warns(RuntimeWarning, match="clipped"):
        out = plot_lines(p, PlotSpec("t", ("e",), logy=True), tmp_path / "c.svg")
    assert "clipped at 1e-300" in out.read_text()
    with pytest.raises(PlotError, match="missing columns"):
        plot_lines(p, PlotSpec("t", ("nope",)))
    with pytest.raises(PlotError):
        plot_lines(_csv(tmp_path, ""), PlotSpec("t", ("e",)))
    with pytest.raises(PlotError):
        plot_lines(_csv(tmp_path, "t,e\n"), PlotSpec("t", ("e",)))


def test_cli_list(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "spectra-fig2a" in out and "euler-density-wave" in out


def test_cli_run_and_config_errors(tmp_path, capsys):
    assert main(["run", "--scenario", "spectra-fig2b", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "spectra-fig2b" / "spectra.json").exists()
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x", "analysis": "spectra", "bogus": 1}')
    out = tmp_path / "out2"
    assert main(["run", "--config", str(bad), "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists() or not any(out.iterdir())
    assert "bogus" in capsys.readouterr().err
    assert main(["run", "--scenario", "nope", "--out", str(out)]) == EXIT_CONFIG
    assert main(["run", "--out", str(out)]) == EXIT_CONFIG


def test_cli_config_file_and_seed(tmp_path):
    cfg = preset("spectra-fig2d").with_overrides(name="custom")
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o"), "--seed", "9"]) == EXIT_OK
    inputs = json.loads((tmp_path / "o" / "custom" / "inputs.json").read_text())
    assert inputs["seed"] == 9


def test_cli_dump_operator(tmp_path):
    out = tmp_path / "op"
    assert main(["dump-operator", "--family", "csbp", "--p", "2", "--n", "40", "--out", str(out)]) == EXIT_OK
    report = json.loads((out / "operator.json").read_text())
    assert report["sbp_defect"] < 1e-13
    assert (out / "D.csv").read_text().count("\n") == 41
    assert main(["dump-operator", "--family", "csbp", "--p", "2", "--n", "5", "--out", str(out)]) == EXIT_CONFIG


def test_crash_gives_nonzero_exit_and_crash_record(tmp_path):
    # the logarithmic flux cannot take the negative values of this initial condition
    cfg = preset("vce-exact").with_overrides(
        name="crashy",
        scheme={"flux": "logarithmic", "alpha": None},
        problem={"initial": "density_wave", "initial_params": {"amplitude": 1.5}},
        time={"integrator": "rk4"},
    )
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == EXIT_CRASH
    crash = json.loads((tmp_path / "o" / "crashy" / "crash.json").read_text())
    assert crash["time"] == 0.0
