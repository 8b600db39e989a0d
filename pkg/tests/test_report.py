"""CSV and SVG emission: schema, round trip, determinism, atomicity."""

import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from gpebo import RunResult, builtin_scenario, emit_csv, emit_svg, simulate
from gpebo.excitation import pe_check
from gpebo.report import csv_header, format_pe_summary, write_pe_report


def _sweep(gammas=(1.0, 10.0), horizon=1.0, scenario="c1", estimator="gradient"):
    runs = [
        simulate(builtin_scenario(scenario, g, estimator=estimator, horizon=horizon))
        for g in gammas
    ]
    return RunResult(
        scenario_id=scenario,
        estimator=estimator,
        gammas=list(gammas),
        runs=runs,
        duration=0.0,
    )


def test_csv_header_shape():
    assert csv_header(2) == (
        "t,gamma,x1,x2,xhat1,xhat2,e1,e2,theta1,theta2,thetahat1,thetahat2"
    )


def test_csv_rows_and_order(tmp_path):
    result = _sweep(gammas=(10.0, 1.0), horizon=0.01)
    path = tmp_path / "out.csv"
    emit_csv(result, str(path))
    lines = path.read_text().splitlines()
    n_nodes = len(result.runs[0].t)
    assert len(lines) == 1 + 2 * n_nodes
    gammas = [float(line.split(",")[1]) for line in lines[1:]]
    # blocks ordered by ascending gamma regardless of construction order
    assert gammas[:n_nodes] == [1.0] * n_nodes
    assert gammas[n_nodes:] == [10.0] * n_nodes
    times = [float(line.split(",")[0]) for line in lines[1 : n_nodes + 1]]
    assert times == sorted(times)


def test_csv_initial_row_error_columns(tmp_path):
    result = _sweep(gammas=(1.0,), horizon=0.01)
    path = tmp_path / "out.csv"
    emit_csv(result, str(path))
    first = path.read_text().splitlines()[1].split(",")
    # defaults: xhat(0) = xi0 - Phi(0) theta_hat0 = 0, so e(0) = x(0)
    assert float(first[0]) == 0.0
    assert float(first[6]) == 1.0 and float(first[7]) == -1.0
    assert float(first[2]) == 1.0 and float(first[3]) == -1.0


def test_csv_round_trip_exact(tmp_path):
    result = _sweep(gammas=(10.0,), horizon=0.1)
    run = result.runs[0]
    path = tmp_path / "out.csv"
    emit_csv(result, str(path))
    lines = path.read_text().splitlines()[1:]
    parsed = np.array([[float(v) for v in line.split(",")] for line in lines])
    assert np.array_equal(parsed[:, 0], run.t)
    assert np.array_equal(parsed[:, 2:4], run.x)
    assert np.array_equal(parsed[:, 4:6], run.xhat)
    assert np.array_equal(parsed[:, 6:8], run.estimation_error)
    assert np.array_equal(parsed[:, 8:10], np.tile(run.theta, (len(run.t), 1)))
    assert np.array_equal(parsed[:, 10:12], run.theta_hat)


def test_csv_deterministic_bytes(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    emit_csv(_sweep(horizon=0.05), str(a))
    emit_csv(_sweep(horizon=0.05), str(b))
    assert a.read_bytes() == b.read_bytes()


def test_csv_write_failure_leaves_no_file(tmp_path):
    result = _sweep(gammas=(1.0,), horizon=0.01)
    missing = tmp_path / "no_such_dir" / "out.csv"
    with pytest.raises(OSError):
        emit_csv(result, str(missing))
    assert not missing.exists()
    assert not list(tmp_path.iterdir())


def test_svg_structure(tmp_path):
    result = _sweep(gammas=(1.0, 10.0, 100.0), horizon=0.5)
    path = tmp_path / "fig.svg"
    emit_svg(result, str(path))
    text = path.read_text()
    assert text.startswith("<?xml")
    root = ET.fromstring(text)
    assert root.tag == "{http://www.w3.org/2000/svg}svg"
    polys = root.findall(".//{http://www.w3.org/2000/svg}polyline")
    assert len(polys) == 2 * 3  # one per gamma in each state-component panel
    labels = [el.text for el in root.iter("{http://www.w3.org/2000/svg}text")]
    for g in ("gamma=1", "gamma=10", "gamma=100"):
        assert g in labels


def test_svg_deterministic_bytes(tmp_path):
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    emit_svg(_sweep(horizon=0.2), str(a))
    emit_svg(_sweep(horizon=0.2), str(b))
    assert a.read_bytes() == b.read_bytes()


def test_svg_thins_long_runs(tmp_path):
    result = _sweep(gammas=(1.0,), horizon=6.0)  # 6001 nodes
    path = tmp_path / "fig.svg"
    emit_svg(result, str(path))
    root = ET.fromstring(path.read_text())
    polys = root.findall(".//{http://www.w3.org/2000/svg}polyline")
    for p in polys:
        npts = len(p.attrib["points"].split())
        assert npts <= 2001


def test_run_result_validation():
    run = simulate(builtin_scenario("c1", 1.0, horizon=0.01))
    with pytest.raises(ValueError):
        RunResult(scenario_id="c1", estimator="gradient", gammas=[1.0, 2.0],
                  runs=[run], duration=0.0)
    with pytest.raises(ValueError):
        RunResult(scenario_id="c1", estimator="gradient", gammas=[],
                  runs=[], duration=0.0)


def test_pe_report_file(tmp_path):
    res = simulate(builtin_scenario("c1", 0.0, horizon=6.0))
    rep = pe_check(res.phi_history(), res.scenario.system.C, T=2.0, delta_floor=1e-4)
    path = tmp_path / "pe.csv"
    write_pe_report(rep, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "window_start,min_eig_output,min_eig_regressor"
    assert len(lines) == 1 + len(rep.starts)
    row = lines[1].split(",")
    assert float(row[0]) == rep.starts[0]
    assert float(row[1]) == rep.min_eig_output[0]
    summary = format_pe_summary(rep)
    assert "window=2" in summary and "holds=" in summary
