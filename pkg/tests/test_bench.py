import json
import math
import re

import numpy as np
import pytest

from vaflow.bench import (
    ExperimentSpec,
    TraceRecord,
    emit_csv,
    emit_svg_plot,
    read_csv,
    render_svg,
    run_experiment,
    trace_series,
)
from vaflow.bench.svg import decade_range
from vaflow.cli import main, parse_value
from vaflow.errors import InvalidInput


def rec(i, metric, theta=(0.1, 0.2)):
    return TraceRecord(i, metric, 0.5, 12.25, 1.0 / 3.0, math.pi, tuple(theta))


# --- csv ---------------------------------------------------------------------


def test_csv_empty_trace(tmp_path):
    p = emit_csv([], tmp_path / "t.csv", n_theta=2)
    assert p.read_bytes() == b"iteration,metric,alpha,nstar,v_norm,a_norm,theta_0,theta_1\n"


def test_csv_single_record_round_trip(tmp_path):
    r = rec(3, 1e-17 / 3)
    p = emit_csv([r], tmp_path / "t.csv")
    lines = p.read_bytes().split(b"\n")
    assert len(lines) == 3 and lines[-1] == b""
    assert b"\r" not in p.read_bytes()
    assert read_csv(p) == [r]


def test_csv_beale_trace_round_trips_bitwise(tmp_path):
    out = run_experiment(ExperimentSpec("beale-compare", {"num": 300}, str(tmp_path)))
    from vaflow.gd import beale_cost, vaflow_gd_run
    from vaflow.flow import VAFlowConfig

    trace = vaflow_gd_run(beale_cost(), [4.0, 3.0], VAFlowConfig(alpha0=4.8e-6, num=300))
    back = read_csv(out.files["vaflow"])
    assert len(back) == len(trace)
    for a, b in zip(back, trace):
        assert a == b


# --- svg ---------------------------------------------------------------------


def test_svg_single_polyline(tmp_path):
    p = emit_svg_plot({"only": ([0, 1], [1.0, 2.0])}, "linear", tmp_path / "p.svg")
    text = p.read_text()
    assert text.count("<polyline") == 1
    assert text.startswith("<?xml") and text.rstrip().endswith("</svg>")
    assert "only" in text


def test_svg_log_decades():
    assert decade_range([1e-8, 3.0, 1e4]) == (-8, 4)
    text = render_svg({"t": ([0, 1, 2], [1e-8, 1.0, 1e4])}, "log-y")
    labels = re.findall(r">1e(-?\d+)<", text)
    assert [int(x) for x in labels] == list(range(-8, 5))


def test_svg_log_clamps_zero():
    text = render_svg({"t": ([0, 1], [1.0, 0.0])}, "log-y")
    assert "drawn at 1e-300" in text


def test_svg_deterministic():
    series = {"a": ([0, 1, 2], [3.0, 1.0, 0.5]), "b": ([0, 1, 2], [2.0, 2.5, 0.1])}
    assert render_svg(series, "linear") == render_svg(series, "linear")


def test_svg_rejects_empty_and_bad_style():
    with pytest.raises(InvalidInput):
        render_svg({}, "linear")
    with pytest.raises(InvalidInput):
        render_svg({"a": ([0], [1.0])}, "log-x")


def test_trace_series():
    xs, ys = trace_series([rec(0, 2.0), rec(1, 1.0)])
    assert xs == [0, 1] and ys == [2.0, 1.0]


# --- experiments ----------------------------------------------------------------


def test_spec_rejects_unknown_name():
    with pytest.raises(InvalidInput):
        ExperimentSpec("nope")


def test_spec_rejects_unknown_override():
    with pytest.raises(InvalidInput):
        ExperimentSpec("ellipse-demo", {"max_step": 0.1})


@pytest.mark.parametrize(
    "overrides",
    [{"M": 5}, {"num": -1}, {"approach": "Z"}, {"theta0": [1.0, 2.0, 3.0]}, {"alpha0": "fast"}, {"momentum_beta": 1.5}],
)
def test_spec_type_checks(overrides):
    with pytest.raises(InvalidInput):
        ExperimentSpec("beale-compare", overrides)


def test_spec_from_dict_rejects_extra_fields():
    with pytest.raises(InvalidInput):
        ExperimentSpec.from_dict({"name": "ellipse-demo", "colour": "red"})


def test_ellipse_demo_recommended(tmp_path):
    res = run_experiment(ExperimentSpec("ellipse-demo", output_dir=str(tmp_path)))
    assert res.ok
    rec_ = json.loads(res.files["recommended"].read_text())
    assert rec_["alpha"] == pytest.approx(0.834, abs=0.01)
    np.testing.assert_allclose(rec_["theta"], [3.819, 1.005], atol=1e-3)
    for key in ("gd_ray", "vaflow_curve", "exact_path", "plot"):
        assert res.files[key].exists()
    curve = np.loadtxt(res.files["vaflow_curve"], delimiter=",", skiprows=1)
    assert curve[-1, 0] == pytest.approx(1.2 * rec_["alpha"])


def test_beale_zero_iterations(tmp_path):
    res = run_experiment(ExperimentSpec("beale-compare", {"num": 0}, str(tmp_path)))
    for name in ("vaflow", "adam"):
        trace = read_csv(res.files[name])
        assert len(trace) == 1
        assert trace[0].metric == pytest.approx(12632.2, abs=0.1)


def test_ik3_default_final_distance(tmp_path):
    res = run_experiment(ExperimentSpec("ik3-compare", output_dir=str(tmp_path)))
    assert res.ok
    final = read_csv(res.files["vaflow"])[-1].metric
    assert final == pytest.approx(0.01510, abs=1e-3)
    assert res.files["plot"].read_text().count("<polyline") == 2


def test_ik3_zero_iterations(tmp_path):
    res = run_experiment(ExperimentSpec("ik3-compare", {"num": 0}, str(tmp_path)))
    assert [len(read_csv(res.files[k])) for k in ("vaflow", "jacobian-pinv")] == [1, 1]


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_failure_manifest_keeps_partial_trace(tmp_path):
    # the cost overflows at this start point
    res = run_experiment(ExperimentSpec("beale-compare", {"num": 50, "theta0": [1e200, 1e200]}, str(tmp_path)))
    assert not res.ok
    manifest = json.loads(res.files["failures"].read_text())
    assert {f["algorithm"] for f in manifest} >= {"vaflow"}
    assert res.files["vaflow"].exists()


def test_experiments_are_byte_deterministic(tmp_path):
    for name in ("ellipse-demo", "beale-compare", "ik3-compare"):
        a = run_experiment(ExperimentSpec(name, output_dir=str(tmp_path / "a")))
        b = run_experiment(ExperimentSpec(name, output_dir=str(tmp_path / "b")))
        for key, path in a.files.items():
            assert path.read_bytes() == b.files[key].read_bytes(), (name, key)


# --- cli ---------------------------------------------------------------------


def test_parse_value():
    assert parse_value("0.5") == 0.5
    assert parse_value("B") == "B"
    assert parse_value("[2, 1]") == [2, 1]
    assert parse_value("2.0,1.0") == [2.0, 1.0]


def test_cli_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("ellipse-demo", "beale-compare", "ik3-compare"):
        assert name in out
    assert "alpha0 = 4.8e-06" in out


def test_cli_run_with_sets(tmp_path):
    code = main(["run", "--experiment", "ik3-compare", "--out", str(tmp_path), "--set", "num=20", "--set", "target=2.0,1.0"])
    assert code == 0
    summary = json.loads((tmp_path / "ik3-compare" / "summary.json").read_text())
    assert summary["params"]["num"] == 20
    assert summary["params"]["target"] == [2.0, 1.0]


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"name": "beale-compare", "overrides": {"num": 10}, "output_dir": str(tmp_path / "o"), "seed": 3}))
    assert main(["run", "--config", str(cfg)]) == 0
    assert len(read_csv(tmp_path / "o" / "beale-compare" / "adam.csv")) == 11


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["run", "--experiment", "beale-compare", "--set", "bogus=1", "--out", str(tmp_path)]) == 2
    assert main(["run", "--experiment", "beale-compare", "--set", "novalue", "--out", str(tmp_path)]) == 2
    assert main(["run", "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as info:
        main(["run", "--experiment", "beale-compare", "--unknown-flag"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["run", "--experiment", "nonexistent"])
    assert info.value.code == 2


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_cli_run_failure_exit_code(tmp_path):
    code = main(["run", "--experiment", "beale-compare", "--out", str(tmp_path), "--set", "theta0=[1e200, 1e200]", "--set", "num=5"])
    assert code == 1
