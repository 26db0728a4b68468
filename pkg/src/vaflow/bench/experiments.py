"""The three reproducible experiments and their file outputs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List

import numpy as np

from ..errors import InvalidInput, NumericalFailure, StepFailure
from ..flow import FlowState, VAFlowConfig, continuous_update, vaflow_step
from ..gd import (
    BEALE_MINIMUM,
    AdamConfig,
    EllipseParams,
    adam_run,
    beale_cost,
    ellipse_cost,
    ellipse_exact_path,
    gd_field,
    vaflow_gd_run,
)
from ..ik import (
    PAPER_TARGET,
    PAPER_THETA0,
    IKProblem,
    PlanarArm,
    jacobian_pseudoinverse_run,
    vaflow_ik_run,
)
from ..trace import TraceRecord
from .csvio import emit_csv, emit_points_csv
from .svg import emit_svg_plot, trace_series

ADAM_ALPHA = 0.15
ELLIPSE = EllipseParams(6.0, 2.0)

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "ellipse-demo": {
        "alpha0": 0.01,
        "rho_targ": 0.2,
        "M": 100,
        "approach": "A",
        "theta0": [4.0, 1.5],
    },
    "beale-compare": {
        "alpha0": 4.8e-6,
        "rho_targ": 0.1,
        "M": 100,
        "num": 5000,
        "approach": "A",
        "momentum_beta": 0.0,
        "theta0": [4.0, 3.0],
    },
    "ik3-compare": {
        "alpha0": 0.01,
        "rho_targ": 0.1,
        "M": 100,
        "num": 300,
        "approach": "A",
        "momentum_beta": 0.0,
        "max_step": 0.1,
        "target": [float(x) for x in PAPER_TARGET],
        "theta0": [float(x) for x in PAPER_THETA0],
    },
}

EXPERIMENTS = tuple(DEFAULTS)
SPEC_FIELDS = ("name", "overrides", "output_dir", "seed")


def _positive_float(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidInput(f"{key} must be a number, got {value!r}")
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise InvalidInput(f"{key} must be positive and finite")
    return value


def _fraction(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidInput(f"{key} must be a number, got {value!r}")
    value = float(value)
    if not 0 <= value < 1:
        raise InvalidInput(f"{key} must lie in [0, 1)")
    return value


def _count(key, value, minimum):
    if isinstance(value, bool) or not isinstance(value, int) and not (
        isinstance(value, float) and value.is_integer()
    ):
        raise InvalidInput(f"{key} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise InvalidInput(f"{key} must be >= {minimum}")
    return value


def _approach(key, value):
    if value not in ("A", "B", "C"):
        raise InvalidInput(f"{key} must be one of A, B, C, got {value!r}")
    return value


def _vector(key, value, size):
    if not isinstance(value, (list, tuple)) or len(value) != size:
        raise InvalidInput(f"{key} must be a list of {size} numbers, got {value!r}")
    out = []
    for x in value:
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise InvalidInput(f"{key} entries must be finite numbers, got {value!r}")
        out.append(float(x))
    return out


CHECKS: Dict[str, Callable[[str, Any, str], Any]] = {
    "alpha0": lambda k, v, name: _positive_float(k, v),
    "rho_targ": lambda k, v, name: _positive_float(k, v),
    "M": lambda k, v, name: _count(k, v, 10),
    "num": lambda k, v, name: _count(k, v, 0),
    "approach": lambda k, v, name: _approach(k, v),
    "momentum_beta": lambda k, v, name: _fraction(k, v),
    "max_step": lambda k, v, name: _positive_float(k, v),
    "target": lambda k, v, name: _vector(k, v, 2),
    "theta0": lambda k, v, name: _vector(k, v, len(DEFAULTS[name]["theta0"])),
}


@dataclass
class ExperimentSpec:
    name: str
    overrides: Dict[str, Any] = field(default_factory=dict)
    output_dir: str = "out"
    seed: int = 0

    def __post_init__(self):
        if self.name not in DEFAULTS:
            raise InvalidInput(f"unknown experiment {self.name!r}; choose from {', '.join(EXPERIMENTS)}")
        if not isinstance(self.overrides, dict):
            raise InvalidInput("overrides must be a mapping")
        allowed = DEFAULTS[self.name]
        for key in self.overrides:
            if key not in allowed:
                raise InvalidInput(
                    f"{self.name} does not take parameter {key!r}; valid: {', '.join(allowed)}"
                )
        self.overrides = {k: CHECKS[k](k, v, self.name) for k, v in self.overrides.items()}
        self.seed = _count("seed", self.seed, 0)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentSpec":
        if not isinstance(data, dict):
            raise InvalidInput("experiment config must be a JSON object")
        unknown = set(data) - set(SPEC_FIELDS)
        if unknown:
            raise InvalidInput(f"unknown config fields: {', '.join(sorted(unknown))}")
        if "name" not in data:
            raise InvalidInput("config needs a 'name'")
        return cls(**data)

    def params(self) -> Dict[str, Any]:
        p = json.loads(json.dumps(DEFAULTS[self.name]))
        p.update(self.overrides)
        return p


@dataclass
class RunResult:
    files: Dict[str, Path]
    failures: List[Dict[str, Any]]
    summary: Dict[str, Any]

    @property
    def ok(self) -> bool:
        return not self.failures


def _flow_config(p, num=None, **extra) -> VAFlowConfig:
    return VAFlowConfig(
        alpha0=p["alpha0"],
        rho_targ=p["rho_targ"],
        m=p["M"],
        num=p.get("num", 1) if num is None else num,
        approach=p["approach"],
        momentum_beta=p.get("momentum_beta", 0.0),
        **extra,
    )


def _write_json(obj, path: Path) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    return path


def _guarded(name, runner, failures):
    """Run ``runner(observer)``; on failure keep the partial trace and log it."""
    partial: List[TraceRecord] = []
    try:
        return runner(partial.append)
    except (NumericalFailure, StepFailure, InvalidInput) as exc:
        failures.append(
            {
                "algorithm": name,
                "error": type(exc).__name__,
                "message": str(exc),
                "iteration": getattr(exc, "iteration", None),
            }
        )
        return partial


def _ellipse_demo(p, out: Path, failures):
    cf = ellipse_cost(ELLIPSE)
    field = gd_field(cf)
    theta0 = np.array(p["theta0"])
    config = _flow_config(p, num=1)
    step = vaflow_step(field, FlowState.initial(theta0, config), config)
    alpha_a = step.alpha
    v, a = step.v, step.a

    alphas = np.linspace(0.0, 1.2 * alpha_a, 121)
    gd = np.array([theta0 + s * v for s in alphas])
    flow = np.array([continuous_update(theta0, v, a, s) for s in alphas])
    exact = ellipse_exact_path(theta0, ELLIPSE, samples=201)

    files = {
        "gd_ray": emit_points_csv(["alpha", "theta_0", "theta_1"], np.column_stack([alphas, gd]), out / "gd_ray.csv"),
        "vaflow_curve": emit_points_csv(
            ["alpha", "theta_0", "theta_1"], np.column_stack([alphas, flow]), out / "vaflow_curve.csv"
        ),
        "exact_path": emit_points_csv(["theta_0", "theta_1"], exact, out / "exact_path.csv"),
    }
    recommended = {
        "alpha": alpha_a,
        "nstar": step.nstar,
        "epsilon": step.epsilon,
        "theta": [float(x) for x in step.theta],
        "theta_continuous": [float(x) for x in continuous_update(theta0, v, a, alpha_a)],
        "v": [float(x) for x in v],
        "a": [float(x) for x in a],
        "cost_before": cf(theta0),
        "cost_after": cf(step.theta),
    }
    files["recommended"] = _write_json(recommended, out / "recommended.json")
    files["plot"] = emit_svg_plot(
        {
            "basic GD": (gd[:, 0], gd[:, 1]),
            "VA-Flow": (flow[:, 0], flow[:, 1]),
            "exact path": (exact[:, 0], exact[:, 1]),
        },
        "linear",
        out / "ellipse.svg",
        markers={"start": (theta0[0], theta0[1]), "recommended": (step.theta[0], step.theta[1])},
        title="Single update on the ellipse",
        xlabel="theta_1",
        ylabel="theta_2",
    )
    return files, {"alpha_A": alpha_a, "recommended_theta": recommended["theta"]}


def _beale_compare(p, out: Path, failures):
    cf = beale_cost()
    theta0 = p["theta0"]
    num = p["num"]
    config = _flow_config(p)
    traces = {
        "vaflow": _guarded("vaflow", lambda obs: vaflow_gd_run(cf, theta0, config, num=num, observer=obs), failures),
        "adam": _guarded("adam", lambda obs: adam_run(cf, theta0, AdamConfig(alpha=ADAM_ALPHA), num, observer=obs), failures),
    }
    files = {name: emit_csv(tr, out / f"{name}.csv", n_theta=2) for name, tr in traces.items()}
    nonempty = {k: v for k, v in traces.items() if v}
    if nonempty:
        files["cf_plot"] = emit_svg_plot(
            {k: trace_series(v) for k, v in nonempty.items()},
            "log-y",
            out / "beale_cf.svg",
            title="Beale function",
            ylabel="cost",
        )
        files["distance_plot"] = emit_svg_plot(
            {
                k: ([r.iteration for r in v], [float(np.linalg.norm(np.array(r.theta) - BEALE_MINIMUM)) for r in v])
                for k, v in nonempty.items()
            },
            "log-y",
            out / "beale_distance.svg",
            title="Distance to the minimum (3, 0.5)",
            ylabel="distance",
        )
    summary = {f"final_cf_{k}": v[-1].metric for k, v in nonempty.items()}
    summary.update({f"iterations_{k}": v[-1].iteration for k, v in nonempty.items()})
    if "vaflow" in nonempty and "adam" in nonempty and nonempty["adam"][-1].metric > 0:
        summary["cf_ratio_vaflow_over_adam"] = nonempty["vaflow"][-1].metric / nonempty["adam"][-1].metric
    return files, summary


def _ik3_compare(p, out: Path, failures):
    problem = IKProblem(PlanarArm((1.0, 1.0, 1.0)), p["target"], max_step=p["max_step"])
    theta0 = p["theta0"]
    num = p["num"]
    config = _flow_config(p)

    def pinv_runner(obs):
        if num == 0:
            return jacobian_pseudoinverse_run(problem, theta0, 1, observer=obs)[:1]
        return jacobian_pseudoinverse_run(problem, theta0, num, observer=obs)

    traces = {
        "vaflow": _guarded("vaflow", lambda obs: vaflow_ik_run(problem, theta0, config, num=num, observer=obs), failures),
        "jacobian-pinv": _guarded("jacobian-pinv", pinv_runner, failures),
    }
    files = {name: emit_csv(tr, out / f"{name}.csv", n_theta=3) for name, tr in traces.items()}
    nonempty = {k: v for k, v in traces.items() if v}
    if nonempty:
        files["plot"] = emit_svg_plot(
            {k: trace_series(v) for k, v in nonempty.items()},
            "linear",
            out / "ik3_distance.svg",
            title="Distance from end-effector to target",
            ylabel="distance",
        )
    floor = float(np.linalg.norm(problem.target)) - problem.arm.reach
    summary = {f"final_distance_{k}": v[-1].metric for k, v in nonempty.items()}
    summary["unreachability_floor"] = max(floor, 0.0)
    return files, summary


RUNNERS = {
    "ellipse-demo": _ellipse_demo,
    "beale-compare": _beale_compare,
    "ik3-compare": _ik3_compare,
}


def run_experiment(spec: ExperimentSpec) -> RunResult:
    """Run ``spec`` and write its artifacts under ``spec.output_dir/spec.name``.

    Algorithm failures do not abort the experiment: partial traces are still
    written and ``failures.json`` lists what went wrong.
    """
    out = Path(spec.output_dir) / spec.name
    out.mkdir(parents=True, exist_ok=True)
    failures: List[Dict[str, Any]] = []
    params = spec.params()
    files, summary = RUNNERS[spec.name](params, out, failures)
    summary = {"experiment": spec.name, "params": params, **summary}
    files["summary"] = _write_json(summary, out / "summary.json")
    manifest = out / "failures.json"
    if failures:
        files["failures"] = _write_json(failures, manifest)
    elif manifest.exists():
        manifest.unlink()
    return RunResult(files=files, failures=failures, summary=summary)
