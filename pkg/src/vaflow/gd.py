"""Gradient-descent fields over analytic cost functions, plus GD and Adam baselines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DivergenceError, InvalidInput
from .flow import VAFlowConfig, as_vector, vaflow_run
from .trace import TraceRecord


@dataclass(frozen=True)
class CostFunction:
    """A differentiable cost ``f`` with its analytic gradient."""

    name: str
    dim: int
    f: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]

    def __call__(self, theta) -> float:
        return float(self.f(np.asarray(theta, dtype=float)))

    def gradient(self, theta) -> np.ndarray:
        return np.asarray(self.grad(np.asarray(theta, dtype=float)), dtype=float)


@dataclass(frozen=True)
class EllipseParams:
    c1: float = 6.0
    c2: float = 2.0

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise InvalidInput("ellipse semi-axes must be positive")


@dataclass(frozen=True)
class AdamConfig:
    alpha: float = 0.15
    beta1: float = 0.9
    beta2: float = 0.999
    eps_hat: float = 1e-8

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidInput("alpha must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise InvalidInput("beta1 and beta2 must lie in [0, 1)")


def ellipse_cost(params: EllipseParams = EllipseParams()) -> CostFunction:
    k = np.array([1.0 / params.c1**2, 1.0 / params.c2**2])

    def f(t):
        return float(np.dot(k, t * t))

    def grad(t):
        return 2.0 * k * t

    return CostFunction("ellipse", 2, f, grad)


def _beale_terms(t):
    x, y = t
    return (
        1.5 - x + x * y,
        2.25 - x + x * y**2,
        2.625 - x + x * y**3,
    )


def beale_cost() -> CostFunction:
    def f(t):
        r1, r2, r3 = _beale_terms(t)
        return float(r1 * r1 + r2 * r2 + r3 * r3)

    def grad(t):
        x, y = t
        r1, r2, r3 = _beale_terms(t)
        gx = 2 * r1 * (y - 1) + 2 * r2 * (y**2 - 1) + 2 * r3 * (y**3 - 1)
        gy = 2 * r1 * x + 4 * r2 * x * y + 6 * r3 * x * y**2
        return np.array([gx, gy])

    return CostFunction("beale", 2, f, grad)


BEALE_MINIMUM = np.array([3.0, 0.5])


def gd_field(cf: CostFunction):
    """v(theta) = -grad f(theta)."""

    def field(theta):
        return -cf.gradient(theta)

    return field


def finite_diff_grad(cf: CostFunction, theta, h: float = 1e-6) -> np.ndarray:
    if not h > 0:
        raise InvalidInput("h must be positive")
    theta = as_vector(theta)
    g = np.empty_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = h
        g[i] = (cf(theta + e) - cf(theta - e)) / (2 * h)
    return g


def _check_cost(value, theta, iteration):
    if not np.isfinite(value):
        raise DivergenceError(
            f"cost became non-finite at iteration {iteration}", theta=theta, iteration=iteration
        )


def basic_gd_run(cf: CostFunction, theta0, alpha: float, num: int, observer=None):
    """Fixed-rate gradient descent. The trace starts with the iteration-0 record."""
    if not alpha > 0:
        raise InvalidInput("alpha must be positive")
    theta = as_vector(theta0)
    trace = []

    def record(i, g):
        f = cf(theta)
        _check_cost(f, theta, i)
        rec = TraceRecord.make(i, f, alpha, 1.0, g, np.zeros_like(g), theta)
        trace.append(rec)
        if observer is not None:
            observer(rec)

    g = cf.gradient(theta)
    record(0, g)
    for i in range(1, num + 1):
        theta = theta - alpha * g
        g = cf.gradient(theta)
        record(i, g)
    return trace


def adam_run(cf: CostFunction, theta0, config: AdamConfig, num: int, observer=None):
    """Bias-corrected Adam on the full (batch) gradient."""
    theta = as_vector(theta0)
    m = np.zeros_like(theta)
    s = np.zeros_like(theta)
    trace = []

    def record(i, g):
        f = cf(theta)
        _check_cost(f, theta, i)
        rec = TraceRecord.make(i, f, config.alpha, 1.0, g, np.zeros_like(g), theta)
        trace.append(rec)
        if observer is not None:
            observer(rec)

    g = cf.gradient(theta)
    record(0, g)
    for t in range(1, num + 1):
        m = config.beta1 * m + (1 - config.beta1) * g
        s = config.beta2 * s + (1 - config.beta2) * g * g
        m_hat = m / (1 - config.beta1**t)
        s_hat = s / (1 - config.beta2**t)
        theta = theta - config.alpha * m_hat / (np.sqrt(s_hat) + config.eps_hat)
        g = cf.gradient(theta)
        record(t, g)
    return trace


def vaflow_gd_run(cf: CostFunction, theta0, config: VAFlowConfig, num: Optional[int] = None, observer=None):
    """VA-Flow on -grad f, recorded as TraceRecords (iteration 0 included).

    Stops early if the gradient vanishes or the flow stalls.
    """
    theta0 = as_vector(theta0)
    f0 = cf(theta0)
    _check_cost(f0, theta0, 0)
    g0 = cf.gradient(theta0)
    first = TraceRecord.make(0, f0, config.alpha0, 1.0, g0, np.zeros_like(g0), theta0)
    trace = [first]
    if observer is not None:
        observer(first)

    def on_step(state):
        f = cf(state.theta)
        _check_cost(f, state.theta, state.iteration)
        rec = TraceRecord.make(state.iteration, f, state.alpha, state.nstar, state.v, state.a, state.theta)
        trace.append(rec)
        if observer is not None:
            observer(rec)

    vaflow_run(gd_field(cf), theta0, config, observer=on_step, num=num)
    return trace


def ellipse_exact_path(theta0, params: EllipseParams = EllipseParams(), samples: int = 200):
    """Points on the infinitesimal-GD path theta2 = theta2_0 (theta1/theta1_0)^c, c = (c1/c2)^2.

    ``theta1`` is sampled uniformly from ``theta1_0`` down to 0 inclusive.
    """
    theta0 = as_vector(theta0)
    if theta0.size != 2 or np.any(theta0 == 0):
        raise InvalidInput("theta0 must be a 2-vector with nonzero components")
    if samples < 2:
        raise InvalidInput("need at least two samples")
    c = (params.c1 / params.c2) ** 2
    t1 = np.linspace(theta0[0], 0.0, samples)
    t2 = theta0[1] * (t1 / theta0[0]) ** c
    return np.column_stack([t1, t2])


def distance_to_polyline(points, path) -> np.ndarray:
    """Closest distance from each point to the piecewise-linear ``path``."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    q = np.asarray(path, dtype=float)
    starts, ends = q[:-1], q[1:]
    seg = ends - starts
    seg2 = np.einsum("ij,ij->i", seg, seg)
    seg2 = np.where(seg2 == 0, 1.0, seg2)
    out = np.empty(len(p))
    for k, pt in enumerate(p):
        t = np.clip(np.einsum("ij,ij->i", pt - starts, seg) / seg2, 0.0, 1.0)
        closest = starts + t[:, None] * seg
        out[k] = np.sqrt(np.min(np.sum((closest - pt) ** 2, axis=1)))
    return out
