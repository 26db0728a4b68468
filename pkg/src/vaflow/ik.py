"""Planar N-link arm inverse kinematics.

Joint angles are relative: link i points along theta_1 + ... + theta_i,
counterclockwise from +x, with the base at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidInput, NumericalFailure
from .flow import VAFlowConfig, as_vector, vaflow_run
from .linalg import pinv
from .trace import TraceRecord

PAPER_THETA0 = np.array([math.pi / 2, -math.pi / 4, -math.pi / 4])
PAPER_TARGET = np.array([2.132, 2.132])
_TINY = 1e-300


@dataclass(frozen=True)
class PlanarArm:
    link_lengths: Sequence[float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.link_lengths)
        if not lengths:
            raise InvalidInput("an arm needs at least one link")
        if any(not (x > 0 and math.isfinite(x)) for x in lengths):
            raise InvalidInput("link lengths must be positive and finite")
        object.__setattr__(self, "link_lengths", lengths)

    @property
    def n_links(self) -> int:
        return len(self.link_lengths)

    @property
    def reach(self) -> float:
        return float(sum(self.link_lengths))

    def _angles(self, theta) -> np.ndarray:
        theta = as_vector(theta)
        if theta.size != self.n_links:
            raise InvalidInput(f"expected {self.n_links} joint angles, got {theta.size}")
        return theta


@dataclass(frozen=True)
class IKProblem:
    arm: PlanarArm
    target: Sequence[float]
    max_step: float = 0.1
    stop_tol: float = 1e-6

    def __post_init__(self):
        target = np.array(self.target, dtype=float).reshape(-1)
        if target.size != 2 or not np.all(np.isfinite(target)):
            raise InvalidInput("target must be a finite 2-D point")
        if not self.max_step > 0:
            raise InvalidInput("max_step must be positive")
        if not self.stop_tol > 0:
            raise InvalidInput("stop_tol must be positive")
        object.__setattr__(self, "target", tuple(target))

    def offset(self, theta) -> np.ndarray:
        """s = target - r(theta)."""
        return np.asarray(self.target) - forward_kinematics(self.arm, theta)

    def distance(self, theta) -> float:
        return float(np.linalg.norm(self.offset(theta)))


def forward_kinematics(arm: PlanarArm, theta) -> np.ndarray:
    theta = arm._angles(theta)
    phi = np.cumsum(theta)
    lengths = np.asarray(arm.link_lengths)
    return np.array([np.sum(lengths * np.cos(phi)), np.sum(lengths * np.sin(phi))])


def joint_positions(arm: PlanarArm, theta) -> np.ndarray:
    """Base, every joint, and the end-effector as an (N+1) x 2 array."""
    theta = arm._angles(theta)
    phi = np.cumsum(theta)
    lengths = np.asarray(arm.link_lengths)
    steps = np.column_stack([lengths * np.cos(phi), lengths * np.sin(phi)])
    return np.vstack([np.zeros(2), np.cumsum(steps, axis=0)])


def arm_jacobian(arm: PlanarArm, theta) -> np.ndarray:
    """2 x N Jacobian; column j sums (-sin, cos) of every link from j outward."""
    theta = arm._angles(theta)
    phi = np.cumsum(theta)
    lengths = np.asarray(arm.link_lengths)
    xs = lengths * np.cos(phi)
    ys = lengths * np.sin(phi)
    # suffix sums
    return np.vstack([-np.cumsum(ys[::-1])[::-1], np.cumsum(xs[::-1])[::-1]])


def ik_vector_field(problem: IKProblem):
    """v(theta) = pinv(J) s_hat, or zero once the target is within stop_tol."""
    arm = problem.arm
    n = arm.n_links

    def field(theta):
        s = problem.offset(theta)
        dist = float(np.linalg.norm(s))
        if dist < problem.stop_tol:
            return np.zeros(n)
        return pinv(arm_jacobian(arm, theta)) @ (s / dist)

    return field


def _record(problem, i, theta, alpha, nstar, v, a):
    return TraceRecord.make(i, problem.distance(theta), alpha, nstar, v, a, theta)


def jacobian_pseudoinverse_run(problem: IKProblem, theta0, num: int, observer=None):
    """First-order baseline: dtheta = G (alpha s_hat), alpha = min(|s|, max_step).

    The trace holds the iteration-0 record followed by one record per update.
    """
    if num < 1:
        raise InvalidInput("num must be >= 1")
    arm = problem.arm
    theta = arm._angles(theta0)
    trace = []

    def emit(rec):
        trace.append(rec)
        if observer is not None:
            observer(rec)

    n = arm.n_links
    emit(_record(problem, 0, theta, 0.0, 1.0, np.zeros(n), np.zeros(n)))
    for i in range(1, num + 1):
        s = problem.offset(theta)
        dist = float(np.linalg.norm(s))
        if dist < problem.stop_tol:
            move = 0.0
            v = np.zeros(n)
        else:
            move = min(dist, problem.max_step)
            v = pinv(arm_jacobian(arm, theta)) @ (s / dist)
        theta = theta + move * v
        if not np.all(np.isfinite(theta)):
            raise NumericalFailure("joint angles became non-finite", theta=theta, iteration=i)
        emit(_record(problem, i, theta, move, 1.0, v, np.zeros(n)))
    return trace


def ik_alpha_cap(problem: IKProblem):
    """Per-step alpha limit so the predicted effector move |J v| alpha is at most
    min(max_step, remaining distance).

    J v is formed from J directly, so the cap costs no field evaluation.
    """

    def cap(theta):
        s = problem.offset(theta)
        dist = float(np.linalg.norm(s))
        if dist == 0.0:
            return problem.max_step
        j = arm_jacobian(problem.arm, theta)
        speed = float(np.linalg.norm(j @ (pinv(j) @ (s / dist))))
        return min(problem.max_step, dist) / max(speed, _TINY)

    return cap


def vaflow_ik_run(
    problem: IKProblem,
    theta0,
    config: VAFlowConfig,
    num: Optional[int] = None,
    observer=None,
):
    """VA-Flow over the IK field with the effector-space alpha cap applied every step."""
    arm = problem.arm
    theta0 = arm._angles(theta0)
    field = ik_vector_field(problem)
    n = arm.n_links
    first = _record(problem, 0, theta0, config.alpha0, 1.0, np.zeros(n), np.zeros(n))
    trace = [first]
    if observer is not None:
        observer(first)

    def on_step(state):
        rec = _record(problem, state.iteration, state.theta, state.alpha, state.nstar, state.v, state.a)
        trace.append(rec)
        if observer is not None:
            observer(rec)

    vaflow_run(field, theta0, config, observer=on_step, alpha_cap=ik_alpha_cap(problem), num=num)
    return trace
