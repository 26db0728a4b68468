"""The VA-Flow update scheme.

A vector field ``v(theta)`` is probed twice per iteration: once at theta and
once a micro-step ``epsilon = alpha / m`` further along ``v``. The finite
difference gives the acceleration ``a``, and the update compounds ``n*``
virtual micro-steps under constant ``a``. ``n*`` is chosen so that the
second-order part of the move stays at ``rho_targ`` of the first-order part,
and the next learning rate is ``n* * epsilon``.

Any callable mapping a 1-D float array to an array of the same shape can be
used as a field; it must be pure.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .errors import Converged, InvalidInput, NumericalFailure, StepFailure

VectorField = Callable[[np.ndarray], np.ndarray]

UNBOUNDED = math.inf
# |a| (or |v.a|) below this fraction of the opposing norm counts as zero
ATOL = 1e-14
VTOL = 1e-12
APPROACHES = ("A", "B", "C")


def as_vector(theta) -> np.ndarray:
    x = np.array(theta, dtype=float).reshape(-1)
    if x.size < 1:
        raise InvalidInput("parameter vector must have at least one component")
    if not np.all(np.isfinite(x)):
        raise InvalidInput("parameter vector has non-finite components")
    return x


@dataclass(frozen=True)
class VAFlowConfig:
    alpha0: float = 0.01
    rho_targ: float = 0.1
    m: int = 100
    num: int = 100
    approach: str = "A"
    nstar_min: float = 10.0
    alpha_max: Optional[float] = None
    momentum_beta: float = 0.0
    retry_shrink: float = 0.5
    max_retries: int = 8

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise InvalidInput("alpha0 must be positive")
        if not self.rho_targ > 0:
            raise InvalidInput("rho_targ must be positive")
        if int(self.m) != self.m or self.m < 10:
            raise InvalidInput("m must be an integer >= 10")
        if int(self.num) != self.num or self.num < 0:
            raise InvalidInput("num must be a non-negative integer")
        if self.approach not in APPROACHES:
            raise InvalidInput(f"approach must be one of {APPROACHES}, got {self.approach!r}")
        if self.nstar_min < 1:
            raise InvalidInput("nstar_min must be >= 1")
        if self.alpha_max is not None and not self.alpha_max > 0:
            raise InvalidInput("alpha_max must be positive when set")
        if not 0 <= self.momentum_beta < 1:
            raise InvalidInput("momentum_beta must lie in [0, 1)")
        if not 0 < self.retry_shrink < 1:
            raise InvalidInput("retry_shrink must lie in (0, 1)")
        if int(self.max_retries) != self.max_retries or self.max_retries < 0:
            raise InvalidInput("max_retries must be a non-negative integer")

    def replace(self, **changes) -> "VAFlowConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class FlowState:
    """One iterate.

    ``theta`` is the parameter after the step; ``v``, ``a``, ``epsilon`` and
    ``nstar`` are what the step used; ``alpha`` is the learning rate handed
    to the next step (``nstar * epsilon``). ``retries`` counts n*-floor
    retries and ``field_evals`` the field evaluations spent on this step.
    """

    theta: np.ndarray
    v: np.ndarray
    a: np.ndarray
    epsilon: float
    alpha: float
    nstar: float
    iteration: int = 0
    momentum_buffer: np.ndarray = None
    retries: int = 0
    field_evals: int = 0
    dtheta: np.ndarray = dc_field(default=None, repr=False)

    @classmethod
    def initial(cls, theta0, config: VAFlowConfig) -> "FlowState":
        theta = as_vector(theta0)
        zero = np.zeros_like(theta)
        return cls(
            theta=theta,
            v=zero.copy(),
            a=zero.copy(),
            epsilon=config.alpha0 / config.m,
            alpha=config.alpha0,
            nstar=1.0,
            iteration=0,
            momentum_buffer=zero.copy(),
        )


def _eval_field(field: VectorField, theta: np.ndarray) -> np.ndarray:
    v = np.asarray(field(theta), dtype=float)
    if v.shape != theta.shape:
        raise InvalidInput(f"field returned shape {v.shape} for theta of shape {theta.shape}")
    if not np.all(np.isfinite(v)):
        raise NumericalFailure("vector field returned non-finite values", theta=theta)
    return v


def estimate_acceleration(field: VectorField, theta0, epsilon: float, v0=None):
    """Return ``(v0, a)`` with ``a = (v(theta0 + epsilon*v0) - v0) / epsilon``.

    Pass a previously computed ``v0`` to skip the first evaluation.
    """
    if not epsilon > 0:
        raise InvalidInput("epsilon must be positive")
    theta0 = as_vector(theta0)
    if v0 is None:
        v0 = _eval_field(field, theta0)
    theta1 = theta0 + epsilon * v0
    v1 = _eval_field(field, theta1)
    return v0, (v1 - v0) / epsilon


def _check_nstar_args(v, a, rho_targ, epsilon):
    if not epsilon > 0:
        raise InvalidInput("epsilon must be positive")
    if not rho_targ > 0:
        raise InvalidInput("rho_targ must be positive")
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    vn = float(np.linalg.norm(v))
    if vn == 0.0:
        raise Converged("vtol")
    return v, a, vn


def nstar_approach_a(v, a, rho_targ: float, epsilon: float) -> float:
    """n* holding ||second term|| / ||first term|| of the compounded move at rho_targ."""
    v, a, vn = _check_nstar_args(v, a, rho_targ, epsilon)
    an = float(np.linalg.norm(a))
    if an < ATOL * vn:
        return UNBOUNDED
    return 1.0 + (2.0 * rho_targ / epsilon) * vn / an


def nstar_approach_b(v, a, rho_targ: float, epsilon: float) -> float:
    """Like approach A, with both terms projected onto the direction of v."""
    v, a, vn = _check_nstar_args(v, a, rho_targ, epsilon)
    v2 = vn * vn
    va = abs(float(np.dot(v, a)))
    if va < ATOL * v2:
        return UNBOUNDED
    return 1.0 + (2.0 * rho_targ / epsilon) * v2 / va


def nstar_approach_c(v, a, rho_targ: float, epsilon: float) -> float:
    """n* holding the velocity change ||n eps a|| / ||v|| at rho_targ."""
    v, a, vn = _check_nstar_args(v, a, rho_targ, epsilon)
    an = float(np.linalg.norm(a))
    if an < ATOL * vn:
        return UNBOUNDED
    return (rho_targ / epsilon) * vn / an


NSTAR = {"A": nstar_approach_a, "B": nstar_approach_b, "C": nstar_approach_c}


def compound_dtheta(v, a, n: float, epsilon: float) -> np.ndarray:
    # n stays real; no rounding to an integer step count
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    return n * epsilon * v + 0.5 * n * (n - 1.0) * epsilon**2 * a


def compound_v(v, a, n: float, epsilon: float) -> np.ndarray:
    return np.asarray(v, dtype=float) + n * epsilon * np.asarray(a, dtype=float)


def continuous_update(theta0, v, a, alpha: float) -> np.ndarray:
    """theta0 + alpha v + alpha^2 a / 2, the large-n limit of the compounded move."""
    if alpha < 0:
        raise InvalidInput("alpha must be non-negative")
    return (
        np.asarray(theta0, dtype=float)
        + alpha * np.asarray(v, dtype=float)
        + 0.5 * alpha**2 * np.asarray(a, dtype=float)
    )


def predict_cf(f0: float, v, a, alpha: float) -> float:
    """Second-order cost prediction after a continuous update; requires v = -grad f."""
    v = np.asarray(v, dtype=float)
    return float(f0 - alpha * np.dot(v, v) - alpha**2 * np.dot(v, np.asarray(a, dtype=float)))


def vtol_for(theta: np.ndarray) -> float:
    return VTOL * max(1.0, float(np.linalg.norm(theta)))


def vaflow_step(
    field: VectorField,
    state: FlowState,
    config: VAFlowConfig,
    alpha_max: Optional[float] = None,
) -> FlowState:
    """Run one loop body of VA-Flow and return the next state.

    ``alpha_max`` tightens ``config.alpha_max`` for this step only; callers
    with state-dependent limits (the IK driver) pass it per step.

    Raises :class:`Converged` when the field vanishes at ``state.theta`` or
    the probe step is too small to resolve, :class:`StepFailure` when the
    n* floor cannot be met within ``config.max_retries`` halvings of alpha.
    """
    if not state.alpha > 0:
        raise InvalidInput("state.alpha must be positive")
    caps = [c for c in (config.alpha_max, alpha_max) if c is not None]
    cap = min(caps) if caps else None
    theta = state.theta
    alpha = state.alpha if cap is None else min(state.alpha, cap)
    nstar_fn = NSTAR[config.approach]

    v0 = _eval_field(field, theta)
    evals = 1
    if np.linalg.norm(v0) < vtol_for(theta):
        raise Converged("vtol")

    retries = 0
    tried = []
    while True:
        eps = alpha / config.m
        if eps * np.linalg.norm(v0) < vtol_for(theta):
            raise Converged("stalled")
        _, a = estimate_acceleration(field, theta, eps, v0=v0)
        evals += 1
        nstar = nstar_fn(v0, a, config.rho_targ, eps)
        if math.isinf(nstar):
            nstar = cap / eps if cap is not None else 10.0 * config.m
        elif cap is not None and nstar * eps > cap:
            nstar = cap / eps
        tried.append((alpha, nstar))
        if nstar >= config.nstar_min:
            break
        if retries >= config.max_retries:
            raise StepFailure(
                f"n* stayed below {config.nstar_min} after {retries} retries",
                diagnostics={
                    "theta": theta.copy(),
                    "attempts": tried,
                    "v_norm": float(np.linalg.norm(v0)),
                    "a_norm": float(np.linalg.norm(a)),
                },
            )
        retries += 1
        alpha *= config.retry_shrink

    buf = state.momentum_buffer
    # overflow is reported below as NumericalFailure
    with np.errstate(over="ignore", invalid="ignore"):
        dtheta = compound_dtheta(v0, a, nstar, eps)
        if config.momentum_beta > 0 and buf is not None:
            dtheta = dtheta + config.momentum_beta * buf
        new_theta = theta + dtheta
    if not np.all(np.isfinite(new_theta)):
        raise NumericalFailure("theta became non-finite", theta=theta)

    return FlowState(
        theta=new_theta,
        v=v0,
        a=a,
        epsilon=eps,
        alpha=nstar * eps,
        nstar=nstar,
        iteration=state.iteration + 1,
        momentum_buffer=dtheta if config.momentum_beta > 0 else np.zeros_like(theta),
        retries=retries,
        field_evals=evals,
        dtheta=dtheta,
    )


def vaflow_run(
    field: VectorField,
    theta0,
    config: VAFlowConfig,
    observer: Optional[Callable[[FlowState], None]] = None,
    alpha_cap: Optional[Callable[[np.ndarray], float]] = None,
    num: Optional[int] = None,
):
    """Iterate :func:`vaflow_step` up to ``num`` (default ``config.num``) times.

    Returns ``(final_theta, trace)`` with one state per completed step. A
    :class:`Converged` signal ends the run early. ``alpha_cap(theta)``, when
    given, supplies a fresh alpha limit before every step. Step errors are
    re-raised with their ``iteration`` attribute set.
    """
    state = FlowState.initial(theta0, config)
    n = config.num if num is None else num
    trace = []
    for i in range(1, n + 1):
        try:
            cap = alpha_cap(state.theta) if alpha_cap is not None else None
            state = vaflow_step(field, state, config, alpha_max=cap)
        except Converged:
            break
        except (NumericalFailure, StepFailure) as exc:
            exc.iteration = i
            raise
        trace.append(state)
        if observer is not None:
            observer(state)
    return state.theta.copy(), trace
