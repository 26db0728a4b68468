"""Per-iteration experiment rows shared by every run function."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class TraceRecord:
    """One row of an experiment trace.

    ``metric`` is the cost for GD runs and the target distance for IK runs.
    First-order baselines report ``nstar = 1`` and ``a_norm = 0``.
    """

    iteration: int
    metric: float
    alpha: float
    nstar: float
    v_norm: float
    a_norm: float
    theta: Tuple[float, ...]

    @classmethod
    def make(cls, iteration, metric, alpha, nstar, v, a, theta):
        return cls(
            iteration=int(iteration),
            metric=float(metric),
            alpha=float(alpha),
            nstar=float(nstar),
            v_norm=float(np.linalg.norm(v)),
            a_norm=float(np.linalg.norm(a)),
            theta=tuple(float(t) for t in np.asarray(theta, dtype=float).reshape(-1)),
        )
