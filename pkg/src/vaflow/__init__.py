"""VA-Flow: second-order updates from two evaluations of a vector field.

Applied to gradient descent (``vaflow.gd``) and planar inverse kinematics
(``vaflow.ik``), with a benchmark runner in ``vaflow.bench``.
"""

from .errors import Converged, DivergenceError, InvalidInput, NumericalFailure, StepFailure
from .flow import (
    FlowState,
    VAFlowConfig,
    compound_dtheta,
    compound_v,
    continuous_update,
    estimate_acceleration,
    nstar_approach_a,
    nstar_approach_b,
    nstar_approach_c,
    predict_cf,
    vaflow_run,
    vaflow_step,
)
from .trace import TraceRecord

__version__ = "0.1.0"
