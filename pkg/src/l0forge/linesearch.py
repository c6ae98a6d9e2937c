import logging

import numpy as np

from l0forge.exceptions import InvalidInput, StepFailure
from l0forge.metric import apply_metric
from l0forge.models import MetricState, StepConfig, StepResult, SupportSet, Vector
from l0forge.objectives import QuadraticObjective, SmoothObjective
from l0forge.problem import project_support

logger = logging.getLogger(__name__)

# ||Ad||^2 below this multiple of ||d||^2 counts as Qd = 0
CURVATURE_FLOOR = 1e-14


def exact_quadratic_step(
    obj: QuadraticObjective, x: Vector, d: Vector, *, grad: Vector | None = None
) -> StepResult:
    """Minimizer of f(x + alpha d) over alpha >= 0 for f(x) = ||Ax - b||^2 / 2."""
    x = np.asarray(x, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(d))):
        raise InvalidInput("exact_quadratic_step got non-finite inputs")
    if grad is None:
        grad = obj.gradient(x)

    Ad = obj.A @ d
    curvature = float(Ad @ Ad)
    slope = float(grad @ d)
    if curvature <= CURVATURE_FLOOR * float(d @ d) or slope >= 0.0:
        return StepResult(alpha=0.0, trial_point=x.copy(), evaluations=0)

    alpha = -slope / curvature
    return StepResult(alpha=alpha, trial_point=x + alpha * d, evaluations=0)


def dong_step(
    obj: SmoothObjective,
    cfg: StepConfig,
    x: Vector,
    d: Vector,
    s: SupportSet,
    *,
    metric: MetricState | None = None,
    grad: Vector | None = None,
) -> StepResult:
    """
    Backtrack alpha = alpha0 * gamma^i, i = 0, 1, ..., from
        alpha0 = 2 ||P g||^2 / (L <P g, H P g>),    g = grad f(x),
    until the restricted directional derivative at the trial point keeps a delta share of its slope:
        <P grad f(x + alpha d), d> <= delta <P g, d>.
    For convex f that makes f(x + alpha d) <= f(x).
    """
    x = np.asarray(x, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if grad is None:
        grad = obj.gradient(x)

    pg = project_support(grad, s)
    slope = float(pg @ d)
    if slope == 0.0:
        return StepResult(alpha=0.0, trial_point=x.copy(), evaluations=0)

    hpg = apply_metric(metric, pg) if metric is not None else pg
    alpha = 2.0 * float(pg @ pg) / (obj.lipschitz * float(pg @ hpg))

    trial = x
    for i in range(cfg.max_backtracks):
        trial = x + alpha * d
        trial_slope = float(project_support(obj.gradient(trial), s) @ d)
        if trial_slope <= cfg.delta * slope:
            return StepResult(alpha=alpha, trial_point=trial, evaluations=i + 1)
        logger.debug("dong backtrack %d: alpha %.3e, slope %.3e vs %.3e", i, alpha, trial_slope, slope)
        alpha *= cfg.gamma_bt

    raise StepFailure(
        f"no step accepted after {cfg.max_backtracks} backtracks",
        StepResult(alpha=alpha / cfg.gamma_bt, trial_point=trial, evaluations=cfg.max_backtracks),
    )
