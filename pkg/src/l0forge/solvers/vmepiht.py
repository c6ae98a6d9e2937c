"""
Variable metric extrapolation PIHT.

Each pass alternates
    x_k     = H_gamma(y_k - grad f(y_k) / (L + mu))                (fixes the support of x_k)
    y_{k+1} = x_k + alpha_k d_k,   d_k = -P_k H_k P_k grad f(x_k)  (stays on that support)
so ||y_{k+1}||_0 <= ||x_k||_0 and f(y_{k+1}) <= f(x_k).

H_k only learns from pairs restricted to the support of x_k and starts over whenever that support
changes, so on a settled support it models the inverse of the restricted Hessian.
"""

import logging

import numpy as np

from l0forge.linesearch import dong_step, exact_quadratic_step
from l0forge.metric import clear_pairs, curvature_pair, maybe_freeze, push_pair, restricted_direction
from l0forge.models import MetricMode, MetricState, RunRecord, SolveOptions, StopReason, SupportSet, Vector
from l0forge.objectives import QuadraticObjective
from l0forge.problem import L0Problem, local_min_certificate, piht_step, project_support, support_of
from l0forge.solvers.base import Solver, Trace, check_stop

logger = logging.getLogger(__name__)

GENERAL_FREEZE_AFTER = 50


class Vmepiht(Solver):
    name = "vmepiht"

    @property
    def mode(self) -> MetricMode:
        mode = self.options.vmepiht.mode
        if mode == MetricMode.AUTO:
            return MetricMode.QUADRATIC if isinstance(self.problem.smooth, QuadraticObjective) else MetricMode.GENERAL
        return mode

    def initial_metric(self) -> MetricState:
        opts = self.options.vmepiht
        freeze_after = opts.freeze_after
        if freeze_after is None:
            freeze_after = GENERAL_FREEZE_AFTER if self.mode == MetricMode.GENERAL else None
        elif freeze_after < 0:
            freeze_after = None
        return MetricState(capacity=opts.memory, damping=opts.damping, freeze_after=freeze_after)

    def _push(
        self,
        metric: MetricState,
        mode: MetricMode,
        support: SupportSet,
        S: Vector,
        grad_new: Vector,
        grad_old: Vector,
    ) -> MetricState:
        if not self.options.vmepiht.use_metric:
            return metric
        S_restricted = project_support(S, support)
        if mode == MetricMode.QUADRATIC:
            Y = self.problem.smooth.hessian_apply(S_restricted) + metric.damping * S_restricted  # type: ignore
        elif np.array_equal(S, S_restricted):
            Y = curvature_pair(S, grad_new, grad_old, metric.damping)
        else:
            # the gradient difference belongs to a step that left the support
            return metric
        return push_pair(metric, S_restricted, project_support(Y, support))

    def _solve(self, x0: Vector, trace: Trace) -> tuple[Vector, StopReason]:
        prob, opts = self.problem, self.options
        smooth = prob.smooth
        mode = self.mode
        if mode == MetricMode.QUADRATIC and not isinstance(smooth, QuadraticObjective):
            mode = MetricMode.GENERAL
            logger.warning("quadratic step requested for a non-quadratic objective, using Dong's rule")

        metric = self.initial_metric()
        y, grad_y = x0, smooth.gradient(x0)
        x = piht_step(prob, y, grad_y)
        self._check_finite(x)
        trace.record(x, y)
        if check_stop(x, y, y, opts.tol):
            return x, StopReason.CONVERGED

        support = None
        for k in range(opts.max_iters):
            grad_x = smooth.gradient(x)
            # a certified point has zero restricted gradient, so the step below would be alpha = 0
            if local_min_certificate(prob, x, opts.tol, grad=grad_x).passed:
                return x, StopReason.CONVERGED
            if k + 1 >= opts.max_iters:
                break

            if support_of(x) != support:
                support = support_of(x)
                metric = clear_pairs(metric)
            metric = maybe_freeze(metric, k)
            metric = self._push(metric, mode, support, x - y, grad_x, grad_y)

            d = restricted_direction(metric, grad_x, support)
            if mode == MetricMode.QUADRATIC:
                step = exact_quadratic_step(smooth, x, d, grad=grad_x)  # type: ignore
            else:
                step = dong_step(smooth, opts.vmepiht.step, x, d, support, metric=metric, grad=grad_x)

            y_next = step.trial_point
            grad_y_next = smooth.gradient(y_next) if step.alpha > 0 else grad_x
            metric = self._push(metric, mode, support, y_next - x, grad_y_next, grad_x)

            x_next = piht_step(prob, y_next, grad_y_next)
            self._check_finite(x_next)
            trace.record(x_next, y_next)
            if check_stop(x_next, y_next, x, opts.tol):
                return x_next, StopReason.CONVERGED

            x, y, grad_y = x_next, y_next, grad_y_next

        return x, StopReason.MAX_ITERS


def solve_vmepiht(prob: L0Problem, x0: Vector, opts: SolveOptions) -> tuple[Vector, RunRecord]:
    return Vmepiht(prob, opts).solve(np.asarray(x0))
