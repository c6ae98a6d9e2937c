from collections import deque

import numpy as np

from l0forge.models import RunRecord, SolveOptions, StopReason, Vector
from l0forge.problem import L0Problem, piht_step
from l0forge.solvers.base import Solver, Trace, check_stop


def window_max(history: deque[float]) -> float:
    """Delta_k = max of H(x_t) over t = max(1, k - q), ..., k; `history` holds exactly that window."""
    return max(history)


class Niapg(Solver):
    """
    One-prox accelerated method with a non-monotone safeguard:
        y_k = x_k + (k - 1)/k (x_k - x_{k-1}),  v_k = y_k if H(y_k) <= Delta_k else x_k,
        x_{k+1} = prox(v_k),
    stopping anchor a_k = v_k.
    """

    name = "niapg"

    def _solve(self, x0: Vector, trace: Trace) -> tuple[Vector, StopReason]:
        prob, opts = self.problem, self.options
        history: deque[float] = deque([prob.objective(x0)], maxlen=opts.niapg.window + 1)
        x_prev, x = x0, x0

        for k in range(1, opts.max_iters + 1):
            y = x + ((k - 1) / k) * (x - x_prev)
            v = y if prob.objective(y) <= window_max(history) else x

            x_next = piht_step(prob, v)
            self._check_finite(x_next)
            history.append(trace.record(x_next, v))
            if check_stop(x_next, v, x, opts.tol):
                return x_next, StopReason.CONVERGED
            x_prev, x = x, x_next

        return x, StopReason.MAX_ITERS


def solve_niapg(prob: L0Problem, x0: Vector, opts: SolveOptions) -> tuple[Vector, RunRecord]:
    return Niapg(prob, opts).solve(np.asarray(x0))
