import numpy as np

from l0forge.models import RunRecord, SolveOptions, StopReason, Vector
from l0forge.problem import L0Problem, piht_step
from l0forge.solvers.base import Solver, Trace, check_stop


class Piht(Solver):
    """x_{k+1} = H_gamma(x_k - grad f(x_k) / (L + mu)), stopping anchor a_k = x_k."""

    name = "piht"

    def _solve(self, x0: Vector, trace: Trace) -> tuple[Vector, StopReason]:
        x = x0
        for _ in range(self.options.max_iters):
            x_next = piht_step(self.problem, x)
            trace.record(x_next, x)
            if check_stop(x_next, x, x, self.options.tol):
                return x_next, StopReason.CONVERGED
            x = x_next
        return x, StopReason.MAX_ITERS


def solve_piht(prob: L0Problem, x0: Vector, opts: SolveOptions) -> tuple[Vector, RunRecord]:
    return Piht(prob, opts).solve(np.asarray(x0))
