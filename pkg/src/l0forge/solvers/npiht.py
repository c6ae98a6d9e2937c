import numpy as np

from l0forge.models import RunRecord, SolveOptions, StopReason, Vector
from l0forge.problem import L0Problem, piht_step
from l0forge.solvers.base import Solver, Trace, check_stop


def extrapolate(x: Vector, x_prev: Vector, omega: float) -> Vector:
    """y = x + |sign(x)| * omega * (x - x_prev); zero coordinates of x receive no momentum."""
    return x + np.abs(np.sign(x)) * omega * (x - x_prev)


class Npiht(Solver):
    """Extrapolated PIHT with a gradient-based momentum reset; stopping anchor a_k = y_{k+1}."""

    name = "npiht"

    def _solve(self, x0: Vector, trace: Trace) -> tuple[Vector, StopReason]:
        smooth = self.problem.smooth
        omega = self.options.npiht.omega
        x_prev, x = x0, x0
        for _ in range(self.options.max_iters):
            y = extrapolate(x, x_prev, omega)
            grad_y = smooth.gradient(y)
            if float((y - x) @ grad_y) > 0.0:
                y, grad_y = x, smooth.gradient(x)

            x_next = piht_step(self.problem, y, grad_y)
            self._check_finite(x_next)
            trace.record(x_next, y)
            if check_stop(x_next, y, x, self.options.tol):
                return x_next, StopReason.CONVERGED
            x_prev, x = x, x_next
        return x, StopReason.MAX_ITERS


def solve_npiht(prob: L0Problem, x0: Vector, opts: SolveOptions) -> tuple[Vector, RunRecord]:
    return Npiht(prob, opts).solve(np.asarray(x0))
