import math

import numpy as np

from l0forge.models import RunRecord, SolveOptions, StopReason, Vector
from l0forge.problem import L0Problem, piht_step
from l0forge.solvers.base import Solver, Trace, check_stop


def next_momentum(t: float) -> float:
    """t_{k+1} = (sqrt(1 + 4 t_k^2) + 1) / 2."""
    return (math.sqrt(1.0 + 4.0 * t * t) + 1.0) / 2.0


def update_average(q: float, c: float, objective: float, eta: float) -> tuple[float, float]:
    """q_{k+1} = eta q_k + 1,  c_{k+1} = (eta q_k c_k + H(x_{k+1})) / q_{k+1}."""
    q_next = eta * q + 1.0
    return q_next, (eta * q * c + objective) / q_next


class Mapg(Solver):
    """
    Monotone accelerated proximal gradient:
        y_k     = x_k + t_{k-1}/t_k (z_k - x_k) + (t_{k-1} - 1)/t_k (x_k - x_{k-1})
        z_{k+1} = prox(y_k),  v_{k+1} = prox(x_k)
        x_{k+1} = whichever of z_{k+1}, v_{k+1} has the smaller H.
    Both prox maps use the step 1 / (L + mu); the stopping anchor is a_k = x_k.
    """

    name = "mapg"

    def _accepts_extrapolation(self, h_z: float, z: Vector, y: Vector, c: float) -> bool:
        return False

    def _solve(self, x0: Vector, trace: Trace) -> tuple[Vector, StopReason]:
        prob, opts = self.problem, self.options
        eta = opts.nmapg.eta
        x_prev, x, z = x0, x0, x0
        t_prev, t = 0.0, 1.0
        q, c = 1.0, prob.objective(x0)

        for _ in range(opts.max_iters):
            y = x + (t_prev / t) * (z - x) + ((t_prev - 1.0) / t) * (x - x_prev)
            z = piht_step(prob, y)
            self._check_finite(z)
            h_z = prob.objective(z)

            if self._accepts_extrapolation(h_z, z, y, c):
                x_next, h_next = z, h_z
            else:
                v = piht_step(prob, x)
                h_v = prob.objective(v)
                x_next, h_next = (z, h_z) if h_z <= h_v else (v, h_v)

            trace.record(x_next, x, h_next)
            t_prev, t = t, next_momentum(t)
            q, c = update_average(q, c, h_next, eta)
            if check_stop(x_next, x, x, opts.tol):
                return x_next, StopReason.CONVERGED
            x_prev, x = x, x_next

        return x, StopReason.MAX_ITERS


class Nmapg(Mapg):
    """mAPG that skips the second prox when H(z_{k+1}) <= c_k - delta ||z_{k+1} - y_k||^2."""

    name = "nmapg"

    def _accepts_extrapolation(self, h_z: float, z: Vector, y: Vector, c: float) -> bool:
        gap = z - y
        return h_z <= c - self.options.nmapg.delta * float(gap @ gap)


def solve_nmapg(prob: L0Problem, x0: Vector, opts: SolveOptions) -> tuple[Vector, RunRecord]:
    return Nmapg(prob, opts).solve(np.asarray(x0))


def solve_mapg(prob: L0Problem, x0: Vector, opts: SolveOptions) -> tuple[Vector, RunRecord]:
    return Mapg(prob, opts).solve(np.asarray(x0))
