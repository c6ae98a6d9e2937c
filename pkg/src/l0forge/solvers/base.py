import logging
import math
import time

import numpy as np

from l0forge.exceptions import DimensionMismatch, DivergenceError, InvalidInput
from l0forge.models import RunRecord, SolveOptions, StopReason, Vector
from l0forge.problem import L0Problem, local_min_certificate

logger = logging.getLogger(__name__)

# converged runs are certified at this multiple of the stopping tolerance
CERTIFICATE_SLACK = 10.0


def check_stop(x_next: Vector, a: Vector, x: Vector, tol: float) -> bool:
    """||x_{k+1} - a_k|| / max(1, ||x_k||) < tol."""
    if x_next.shape != a.shape or a.shape != x.shape:
        raise DimensionMismatch(f"stopping rule got shapes {x_next.shape}, {a.shape}, {x.shape}")
    return float(np.linalg.norm(x_next - a)) / max(1.0, float(np.linalg.norm(x))) < tol


class Trace:
    def __init__(self, problem: L0Problem, level: int):
        self.problem = problem
        self.level = level
        self.objectives: list[float] = []
        self.iterates: list[Vector] = []
        self.anchors: list[Vector] = []

    def record(self, x: Vector, anchor: Vector, objective: float | None = None) -> float:
        if objective is None:
            objective = self.problem.objective(x)
        if not math.isfinite(objective):
            raise DivergenceError(f"objective became {objective} at iteration {len(self.objectives) + 1}")
        self.objectives.append(objective)
        if self.level >= 2:
            self.iterates.append(x.copy())
            self.anchors.append(anchor.copy())
        return objective


class Solver:
    name: str = ""

    def __init__(self, problem: L0Problem, options: SolveOptions):
        self.problem = problem
        self.options = options

    def solve(self, x0: Vector) -> tuple[Vector, RunRecord]:
        x0 = np.array(x0, dtype=np.float64)
        if x0.shape != (self.problem.dimension,):
            raise DimensionMismatch(f"x0 has shape {x0.shape}, problem has dimension {self.problem.dimension}")
        if not np.all(np.isfinite(x0)):
            raise InvalidInput("x0 must be finite")

        trace = Trace(self.problem, self.options.trace_level)
        start = time.perf_counter()
        x, stop_reason = self._solve(x0, trace)
        wall_time = time.perf_counter() - start

        certificate = local_min_certificate(self.problem, x, CERTIFICATE_SLACK * self.options.tol)
        logger.info(
            "%s stopped (%s) after %d iterations in %.3fs, nnz %d",
            self.name,
            stop_reason.value,
            len(trace.objectives),
            wall_time,
            np.count_nonzero(x),
        )
        return x, RunRecord(
            method=self.name,
            iterations=len(trace.objectives),
            wall_time=wall_time,
            objective_trajectory=trace.objectives,
            support=tuple(int(i) for i in np.flatnonzero(x)),
            certificate=certificate,
            stop_reason=stop_reason,
            iterates=trace.iterates,
            anchors=trace.anchors,
        )

    def _solve(self, x0: Vector, trace: Trace) -> tuple[Vector, StopReason]:
        raise NotImplementedError()

    def _check_finite(self, x: Vector) -> None:
        if not np.all(np.isfinite(x)):
            raise DivergenceError(f"{self.name} produced non-finite iterates")
