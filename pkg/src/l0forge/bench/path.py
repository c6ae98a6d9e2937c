import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from l0forge.exceptions import InvalidInput
from l0forge.models import LambdaPath, Matrix, SolveOptions, Vector
from l0forge.objectives import QuadraticObjective
from l0forge.problem import L0Problem
from l0forge.solvers import get_solver_class

logger = logging.getLogger(__name__)

PATH_LENGTH = 200
PATH_RATIO = 1e-10
# relative errors within this factor of the best so far count as a tie for patience
PATIENCE_SLACK = 1e-2


@dataclass(frozen=True, eq=False)
class PathPoint:
    lam: float
    x: Vector
    rel_err: float | None
    nnz: int
    fit: float
    iterations: int = 0
    wall_time: float = 0.0
    stop_reason: str | None = None


def lambda_path(A: Matrix, b: Vector, count: int = PATH_LENGTH, ratio: float = PATH_RATIO) -> LambdaPath:
    """lambda_j = ||A^T b||_inf^2 exp(t_j), t_j evenly spaced from log 1 down to log `ratio`."""
    if count < 1 or not 0.0 < ratio < 1.0:
        raise InvalidInput(f"bad path settings: count={count}, ratio={ratio}")
    anchor = float(np.max(np.abs(np.asarray(A).T @ np.asarray(b)), initial=0.0)) ** 2
    if anchor == 0.0:
        raise InvalidInput("A^T b vanishes, the lambda path is empty")
    return LambdaPath(anchor=anchor, values=anchor * np.exp(np.linspace(0.0, math.log(ratio), count)))


def relative_error(x: Vector, x_true: Vector) -> float:
    return float(np.linalg.norm(x - x_true)) / float(np.linalg.norm(x_true))


def select_lambda(entries: Sequence[tuple[float, float]]) -> float:
    """λ with the smallest relative error among (λ, rel_err) pairs; ties go to the larger λ."""
    if not entries:
        raise InvalidInput("select_lambda needs at least one run")
    best_lam, best_err = None, math.inf
    for lam, err in sorted(entries, key=lambda e: -e[0]):
        if err < best_err:
            best_lam, best_err = lam, err
    return best_lam if best_lam is not None else max(lam for lam, _ in entries)


def select_lambda_by_sparsity(points: Sequence[PathPoint], target: int) -> float:
    """Ground-truth-free choice: among runs whose nnz is closest to `target`, the best data fit."""
    if not points:
        raise InvalidInput("select_lambda_by_sparsity needs at least one run")
    closest = min(abs(p.nnz - target) for p in points)
    return min((p for p in points if abs(p.nnz - target) == closest), key=lambda p: (p.fit, -p.lam)).lam


def sweep_path(
    objective: QuadraticObjective,
    method: str,
    path: LambdaPath,
    opts: SolveOptions,
    *,
    x_true: Vector | None = None,
    patience: int = 0,
) -> list[PathPoint]:
    """Solve along the path from large to small λ, each run warm-started at the previous solution.

    With `patience` > 0 and ground truth available, the sweep stops once that many λ values came out
    more than PATIENCE_SLACK worse than the best relative error so far. Values that tie the best,
    such as the plateau where every run returns the zero vector, never count.
    """
    solver_class = get_solver_class(method)
    x = objective.Atb.copy()
    points: list[PathPoint] = []
    best_err, stale = math.inf, 0
    for lam in path.values:
        x, record = solver_class(L0Problem(objective, float(lam), opts.mu), opts).solve(x)
        err = relative_error(x, x_true) if x_true is not None else None
        points.append(
            PathPoint(
                float(lam),
                x,
                err,
                int(np.count_nonzero(x)),
                objective.value(x),
                iterations=record.iterations,
                wall_time=record.wall_time,
                stop_reason=record.stop_reason.value,
            )
        )

        if err is None or patience <= 0:
            continue
        if err < best_err:
            best_err = err
        elif err > best_err * (1.0 + PATIENCE_SLACK):
            stale += 1
        if stale >= patience:
            logger.debug("%s: path sweep stopped after %d of %d values", method, len(points), len(path.values))
            break
    return points
