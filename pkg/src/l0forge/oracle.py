"""
Brute-force ground truth for tiny quadratic instances.

Every nonzero pattern J is visited; f is minimized over vectors vanishing off J. A candidate is a
local minimizer of H when its restricted gradient vanishes and its nonzero pattern is exactly J.
"""

import logging
from dataclasses import dataclass

import numpy as np

from l0forge.exceptions import InvalidInput, OracleSizeExceeded
from l0forge.models import Vector
from l0forge.objectives import QuadraticObjective
from l0forge.problem import L0Problem

logger = logging.getLogger(__name__)

MAX_ORACLE_DIMENSION = 14
CONDITION_LIMIT = 1e12
GRADIENT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Candidate:
    support: tuple[int, ...]
    minimizer: Vector
    objective: float
    is_local: bool
    degenerate: bool
    is_global: bool = False


def _check_size(n: int, max_n: int) -> None:
    if max_n > MAX_ORACLE_DIMENSION:
        raise OracleSizeExceeded(f"oracle enumeration is capped at n = {MAX_ORACLE_DIMENSION}")
    if n > max_n:
        raise OracleSizeExceeded(f"n = {n} exceeds the oracle limit of {max_n}")


def _support_masks(n: int) -> np.ndarray:
    """All 2^n nonzero patterns, row j being the bits of j."""
    return ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(bool)


def restricted_least_squares(A: np.ndarray, b: Vector, support: tuple[int, ...]) -> tuple[Vector, bool]:
    """argmin ||A x - b|| over x vanishing off `support`; minimum-norm when the block is singular."""
    x = np.zeros(A.shape[1])
    if not support:
        return x, False
    columns = A[:, list(support)]
    gram = columns.T @ columns
    rhs = columns.T @ b
    degenerate = bool(np.linalg.cond(gram) > CONDITION_LIMIT)
    x[list(support)] = np.linalg.pinv(gram) @ rhs if degenerate else np.linalg.solve(gram, rhs)
    return x, degenerate


def enumerate_minimizers(prob: L0Problem, max_n: int = MAX_ORACLE_DIMENSION) -> list[Candidate]:
    smooth = prob.smooth
    if not isinstance(smooth, QuadraticObjective):
        raise InvalidInput("the oracle enumerates quadratic objectives only")
    n = smooth.dimension
    _check_size(n, max_n)

    scale = max(1.0, float(np.linalg.norm(smooth.Atb)))
    candidates = []
    for mask in _support_masks(n):
        support = tuple(int(i) for i in np.flatnonzero(mask))
        x, degenerate = restricted_least_squares(smooth.A, smooth.b, support)
        grad = smooth.gradient(x)
        stationary = float(np.max(np.abs(grad[mask]), initial=0.0)) <= GRADIENT_TOL * scale
        is_local = stationary and bool(np.all(x[mask] != 0.0))
        candidates.append(
            Candidate(
                support=support,
                minimizer=x,
                objective=prob.objective(x),
                is_local=is_local,
                degenerate=degenerate,
            )
        )

    local = [c for c in candidates if c.is_local]
    if local:
        best = min(local, key=lambda c: c.objective)
        candidates = [
            Candidate(c.support, c.minimizer, c.objective, c.is_local, c.degenerate, c is best) for c in candidates
        ]
    logger.debug("oracle: %d patterns, %d local minimizers", len(candidates), len(local))
    return candidates


def contains_local_minimizer(prob: L0Problem, candidates: list[Candidate], x: Vector, atol: float = 1e-6) -> bool:
    """Whether x is one of the enumerated local minimizers, within `atol` in Euclidean distance.

    Degenerate patterns have a whole affine set of minimizers; there x only needs the same pattern
    and a vanishing restricted gradient.
    """
    x = np.asarray(x, dtype=np.float64)
    support = tuple(int(i) for i in np.flatnonzero(x))
    for candidate in candidates:
        if not candidate.is_local and not candidate.degenerate:
            continue
        if candidate.degenerate and candidate.support == support:
            grad = prob.smooth.gradient(x)
            return float(np.max(np.abs(grad[list(support)]), initial=0.0)) <= atol
        if candidate.is_local and float(np.linalg.norm(candidate.minimizer - x)) <= atol:
            return True
    return False


def prox_objective(prob: L0Problem, y: Vector, x: Vector) -> float:
    """lambda ||x||_0 + L/2 ||x - y + grad f(y) / L||^2 + mu/2 ||x - y||^2, row-wise when x is 2-D."""
    L, mu = prob.lipschitz, prob.mu
    c = y - prob.smooth.gradient(y) / L
    return (
        prob.lam * np.count_nonzero(x, axis=-1)
        + 0.5 * L * np.sum((x - c) ** 2, axis=-1)
        + 0.5 * mu * np.sum((x - y) ** 2, axis=-1)
    )


def prox_bruteforce(prob: L0Problem, y: Vector, max_n: int = MAX_ORACLE_DIMENSION) -> Vector:
    """Exact minimizer of prox_objective over every nonzero pattern."""
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    _check_size(n, max_n)

    # on a fixed pattern the subproblem is separable with minimizer y - grad f(y) / (L + mu)
    u = y - prob.step * prob.smooth.gradient(y)
    trials = _support_masks(n) * u
    values = prox_objective(prob, y, trials)
    return trials[int(np.argmin(values))]
