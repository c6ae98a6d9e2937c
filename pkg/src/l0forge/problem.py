"""
Core of H(x) = f(x) + lambda * ||x||_0: the hard-thresholding prox, support bookkeeping
and the local-minimizer certificate.

Hard thresholding is set-valued when |c_i| == gamma; every function here picks 0 in that case.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from l0forge.exceptions import DimensionMismatch, InvalidInput
from l0forge.models import Certificate, SupportSet, Vector
from l0forge.objectives import SmoothObjective
from l0forge.objectives.quadratic import estimate_lipschitz

__all__ = [
    "L0Problem",
    "estimate_lipschitz",
    "hard_threshold",
    "local_min_certificate",
    "piht_step",
    "project_support",
    "support_of",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class L0Problem:
    smooth: SmoothObjective
    lam: float
    mu: float = 1e-6

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise InvalidInput(f"lambda must be positive, got {self.lam}")
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise InvalidInput(f"mu must be nonnegative, got {self.mu}")

    @property
    def dimension(self) -> int:
        return self.smooth.dimension

    @property
    def lipschitz(self) -> float:
        return self.smooth.lipschitz

    @property
    def step(self) -> float:
        return 1.0 / (self.lipschitz + self.mu)

    @property
    def threshold(self) -> float:
        return math.sqrt(2.0 * self.lam * self.step)

    def objective(self, x: Vector) -> float:
        return self.smooth.value(x) + self.lam * int(np.count_nonzero(x))


def hard_threshold(c: Vector, gamma: float) -> Vector:
    c = np.asarray(c, dtype=np.float64)
    if not (math.isfinite(gamma) and gamma > 0):
        raise InvalidInput(f"threshold must be positive and finite, got {gamma}")
    if not np.all(np.isfinite(c)):
        raise InvalidInput("hard_threshold got non-finite entries")
    return np.where(np.abs(c) > gamma, c, 0.0)


def piht_step(prob: L0Problem, y: Vector, grad: Vector | None = None) -> Vector:
    """argmin_x lambda ||x||_0 + L/2 ||x - y + grad f(y) / L||^2 + mu/2 ||x - y||^2."""
    y = np.asarray(y, dtype=np.float64)
    if grad is None:
        grad = prob.smooth.gradient(y)
    return hard_threshold(y - prob.step * grad, prob.threshold)


def support_of(x: Vector, tol: float = 0.0) -> SupportSet:
    if tol < 0:
        raise InvalidInput("support tolerance must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    zeros = np.flatnonzero(np.abs(x) <= tol)
    return SupportSet(zero_indices=tuple(int(i) for i in zeros), dimension=x.shape[0])


def project_support(x: Vector, s: SupportSet) -> Vector:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (s.dimension,):
        raise DimensionMismatch(f"vector of shape {x.shape} against support of dimension {s.dimension}")
    projected = x.copy()
    projected[s.mask] = 0.0
    return projected


def local_min_certificate(prob: L0Problem, x: Vector, tol: float, *, grad: Vector | None = None) -> Certificate:
    """
    Check the local-minimizer conditions at x:
        - (grad f(x))_i = 0 on the support of x,
        - x is a fixed point of H_gamma(x - grad f(x) / (L + mu)), ties admitting both branches.
    """
    x = np.asarray(x, dtype=np.float64)
    if grad is None:
        grad = prob.smooth.gradient(x)
    on_support = x != 0.0
    gamma = prob.threshold

    grad_residual = float(np.max(np.abs(grad[on_support]), initial=0.0))
    magnitude_gap = float(np.min(np.abs(x[on_support])) - gamma) if np.any(on_support) else None

    c = x - prob.step * grad
    abs_c = np.abs(c)
    keeps = (abs_c >= gamma - tol) & (np.abs(c - x) <= tol)
    drops = abs_c <= gamma + tol
    fixed_point = bool(np.all(np.where(on_support, keeps, drops)))

    passed = grad_residual <= tol and fixed_point
    logger.debug(
        "certificate: grad residual %.3e, magnitude gap %s, fixed point %s", grad_residual, magnitude_gap, fixed_point
    )
    return Certificate(
        grad_residual=grad_residual, magnitude_gap=magnitude_gap, fixed_point=fixed_point, passed=passed
    )
