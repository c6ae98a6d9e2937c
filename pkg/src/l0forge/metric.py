"""
Limited-memory BFGS metric restricted to the current support.

The metric is never formed: apply_metric runs the two-loop recursion over the stored
(S, Y) pairs, oldest first in `pairs`. Pairs are built on one support at a time, so sandwiching
the recursion between support projections gives the inverse model of the restricted Hessian.
States are values; every update returns a new one.
"""

import dataclasses
import logging

import numpy as np

from l0forge.exceptions import DimensionMismatch
from l0forge.models import MetricState, SupportSet, Vector
from l0forge.problem import project_support

logger = logging.getLogger(__name__)

CURVATURE_FLOOR = 1e-12


def curvature_pair(S: Vector, grad_new: Vector, grad_old: Vector, damping: float) -> Vector:
    """Y = grad f(x + S) - grad f(x) + t S; equals (A^T A + t I) S for quadratic f."""
    return grad_new - grad_old + damping * S


def push_pair(state: MetricState, S: Vector, Y: Vector) -> MetricState:
    S = np.array(S, dtype=np.float64)
    Y = np.array(Y, dtype=np.float64)
    if S.shape != Y.shape or S.ndim != 1:
        raise DimensionMismatch(f"pair shapes differ: S {S.shape}, Y {Y.shape}")
    if state.pairs and state.pairs[-1][0].shape != S.shape:
        raise DimensionMismatch(f"pair of length {S.shape[0]} against memory of length {state.pairs[-1][0].shape[0]}")
    if state.frozen:
        return state

    sy = float(S @ Y)
    if not sy > CURVATURE_FLOOR * float(np.linalg.norm(S)) * float(np.linalg.norm(Y)):
        logger.debug("curvature pair rejected: <S, Y> = %.3e", sy)
        return state

    S.setflags(write=False)
    Y.setflags(write=False)
    pairs = (*state.pairs, (S, Y))[-state.capacity :]
    return dataclasses.replace(state, pairs=pairs)


def apply_metric(state: MetricState, g: Vector) -> Vector:
    q = np.array(g, dtype=np.float64)
    if not state.pairs:
        return q
    if state.pairs[-1][0].shape != q.shape:
        raise DimensionMismatch(f"vector of shape {q.shape} against metric pairs of shape {state.pairs[-1][0].shape}")

    rhos = [1.0 / float(S @ Y) for S, Y in state.pairs]
    alphas = []
    for (S, Y), rho in zip(reversed(state.pairs), reversed(rhos)):
        alpha = rho * float(S @ q)
        q -= alpha * Y
        alphas.append(alpha)

    S_last, Y_last = state.pairs[-1]
    r = (float(S_last @ Y_last) / float(Y_last @ Y_last)) * q
    for (S, Y), rho, alpha in zip(state.pairs, rhos, reversed(alphas)):
        beta = rho * float(Y @ r)
        r += (alpha - beta) * S
    return r


def clear_pairs(state: MetricState) -> MetricState:
    """Empty memory; a frozen state keeps its pairs."""
    if state.frozen or not state.pairs:
        return state
    logger.debug("dropping %d metric pairs", len(state.pairs))
    return dataclasses.replace(state, pairs=())


def restricted_direction(state: MetricState, grad: Vector, s: SupportSet) -> Vector:
    return -project_support(apply_metric(state, project_support(grad, s)), s)


def maybe_freeze(state: MetricState, k: int) -> MetricState:
    if state.frozen or state.freeze_after is None or k < state.freeze_after:
        return state
    logger.debug("metric frozen at iteration %d with %d pairs", k, len(state.pairs))
    return dataclasses.replace(state, frozen=True)
