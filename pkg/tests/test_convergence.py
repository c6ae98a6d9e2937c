import statistics
from itertools import takewhile

import numpy as np
import pytest

from l0forge.models import SolveOptions, VmepihtOptions
from l0forge.objectives import QuadraticObjective
from l0forge.problem import L0Problem
from l0forge.solvers import solve_piht, solve_vmepiht


def settled_tail(iterates):
    """Iterates from the last support change on."""
    supports = [tuple(np.flatnonzero(x)) for x in iterates]
    start = max((k for k in range(1, len(supports)) if supports[k] != supports[k - 1]), default=0)
    return iterates[start:]


def qnorm_errors(prob, iterates, x_star):
    return [prob.smooth.qnorm(x - x_star) for x in iterates]


def above_floor(errors, x_star):
    floor = 1e-9 * max(1.0, float(np.linalg.norm(x_star)))
    return list(takewhile(lambda e: e > floor, errors))


def overdetermined_problem(seed, n=50, m=200, sparsity=10, lam=0.05):
    """Tall Gaussian A with unit columns, so every restricted Hessian is positive definite."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, axis=0)
    x_true = np.zeros(n)
    x_true[rng.choice(n, size=sparsity, replace=False)] = rng.choice([-1.0, 1.0], sparsity) * (
        1.0 + rng.uniform(size=sparsity)
    )
    b = A @ x_true + 0.01 * rng.standard_normal(m)
    return L0Problem(QuadraticObjective(A, b, seed=seed), lam)


@pytest.mark.parametrize("use_metric", [True, False])
def test_qnorm_error_decreases_once_support_settles(make_cs_problem, use_metric):
    opts = SolveOptions(tol=1e-12, trace_level=2, vmepiht=VmepihtOptions(use_metric=use_metric))
    for seed in range(20):
        prob, _ = make_cs_problem(n=128, m=64, sparsity=3, seed=seed)
        x_star, record = solve_vmepiht(prob, prob.smooth.Atb, opts)

        errors = qnorm_errors(prob, settled_tail(record.iterates), x_star)
        slack = 1e-9 * max(1.0, errors[0])
        assert all(b <= a + slack for a, b in zip(errors, errors[1:])), seed


def test_identity_metric_converges_linearly(make_cs_problem):
    opts = SolveOptions(tol=1e-12, trace_level=2, vmepiht=VmepihtOptions(use_metric=False))
    for seed in range(5):
        prob, _ = make_cs_problem(n=128, m=64, sparsity=3, seed=seed)
        x_star, record = solve_vmepiht(prob, prob.smooth.Atb, opts)

        errors = above_floor(qnorm_errors(prob, settled_tail(record.iterates), x_star), x_star)
        ratios = [b / a for a, b in zip(errors, errors[1:])]
        assert ratios, seed
        assert max(ratios) <= 1.0 + 1e-3, seed
        # a fixed contraction factor rather than stalling
        assert statistics.geometric_mean(ratios) <= 0.999, seed


def test_full_memory_metric_is_superlinear():
    opts = SolveOptions(tol=1e-12, max_iters=500, trace_level=2, vmepiht=VmepihtOptions(memory=50))
    superlinear = 0
    for seed in range(20):
        prob = overdetermined_problem(seed)
        x_star, record = solve_vmepiht(prob, np.zeros(50), opts)

        errors = above_floor([float(np.linalg.norm(x - x_star)) for x in settled_tail(record.iterates)], x_star)
        last = [b / a for a, b in zip(errors, errors[1:])][-3:]
        if len(last) == 3 and last[0] > last[1] > last[2] and last[2] < 0.1:
            superlinear += 1
    assert superlinear >= 18


def test_metric_cuts_iterations(make_cs_problem):
    vmepiht_iters, piht_iters = [], []
    for seed in range(3):
        prob, _ = make_cs_problem(n=256, m=64, sparsity=2, seed=seed)
        opts = SolveOptions(tol=1e-10)
        vmepiht_iters.append(solve_vmepiht(prob, prob.smooth.Atb, opts)[1].iterations)
        piht_iters.append(solve_piht(prob, prob.smooth.Atb, opts)[1].iterations)
    assert statistics.median(vmepiht_iters) < statistics.median(piht_iters)
