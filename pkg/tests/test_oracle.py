import numpy as np
import pytest

from l0forge.exceptions import InvalidInput, OracleSizeExceeded
from l0forge.models import SolveOptions
from l0forge.objectives import LogisticObjective, QuadraticObjective
from l0forge.oracle import contains_local_minimizer, enumerate_minimizers, prox_bruteforce, prox_objective
from l0forge.problem import L0Problem, local_min_certificate, piht_step
from l0forge.solvers import SOLVERS, get_solver_class


@pytest.fixture
def identity_2d():
    return L0Problem(QuadraticObjective(np.eye(2), np.array([3.0, 0.1])), lam=1.0)


def test_enumerate_identity(identity_2d):
    candidates = enumerate_minimizers(identity_2d)
    assert len(candidates) == 4
    assert all(c.is_local for c in candidates)

    by_support = {c.support: c for c in candidates}
    assert by_support[()].objective == pytest.approx(0.5 * (9.0 + 0.01))
    assert by_support[(0,)].objective == pytest.approx(0.005 + 1.0)
    assert by_support[(1,)].objective == pytest.approx(4.5 + 1.0)
    assert by_support[(0, 1)].objective == pytest.approx(2.0)

    (best,) = [c for c in candidates if c.is_global]
    assert best.support == (0,)
    np.testing.assert_allclose(best.minimizer, [3.0, 0.0])


def test_enumerate_zero_data():
    prob = L0Problem(QuadraticObjective(np.eye(3), np.zeros(3)), lam=1.0)
    local = [c for c in enumerate_minimizers(prob) if c.is_local]
    assert len(local) == 1
    assert local[0].support == ()
    assert local[0].objective == 0.0
    assert local[0].is_global


def test_enumerate_flags_degenerate_blocks():
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    prob = L0Problem(QuadraticObjective(A, np.array([1.0, 1.0])), lam=0.1)
    by_support = {c.support: c for c in enumerate_minimizers(prob)}
    full = by_support[(0, 1)]
    assert full.degenerate
    # minimum-norm solution of the singular block
    np.testing.assert_allclose(full.minimizer, [0.5, 0.5])
    assert not by_support[(0,)].degenerate


def test_size_limits():
    A = np.random.default_rng(0).standard_normal((5, 15))
    prob = L0Problem(QuadraticObjective(A, np.ones(5)), lam=0.1)
    with pytest.raises(OracleSizeExceeded):
        enumerate_minimizers(prob)
    with pytest.raises(OracleSizeExceeded):
        prox_bruteforce(prob, np.zeros(15))

    small = L0Problem(QuadraticObjective(A[:, :13], np.ones(5)), lam=0.1)
    with pytest.raises(OracleSizeExceeded):
        enumerate_minimizers(small, max_n=12)


def test_enumerate_needs_quadratic():
    prob = L0Problem(LogisticObjective(np.eye(2), np.ones(2)), lam=0.1)
    with pytest.raises(InvalidInput):
        enumerate_minimizers(prob)


def test_prox_bruteforce_trivial_cases():
    prob = L0Problem(QuadraticObjective(np.eye(3), np.zeros(3)), lam=1.0)
    np.testing.assert_array_equal(prox_bruteforce(prob, np.zeros(3)), np.zeros(3))

    A = np.array([[1.0, 0.3], [0.0, 1.0]])
    tiny = L0Problem(QuadraticObjective(A, np.array([1.0, -2.0])), lam=1e-14)
    y = np.array([0.4, 0.1])
    np.testing.assert_allclose(prox_bruteforce(tiny, y), y - tiny.step * tiny.smooth.gradient(y))


def test_prox_bruteforce_matches_piht_step():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        A = rng.standard_normal((5, 8))
        prob = L0Problem(QuadraticObjective(A, rng.standard_normal(5)), lam=float(rng.uniform(1e-3, 1.0)))
        y = rng.standard_normal(8)
        x = piht_step(prob, y)
        assert abs(prox_objective(prob, y, x) - prox_objective(prob, y, prox_bruteforce(prob, y))) <= 1e-10


def test_contains_local_minimizer(identity_2d):
    candidates = enumerate_minimizers(identity_2d)
    assert contains_local_minimizer(identity_2d, candidates, np.array([3.0, 0.0]))
    assert contains_local_minimizer(identity_2d, candidates, np.array([3.0 + 1e-8, 0.0]))
    assert not contains_local_minimizer(identity_2d, candidates, np.array([2.0, 0.0]))



def test_certificate_agrees_with_enumeration():
    rng = np.random.default_rng(12)
    prob = L0Problem(QuadraticObjective(rng.standard_normal((12, 8)), rng.standard_normal(12)), lam=0.05)
    candidates = enumerate_minimizers(prob)
    for candidate in candidates:
        certificate = local_min_certificate(prob, candidate.minimizer, 1e-8)
        assert certificate.grad_residual <= 1e-8
        if certificate.passed:
            assert candidate.is_local

    (best,) = [c for c in candidates if c.is_global]
    assert best.support
    assert local_min_certificate(prob, best.minimizer, 1e-8).passed

    nudged = best.minimizer.copy()
    nudged[best.support[0]] += 1e-3
    assert not local_min_certificate(prob, nudged, 1e-8).passed


def assert_outputs_are_enumerated_local_minimizers(make_cs_problem, method, seeds, max_iters):
    opts = SolveOptions(tol=1e-12, max_iters=max_iters)
    for seed in seeds:
        prob, _ = make_cs_problem(n=10, m=6, sparsity=2, seed=seed, ratio=0.05, noise_variance=0.02)
        candidates = enumerate_minimizers(prob)
        x, _ = get_solver_class(method)(prob, opts).solve(prob.smooth.Atb)
        assert contains_local_minimizer(prob, candidates, x, atol=1e-6), seed


@pytest.mark.parametrize("method", sorted(SOLVERS))
def test_solver_outputs_are_enumerated_local_minimizers(make_cs_problem, method):
    assert_outputs_are_enumerated_local_minimizers(make_cs_problem, method, range(3), 100_000)


@pytest.mark.slow
@pytest.mark.parametrize("method", sorted(SOLVERS))
def test_solver_outputs_are_enumerated_local_minimizers_on_many_seeds(make_cs_problem, method):
    assert_outputs_are_enumerated_local_minimizers(make_cs_problem, method, range(100), 1_000_000)
