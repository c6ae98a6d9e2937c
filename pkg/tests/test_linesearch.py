import numpy as np
import pytest

from l0forge.exceptions import StepFailure
from l0forge.linesearch import dong_step, exact_quadratic_step
from l0forge.models import StepConfig, SupportSet
from l0forge.objectives import QuadraticObjective


def test_exact_step_identity_hessian():
    objective = QuadraticObjective(np.eye(2), np.zeros(2))
    x = np.array([1.0, 0.0])
    step = exact_quadratic_step(objective, x, -objective.gradient(x))
    assert step.alpha == 1.0
    np.testing.assert_array_equal(step.trial_point, np.zeros(2))


def test_exact_step_minimizes_along_the_line():
    objective = QuadraticObjective(np.diag([2.0, 1.0]), np.array([2.0, 1.0]))
    x = np.zeros(2)
    d = -objective.gradient(x)
    np.testing.assert_array_equal(d, [4.0, 1.0])

    step = exact_quadratic_step(objective, x, d)
    assert step.alpha == pytest.approx(17 / 65)

    grid = np.linspace(0.0, 1.0, 10001)
    values = [objective.value(x + a * d) for a in grid]
    assert objective.value(step.trial_point) <= min(values) + 1e-12


def test_exact_step_degenerate_direction():
    objective = QuadraticObjective(np.array([[1.0, 0.0]]), np.array([1.0]))
    x = np.array([0.5, 0.5])
    step = exact_quadratic_step(objective, x, np.array([0.0, 1.0]))
    assert step.alpha == 0.0
    np.testing.assert_array_equal(step.trial_point, x)


def test_exact_step_refuses_ascent_direction():
    objective = QuadraticObjective(np.eye(2), np.zeros(2))
    x = np.array([1.0, 1.0])
    assert exact_quadratic_step(objective, x, objective.gradient(x)).alpha == 0.0


def test_dong_accepts_initial_step_on_well_scaled_direction():
    objective = QuadraticObjective(np.diag([1.0, 10.0]), np.zeros(2), lipschitz=100.0)
    x = np.array([1.0, 0.001])
    g = objective.gradient(x)
    step = dong_step(objective, StepConfig(), x, -g, SupportSet((), 2))
    assert step.evaluations == 1
    assert step.alpha == pytest.approx(2.0 / 100.0)
    assert objective.value(step.trial_point) < objective.value(x)


def test_dong_backtracks_on_one_dimensional_quadratic():
    objective = QuadraticObjective(np.array([[1.0]]), np.zeros(1), lipschitz=1.0)
    cfg = StepConfig(gamma_bt=0.5, delta=0.5)
    step = dong_step(objective, cfg, np.array([1.0]), np.array([-1.0]), SupportSet((), 1))
    # alpha = 2 and 1 leave no slope to keep, alpha = 0.5 keeps exactly half of it
    assert step.alpha == 0.5
    assert step.evaluations == 3
    np.testing.assert_array_equal(step.trial_point, [0.5])


def test_dong_zero_slope_gives_zero_step():
    objective = QuadraticObjective(np.eye(2), np.array([1.0, 1.0]))
    x = np.array([1.0, 1.0])
    step = dong_step(objective, StepConfig(), x, np.array([1.0, 0.0]), SupportSet((), 2))
    assert step.alpha == 0.0
    np.testing.assert_array_equal(step.trial_point, x)


def test_dong_restricted_slope_ignores_zero_set():
    objective = QuadraticObjective(np.eye(2), np.array([0.0, 5.0]))
    x = np.array([0.0, 0.0])
    # the gradient only lives on the zero set, so nothing moves
    step = dong_step(objective, StepConfig(), x, np.zeros(2), SupportSet((1,), 2))
    assert step.alpha == 0.0


def test_dong_failure_carries_last_trial():
    # an optimistic Lipschitz claim makes the first trial overshoot far
    objective = QuadraticObjective(np.array([[1.0]]), np.zeros(1), lipschitz=0.01)
    cfg = StepConfig(max_backtracks=1)
    with pytest.raises(StepFailure) as excinfo:
        dong_step(objective, cfg, np.array([1.0]), np.array([-1.0]), SupportSet((), 1))
    last = excinfo.value.last_trial
    assert last.alpha == pytest.approx(200.0)
    np.testing.assert_allclose(last.trial_point, [-199.0])
