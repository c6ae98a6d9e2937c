import numpy as np
import pytest

from l0forge.bench import generate_instance, lambda_path
from l0forge.models import CsInstanceSpec, db
from l0forge.objectives import QuadraticObjective
from l0forge.problem import L0Problem


@pytest.fixture
def user_dirs(tmp_path, monkeypatch):
    """Point appdirs at a scratch home so config and history never touch the real one."""
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "config"))
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path / "cache"))
    monkeypatch.delenv("L0FORGE_THREADS", raising=False)
    db.init(None)
    yield tmp_path
    if not db.deferred:
        db.close()
    db.init(None)


@pytest.fixture
def separable_problem():
    """f(x) = ||x - b||^2 / 2 with b = (3, 0.1, -2), lambda = 1; its fixed point is (3, 0, -2)."""
    objective = QuadraticObjective(np.eye(3), np.array([3.0, 0.1, -2.0]), lipschitz=1.0)
    return L0Problem(objective, lam=1.0, mu=1e-6)


@pytest.fixture
def make_cs_problem():
    def make(n=64, m=32, sparsity=2, seed=0, ratio=1e-2, noise_variance=1e-4):
        instance = generate_instance(
            CsInstanceSpec(n=n, m=m, sparsity=sparsity, noise_variance=noise_variance, seed=seed)
        )
        objective = QuadraticObjective(instance.A, instance.b, seed=seed)
        lam = ratio * lambda_path(instance.A, instance.b, count=1).anchor
        return L0Problem(objective, lam), instance

    return make
