import numpy as np

from l0forge.exceptions import DimensionMismatch, InvalidInput
from l0forge.models import Matrix, Vector
from l0forge.objectives.base import SmoothObjective
from l0forge.objectives.quadratic import LIPSCHITZ_FLOOR


class LogisticObjective(SmoothObjective):
    """f(x) = sum_i log(1 + exp(-y_i <a_i, x>)) for labels y_i in {-1, +1}.

    The Hessian is A^T D A with D <= I/4, so ||A||_2^2 / 4 bounds its largest eigenvalue.
    """

    def __init__(self, A: Matrix, labels: Vector):
        A = np.asarray(A, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.float64)
        if A.ndim != 2 or labels.ndim != 1 or A.shape[0] != labels.shape[0]:
            raise DimensionMismatch(f"A is {A.shape} but labels have shape {labels.shape}")
        if not np.all(np.isin(labels, (-1.0, 1.0))):
            raise InvalidInput("labels must be -1 or +1")

        self.A = self._freeze(A)
        self.labels = self._freeze(labels)
        self._lipschitz = max(float(np.linalg.norm(A, 2)) ** 2 / 4.0, LIPSCHITZ_FLOOR)

    @property
    def dimension(self) -> int:
        return self.A.shape[1]

    @property
    def lipschitz(self) -> float:
        return self._lipschitz

    def _margins(self, x: Vector) -> Vector:
        return self.labels * (self.A @ x)

    def value(self, x: Vector) -> float:
        return float(np.sum(np.logaddexp(0.0, -self._margins(x))))

    def gradient(self, x: Vector) -> Vector:
        # d/dz log(1 + exp(-z)) = -1 / (1 + exp(z)), written via exp(-logaddexp) for overflow safety
        weights = -np.exp(-np.logaddexp(0.0, self._margins(x)))
        return self.A.T @ (self.labels * weights)
