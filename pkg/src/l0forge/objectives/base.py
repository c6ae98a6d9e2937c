import numpy as np

from l0forge.models import Vector


class SmoothObjective:
    """Smooth convex part f of H(x) = f(x) + lambda * ||x||_0, with an L-Lipschitz gradient."""

    @property
    def dimension(self) -> int:
        raise NotImplementedError()

    @property
    def lipschitz(self) -> float:
        raise NotImplementedError()

    def value(self, x: Vector) -> float:
        raise NotImplementedError()

    def gradient(self, x: Vector) -> Vector:
        raise NotImplementedError()

    @staticmethod
    def _freeze(array: np.ndarray) -> np.ndarray:
        array = np.array(array, dtype=np.float64)
        array.setflags(write=False)
        return array
