import numpy as np

from l0forge.exceptions import DimensionMismatch, InvalidInput
from l0forge.models import Matrix, Vector
from l0forge.objectives.base import SmoothObjective

LIPSCHITZ_MARGIN = 1.01
LIPSCHITZ_FLOOR = 1e-12
POWER_ITERATIONS = 100
POWER_RTOL = 1e-10
# with at most this many rows or columns ||A||_2 is computed exactly
EXACT_LIPSCHITZ_LIMIT = 5000


def estimate_lipschitz(
    A: Matrix,
    iters: int = POWER_ITERATIONS,
    seed: int = 0,
    *,
    exact_limit: int = EXACT_LIPSCHITZ_LIMIT,
) -> float:
    """Largest eigenvalue of A^T A scaled by LIPSCHITZ_MARGIN.

    Matrices with a side of at most `exact_limit` get ||A||_2^2 from an SVD. Larger ones fall back
    to power iteration, which only approaches the eigenvalue from below, run until the Rayleigh
    quotient settles to POWER_RTOL or `iters` runs out.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.size == 0:
        raise InvalidInput("estimate_lipschitz needs a nonempty matrix")
    if min(A.shape) <= exact_limit:
        return max(LIPSCHITZ_MARGIN * float(np.linalg.norm(A, 2)) ** 2, LIPSCHITZ_FLOOR)

    v = np.random.default_rng(seed).standard_normal(A.shape[1])
    estimate = 0.0
    for _ in range(iters):
        norm = np.linalg.norm(v)
        if norm == 0.0:
            break
        v = v / norm
        Av = A @ v
        # Rayleigh quotient of A^T A at the unit vector v
        previous, estimate = estimate, float(Av @ Av)
        if abs(estimate - previous) <= POWER_RTOL * estimate:
            break
        v = A.T @ Av

    return max(LIPSCHITZ_MARGIN * estimate, LIPSCHITZ_FLOOR)


class QuadraticObjective(SmoothObjective):
    """f(x) = ||Ax - b||^2 / 2, with A^T b and the Lipschitz constant cached at construction."""

    def __init__(self, A: Matrix, b: Vector, *, lipschitz: float | None = None, seed: int = 0):
        A = np.asarray(A, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"A is {A.shape} but b has shape {b.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InvalidInput("A and b must be finite")

        self.A = self._freeze(A)
        self.b = self._freeze(b)
        self.Atb = self._freeze(A.T @ b)
        if lipschitz is None:
            lipschitz = estimate_lipschitz(A, seed=seed) if A.size > 0 else LIPSCHITZ_FLOOR
        elif lipschitz < 0:
            raise InvalidInput("lipschitz constant must be nonnegative")
        self._lipschitz = max(float(lipschitz), LIPSCHITZ_FLOOR)

    @property
    def dimension(self) -> int:
        return self.A.shape[1]

    @property
    def lipschitz(self) -> float:
        return self._lipschitz

    def residual(self, x: Vector) -> Vector:
        return self.A @ x - self.b

    def value(self, x: Vector) -> float:
        r = self.residual(x)
        return 0.5 * float(r @ r)

    def gradient(self, x: Vector) -> Vector:
        return self.A.T @ (self.A @ x) - self.Atb

    def hessian_apply(self, v: Vector) -> Vector:
        return self.A.T @ (self.A @ v)

    def qnorm(self, v: Vector) -> float:
        """||v||_{A^T A}."""
        return float(np.linalg.norm(self.A @ v))
