import math

import numpy as np

from l0forge.models import CsInstance, CsInstanceSpec, Ensemble, NoiseMode


def generate_instance(spec: CsInstanceSpec) -> CsInstance:
    """
    b = A x* + noise, with A Gaussian or +-1 Bernoulli and unit-norm columns, x* s-sparse with
    entries sign(z) (min_magnitude + |z|), z standard normal, at uniformly random positions.
    Everything is drawn from `spec.seed`.
    """
    rng = np.random.default_rng(spec.seed)
    m, n, s = spec.rows, spec.n, spec.nonzeros

    if spec.ensemble == Ensemble.BERNOULLI:
        A = rng.choice(np.array([-1.0, 1.0]), size=(m, n))
    else:
        A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, axis=0)

    x_true = np.zeros(n)
    z = rng.standard_normal(s)
    x_true[rng.choice(n, size=s, replace=False)] = np.sign(z) * (spec.min_magnitude + np.abs(z))

    b = A @ x_true
    if spec.noise_variance > 0:
        std = spec.noise_variance if spec.noise_mode == NoiseMode.STD else math.sqrt(spec.noise_variance)
        b = b + std * rng.standard_normal(m)

    return CsInstance(spec=spec, A=A, b=b, x_true=x_true)
