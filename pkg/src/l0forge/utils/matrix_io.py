from pathlib import Path

import numpy as np

from l0forge.exceptions import InvalidInput
from l0forge.models import Matrix, Vector


def read_matrix_csv(path: Path) -> Matrix:
    """Row-major CSV without a header."""
    try:
        matrix = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except (OSError, ValueError) as e:
        raise InvalidInput(f"cannot read matrix from {path}: {e}")
    if matrix.size == 0:
        raise InvalidInput(f"matrix file {path} is empty")
    return matrix


def read_vector_csv(path: Path) -> Vector:
    """One value per line, or a single comma separated row."""
    try:
        vector = np.loadtxt(path, delimiter=",", ndmin=1, dtype=np.float64).ravel()
    except (OSError, ValueError) as e:
        raise InvalidInput(f"cannot read vector from {path}: {e}")
    if vector.size == 0:
        raise InvalidInput(f"vector file {path} is empty")
    return vector
