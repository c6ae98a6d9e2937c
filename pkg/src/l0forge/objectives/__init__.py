__all__ = [
    "LogisticObjective",
    "QuadraticObjective",
    "SmoothObjective",
]


from l0forge.objectives.base import SmoothObjective
from l0forge.objectives.logistic import LogisticObjective
from l0forge.objectives.quadratic import QuadraticObjective
