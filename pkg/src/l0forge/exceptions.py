from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from l0forge.models import StepResult


class TableDoesNotExist(Exception):
    pass


class L0ForgeException(Exception):
    def __init__(self, message: str):
        super().__init__(f"L0ForgeError: {message}")


class InvalidInput(L0ForgeException):
    pass


class DimensionMismatch(L0ForgeException):
    pass


class StepFailure(L0ForgeException):
    def __init__(self, message: str, last_trial: "StepResult"):
        super().__init__(message)
        self.last_trial = last_trial


class DivergenceError(L0ForgeException):
    pass


class OracleSizeExceeded(L0ForgeException):
    pass


class UnknownMethod(L0ForgeException):
    pass
