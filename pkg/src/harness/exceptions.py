from src.exceptions import AppException, ValidationException


class HarnessException(AppException):
    """Base exception for simulation and calibration"""
    def __init__(self, detail: str = "Simulation failed", exit_code: int | None = None):
        super().__init__(detail=detail, exit_code=exit_code)


class CalibrationException(ValidationException):
    """Calibration request is outside the supported domain"""
    def __init__(self, detail: str = "Invalid calibration request"):
        super().__init__(detail=detail)


class ScenarioMismatchException(ValidationException):
    """Scenario and plan disagree on the number of types"""
    def __init__(self, scenario: str, expected: int, got: int):
        super().__init__(detail=f"Scenario '{scenario}' has {got} rates but the plan has {expected} types")


class ReplicateFailedException(HarnessException):
    """A replicate's fit raised; carries the replicate index and the cause's exit code"""
    def __init__(self, model: str, replicate: int, cause: str, exit_code: int | None = None):
        self.model = model
        self.replicate = replicate
        super().__init__(detail=f"{model}: replicate {replicate} failed: {cause}", exit_code=exit_code)
