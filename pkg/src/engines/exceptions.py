from src.exceptions import NumericalException, ValidationException


class EngineException(NumericalException):
    """Base exception for posterior inference"""
    def __init__(self, detail: str = "Posterior inference failed"):
        super().__init__(detail=detail)


class SamplerFailureException(EngineException):
    """Acceptance rate left the admissible window after burn-in"""
    def __init__(self, model: str, parameter: str, rate: float, low: float, high: float):
        self.model = model
        self.parameter = parameter
        self.rate = rate
        super().__init__(
            detail=f"{model}: acceptance rate of {parameter} is {rate:.3f}, "
                   f"outside [{low:.2f}, {high:.2f}] after adaptation"
        )


class UnknownModelException(ValidationException):
    """Requested model kind is not supported"""
    def __init__(self, kind: str):
        super().__init__(detail=f"Unknown model '{kind}'")


class InvalidCutoffException(ValidationException):
    def __init__(self, c: float):
        super().__init__(detail=f"Cutoff must lie in [0, 1], got {c!r}")
