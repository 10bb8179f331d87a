from src.exceptions import NumericalException, ValidationException


class NumcoreException(NumericalException):
    """Base exception for numerical core errors"""
    def __init__(self, detail: str = "Numerical core failure"):
        super().__init__(detail=detail)


class DomainException(ValidationException):
    """Argument outside the domain of a special function"""
    def __init__(self, detail: str = "Argument outside function domain"):
        super().__init__(detail=detail)


class InvalidParameterException(ValidationException):
    """Invalid distribution parameters"""
    def __init__(self, detail: str = "Invalid distribution parameters"):
        super().__init__(detail=detail)


class NonConvergenceException(NumcoreException):
    """Iterative routine failed to converge"""
    def __init__(self, detail: str = "Iteration did not converge"):
        super().__init__(detail=detail)
