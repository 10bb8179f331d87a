from src.exceptions import NumericalException, ValidationException


class DivergenceException(NumericalException):
    """Base exception for divergence computations"""
    def __init__(self, detail: str = "Divergence computation failed"):
        super().__init__(detail=detail)


class QuadratureException(DivergenceException):
    """Numerical integration did not reach the requested accuracy"""
    def __init__(self, detail: str = "Quadrature did not converge"):
        super().__init__(detail=detail)


class InvalidWeightsException(ValidationException):
    """Weights violate symmetry, range or normalisation"""
    def __init__(self, detail: str = "Invalid borrowing weights"):
        super().__init__(detail=detail)
