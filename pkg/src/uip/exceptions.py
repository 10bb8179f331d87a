from src.exceptions import NumericalException


class UipException(NumericalException):
    """Base exception for unit-information prior construction"""
    def __init__(self, detail: str = "Unit-information prior construction failed"):
        super().__init__(detail=detail)


class MomentInfeasibleException(UipException):
    """Requested variance is too large for any beta distribution with the requested mean"""
    def __init__(self, mu: float, eta2: float):
        self.mu = mu
        self.eta2 = eta2
        super().__init__(
            detail=f"no beta distribution has mean {mu!r} and variance {eta2!r} "
                   f"(requires variance < {mu * (1.0 - mu)!r})"
        )


class DegenerateWeightsException(UipException):
    """Every weight feeding a type's prior is zero"""
    def __init__(self, detail: str = "All borrowing weights for this type are zero"):
        super().__init__(detail=detail)
