EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_PARTIAL_FAILURE = 4


class AppException(Exception):
    """Base exception for application errors"""
    exit_code: int = 1

    def __init__(self, detail: str = "Application error", exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self) -> str:
        return self.detail


class ValidationException(AppException, ValueError):
    exit_code = EXIT_VALIDATION

    def __init__(self, detail: str = "Invalid input"):
        super().__init__(detail=detail)


class NumericalException(AppException, ArithmeticError):
    exit_code = EXIT_NUMERICAL

    def __init__(self, detail: str = "Numerical failure"):
        super().__init__(detail=detail)


class PartialFailureException(AppException):
    exit_code = EXIT_PARTIAL_FAILURE

    def __init__(self, detail: str = "Some work items failed"):
        super().__init__(detail=detail)
