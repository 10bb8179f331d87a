from pydantic import ValidationError

from src.exceptions import AppException, ValidationException


class ConfigException(ValidationException):
    """Configuration file is missing, unreadable or fails schema validation"""
    def __init__(self, detail: str = "Invalid configuration"):
        super().__init__(detail=detail)

    @classmethod
    def from_validation_error(cls, source: str, error: ValidationError) -> "ConfigException":
        lines = []
        for item in error.errors():
            path = ".".join(str(part) for part in item["loc"]) or "<root>"
            lines.append(f"  {path}: {item['msg']}")
        return cls(f"{source}: {error.error_count()} validation error(s)\n" + "\n".join(lines))


class ModelFitException(AppException):
    """A model failed during analysis; keeps the cause's exit code"""
    def __init__(self, model: str, cause: AppException):
        self.model = model
        super().__init__(detail=f"{model}: {cause.detail}", exit_code=cause.exit_code)


class ManifestException(ValidationException):
    def __init__(self, detail: str = "Invalid run manifest"):
        super().__init__(detail=detail)
