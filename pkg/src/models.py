from typing import Any, Dict

import numpy as np
from pydantic import BaseModel, ConfigDict


def _to_builtin(value: Any) -> Any:
    """Convert numpy scalars/arrays (possibly nested) into plain Python types."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {k: _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    return value


class CustomModel(BaseModel):
    """Custom base model with global configurations"""
    model_config = ConfigDict(
        populate_by_name=True,
        from_attributes=True,
        arbitrary_types_allowed=True,
    )

    def serializable_dict(self, **kwargs) -> Dict[str, Any]:
        """Return a dict which contains only JSON-serializable values."""
        return _to_builtin(self.model_dump(**kwargs))


class StrictModel(CustomModel):
    """Base for user-supplied configuration: unknown keys are rejected."""
    model_config = ConfigDict(
        populate_by_name=True,
        from_attributes=True,
        extra="forbid",
    )
