from typing import List

import numpy as np
from pydantic import Field, field_validator

from src.models import CustomModel

SYMMETRY_TOLERANCE = 1e-12
SUM_TOLERANCE = 1e-12


def _square(v: List[List[float]], what: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
        raise ValueError(f"{what} must be a square matrix of size >= 2")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} must be finite")
    return arr


class DivergenceMatrix(CustomModel):
    """Symmetric pairwise divergences with a zero diagonal."""
    d: List[List[float]] = Field(..., description="I x I divergence matrix")

    @field_validator("d")
    @classmethod
    def validate_d(cls, v):
        arr = _square(v, "divergence matrix")
        if np.any(arr < 0):
            raise ValueError("divergences must be non-negative")
        if np.any(np.diag(arr) != 0):
            raise ValueError("divergence matrix diagonal must be zero")
        if np.max(np.abs(arr - arr.T)) > SYMMETRY_TOLERANCE:
            raise ValueError("divergence matrix must be symmetric")
        return v

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.d, dtype=float)

    @property
    def size(self) -> int:
        return len(self.d)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "DivergenceMatrix":
        return cls(d=np.asarray(arr, dtype=float).tolist())


class WeightVector(CustomModel):
    """
    Borrowing weights w_ij over ordered pairs i != j.

    Stored as an I x I matrix with zero diagonal; w_ij = w_ji, every entry in
    [0, 0.5] and the off-diagonal entries sum to one.
    """
    w: List[List[float]] = Field(..., description="I x I weight matrix, zero diagonal")

    @field_validator("w")
    @classmethod
    def validate_w(cls, v):
        arr = _square(v, "weight matrix")
        if np.any(np.diag(arr) != 0):
            raise ValueError("weight matrix diagonal must be zero")
        if np.any(arr < 0) or np.any(arr > 0.5 + SUM_TOLERANCE):
            raise ValueError("weights must lie in [0, 0.5]")
        if np.max(np.abs(arr - arr.T)) > SYMMETRY_TOLERANCE:
            raise ValueError("weights must be symmetric (w_ij = w_ji)")
        if abs(arr.sum() - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"weights must sum to 1, got {arr.sum()!r}")
        return v

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.w, dtype=float)

    @property
    def size(self) -> int:
        return len(self.w)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "WeightVector":
        return cls(w=np.asarray(arr, dtype=float).tolist())

    @classmethod
    def uniform(cls, size: int) -> "WeightVector":
        arr = np.full((size, size), 1.0 / (size * (size - 1)))
        np.fill_diagonal(arr, 0.0)
        return cls.from_array(arr)

    @classmethod
    def from_pair_simplex(cls, z: np.ndarray, size: int) -> "WeightVector":
        """Weights from a point z on the unordered-pair simplex (w_ij = z_l / 2)."""
        return cls.from_array(pair_simplex_to_matrix(z, size))


def pair_indices(size: int):
    """Upper-triangle (i < j) index arrays in row-major pair order."""
    return np.triu_indices(size, k=1)


def pair_simplex_to_matrix(z: np.ndarray, size: int) -> np.ndarray:
    iu = pair_indices(size)
    arr = np.zeros((size, size))
    arr[iu] = np.asarray(z, dtype=float) / 2.0
    return arr + arr.T
