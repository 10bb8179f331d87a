from typing import List, Optional

import numpy as np
from pydantic import Field, model_validator

from src.models import CustomModel, StrictModel
from src.numcore.schemas import BetaParams

DEFAULT_CLAMP_RATE = 0.05


class TrialData(StrictModel):
    """Enrolment and responder counts per cancer type."""
    labels: Optional[List[str]] = Field(None, description="Type names; defaults to type1..typeI")
    n: List[int] = Field(..., description="Enrolled patients per type")
    x: List[int] = Field(..., description="Responders per type")

    @model_validator(mode="after")
    def check_counts(self):
        if len(self.n) != len(self.x):
            raise ValueError(f"n and x must have the same length ({len(self.n)} != {len(self.x)})")
        if len(self.n) < 2:
            raise ValueError("at least two cancer types are required")
        for i, (n_i, x_i) in enumerate(zip(self.n, self.x)):
            if n_i < 0:
                raise ValueError(f"n[{i}] must be >= 0, got {n_i}")
            if not 0 <= x_i <= n_i:
                raise ValueError(f"x[{i}] must lie in [0, n[{i}]], got x={x_i}, n={n_i}")
        if not any(v > 0 for v in self.n):
            raise ValueError("at least one type must enrol a patient")
        if self.labels is None:
            self.labels = [f"type{i + 1}" for i in range(len(self.n))]
        elif len(self.labels) != len(self.n):
            raise ValueError(f"expected {len(self.n)} labels, got {len(self.labels)}")
        elif len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")
        return self

    @property
    def size(self) -> int:
        return len(self.n)

    @property
    def n_array(self) -> np.ndarray:
        return np.asarray(self.n, dtype=float)

    @property
    def x_array(self) -> np.ndarray:
        return np.asarray(self.x, dtype=float)

    @property
    def active(self) -> np.ndarray:
        """True where the type enrolled at least one patient."""
        return self.n_array > 0

    @property
    def mles(self) -> np.ndarray:
        """Observed response rates x_i / n_i; 0 for empty types (check `active`)."""
        n = self.n_array
        return np.divide(self.x_array, n, out=np.zeros_like(n), where=n > 0)

    def permuted(self, order: List[int]) -> "TrialData":
        return TrialData(
            labels=[self.labels[k] for k in order],
            n=[self.n[k] for k in order],
            x=[self.x[k] for k in order],
        )


class UipConfig(StrictModel):
    M: float = Field(..., gt=0, description="Total borrowed sample size, or the upper bound of its uniform hyper-prior")
    clamp_rate: float = Field(DEFAULT_CLAMP_RATE, gt=0, lt=0.5, description="Rates are clamped to [c, 1 - c] inside UI")


class UipPrior(CustomModel):
    """Per-type unit-information beta priors."""
    params: List[BetaParams]
    mu: List[float] = Field(..., description="Prior means")
    eta2: List[float] = Field(..., description="Prior variances")
    fallback: List[bool] = Field(..., description="True where Beta(1, 1) replaced an infeasible prior")
    warnings: List[str] = Field(default_factory=list)

    @property
    def alpha(self) -> np.ndarray:
        return np.array([p.alpha for p in self.params])

    @property
    def beta(self) -> np.ndarray:
        return np.array([p.beta for p in self.params])

    @property
    def prior_ess(self) -> np.ndarray:
        return self.alpha + self.beta


class EffectiveSampleSize(CustomModel):
    exact: Optional[float] = Field(None, description="n_i + alpha_i + beta_i")
    approximate: float = Field(..., description="n_i + M * sum_l w_il - 1")
