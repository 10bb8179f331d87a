from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from src.engines.constants import MAX_ACCEPTANCE, MIN_ACCEPTANCE, ModelKind
from src.models import CustomModel, StrictModel
from src.numcore.special import logit
from src.uip.schemas import DEFAULT_CLAMP_RATE


class ModelSpec(StrictModel):
    """A model kind with every hyperparameter it needs."""
    kind: ModelKind = Field(..., description="Model to fit")
    label: Optional[str] = Field(None, description="Display name, e.g. BUPD-D-18; defaults to the kind")

    pi_h0: float = Field(0.10, gt=0, lt=1, description="Null response rate")
    pi_h1: float = Field(0.40, gt=0, lt=1, description="Target response rate")

    # BBM-NB / BBM-JS
    alpha0: float = Field(1.0, gt=0, description="Beta prior shape a")
    beta0: float = Field(1.0, gt=0, description="Beta prior shape b")
    epsilon: float = Field(2.0, gt=0, description="BBM-JS similarity exponent")
    tau: float = Field(0.5, gt=0, lt=1, description="BBM-JS similarity gate")

    # BHM
    bhm_mu0: Optional[float] = Field(None, description="Prior mean of mu; default logit((pi_h0 + pi_h1) / 2)")
    bhm_sigma2: float = Field(100.0, gt=0, description="Prior variance of mu")
    bhm_tau_shape: float = Field(2.0, gt=0)
    bhm_tau_rate: float = Field(2.0, gt=0)

    # BUPD family
    M: float = Field(72.0, gt=0, description="Fixed M for BUPD-JS, upper bound of M's uniform prior otherwise")
    z_concentration: float = Field(1.0, gt=0, description="Dirichlet concentration for BUPD-D weights")
    s_shape: float = Field(0.01, gt=0, description="Gamma shape of the BUPD-JSH temperature prior")
    s_rate: float = Field(0.01, gt=0, description="Gamma rate of the BUPD-JSH temperature prior")
    clamp_rate: float = Field(DEFAULT_CLAMP_RATE, gt=0, lt=0.5)

    @model_validator(mode="after")
    def check_hypotheses(self):
        if not self.pi_h0 < self.pi_h1:
            raise ValueError(f"pi_h0 ({self.pi_h0}) must be below pi_h1 ({self.pi_h1})")
        return self

    @property
    def display_name(self) -> str:
        return self.label or self.kind.value

    @property
    def bhm_prior_mean(self) -> float:
        if self.bhm_mu0 is not None:
            return self.bhm_mu0
        return float(logit(0.5 * (self.pi_h0 + self.pi_h1)))


class McmcConfig(StrictModel):
    """Sampler schedule, proposal tuning and optional frozen parameters."""
    burn_in: int = Field(2000, ge=0)
    post_burn_iterations: int = Field(20000, ge=1)
    thin: int = Field(2, ge=1)
    adapt_interval: int = Field(100, ge=10, description="Burn-in iterations between step-size updates")
    acceptance_bounds: Tuple[float, float] = Field((MIN_ACCEPTANCE, MAX_ACCEPTANCE))

    # initial proposal scales
    step_m: Optional[float] = Field(None, gt=0, description="Random-walk sd for M; default M_max / 10")
    step_log_s: float = Field(1.0, gt=0)
    step_theta: float = Field(0.5, gt=0)
    step_shift: float = Field(0.2, gt=0, description="Random-walk sd of the joint theta and mu shift")
    z_kappa: float = Field(200.0, gt=0, description="Dirichlet proposal concentration; larger is a smaller step")

    # frozen parameters (conjugacy checks, limits)
    fix_m: Optional[float] = Field(None, gt=0)
    fix_z: Optional[List[float]] = None
    fix_s: Optional[float] = Field(None, gt=0)
    fix_tau: Optional[float] = Field(None, gt=0)

    @field_validator("fix_z")
    @classmethod
    def check_fix_z(cls, v):
        if v is None:
            return v
        arr = np.asarray(v, dtype=float)
        if np.any(arr <= 0) or abs(arr.sum() - 1.0) > 1e-9:
            raise ValueError("fix_z must be a strictly positive vector summing to 1")
        return v

    @field_validator("acceptance_bounds")
    @classmethod
    def check_bounds(cls, v):
        low, high = v
        if not 0.0 <= low < high <= 1.0:
            raise ValueError(f"acceptance bounds must satisfy 0 <= low < high <= 1, got {v}")
        return v

    @model_validator(mode="after")
    def check_schedule(self):
        if self.post_burn_iterations < 2 * self.thin:
            raise ValueError("the schedule must retain at least two draws (post_burn_iterations >= 2 * thin)")
        return self

    @property
    def retained(self) -> int:
        return self.post_burn_iterations // self.thin

    @property
    def total_iterations(self) -> int:
        return self.burn_in + self.post_burn_iterations


class PosteriorSummary(CustomModel):
    """Per-type posterior output of one model fit."""
    model: str = Field(..., description="Display name of the fitted model")
    kind: ModelKind
    labels: List[str]
    pi_h0: float

    mean: List[float] = Field(..., description="Posterior mean of pi_i")
    sd: List[float] = Field(..., description="Posterior standard deviation of pi_i")
    lower: List[float] = Field(..., description="2.5% posterior quantile")
    upper: List[float] = Field(..., description="97.5% posterior quantile")
    pp: List[float] = Field(..., description="Pr(pi_i > pi_h0 | data)")
    ess: List[float] = Field(..., description="Posterior effective sample size")
    prior_ess: Optional[List[float]] = Field(None, description="Prior effective sample size alpha_i + beta_i")

    m_mean: Optional[float] = Field(None, description="Posterior mean of M")
    s_mean: Optional[float] = Field(None, description="Posterior mean of s")
    mw: Optional[List[List[float]]] = Field(None, description="Posterior mean of M * w_ij")

    acceptance: Dict[str, float] = Field(default_factory=dict)
    retained: Optional[int] = Field(None, description="Retained MCMC draws")
    warnings: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_consistency(self):
        size = len(self.labels)
        for name in ("mean", "sd", "lower", "upper", "pp", "ess"):
            if len(getattr(self, name)) != size:
                raise ValueError(f"{name} must have {size} entries")
        for lo, hi in zip(self.lower, self.upper):
            if lo > hi:
                raise ValueError(f"interval lower bound {lo} exceeds upper bound {hi}")
        if any(not 0.0 <= p <= 1.0 for p in self.pp):
            raise ValueError("posterior probabilities must lie in [0, 1]")
        return self

    @property
    def width(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)
