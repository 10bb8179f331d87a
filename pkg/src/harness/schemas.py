from typing import Dict, List, Literal, Optional

from pydantic import Field, field_validator, model_validator

from src.config import settings
from src.constants.scenarios import SCENARIOS, get_scenario_names, is_builtin_scenario
from src.engines.schemas import McmcConfig, ModelSpec
from src.exceptions import ValidationException
from src.models import CustomModel, StrictModel

Preset = Literal["full", "desk"]


class Scenario(StrictModel):
    """True response rates per type and which types are effective."""
    name: str
    rates: List[float] = Field(..., min_length=2, description="True response rate per type")
    effective: Optional[List[bool]] = Field(None, description="Defaults to rate >= pi_h1")

    @field_validator("rates")
    @classmethod
    def check_rates(cls, v):
        if any(not 0.0 <= r <= 1.0 for r in v):
            raise ValueError("response rates must lie in [0, 1]")
        return v

    @model_validator(mode="after")
    def check_flags(self):
        if self.effective is not None and len(self.effective) != len(self.rates):
            raise ValueError("effective must have one flag per rate")
        return self

    @property
    def size(self) -> int:
        return len(self.rates)

    def effective_flags(self, pi_h1: float) -> List[bool]:
        if self.effective is not None:
            return list(self.effective)
        return [r >= pi_h1 for r in self.rates]

    @classmethod
    def builtin(cls, name: str) -> "Scenario":
        if not is_builtin_scenario(name):
            raise ValidationException(f"unknown scenario '{name}'; expected one of {get_scenario_names()}")
        rates, effective = SCENARIOS[name]
        return cls(name=name, rates=list(rates), effective=list(effective))

    @classmethod
    def null(cls, size: int, pi_h0: float) -> "Scenario":
        return cls(name="null", rates=[pi_h0] * size, effective=[False] * size)


class SimPlan(StrictModel):
    """How trials are simulated and how many replicates are run."""
    total_n: int = Field(72, ge=2, description="Patients per simulated trial")
    n_types: int = Field(6, ge=2, description="Number of cancer types")
    replicates: Optional[int] = Field(None, ge=1, description="Overrides the preset's replicate count")
    preset: Preset = Field("full", description="full or desk scale")
    seed: int = Field(settings.DEFAULT_SEED, ge=0, lt=2**64)
    pi_h0: float = Field(0.10, gt=0, lt=1)
    pi_h1: float = Field(0.40, gt=0, lt=1)
    mcmc: McmcConfig = Field(default_factory=McmcConfig)
    workers: Optional[int] = Field(None, ge=0, description="Worker processes; default from BUPD_WORKERS")

    @model_validator(mode="after")
    def check_plan(self):
        if self.total_n < self.n_types:
            raise ValueError(f"total_n ({self.total_n}) must be at least n_types ({self.n_types})")
        if not self.pi_h0 < self.pi_h1:
            raise ValueError("pi_h0 must be below pi_h1")
        return self

    @property
    def replicate_count(self) -> int:
        if self.replicates is not None:
            return self.replicates
        return settings.FULL_REPLICATES if self.preset == "full" else settings.DESK_REPLICATES

    def aligned(self, model: ModelSpec) -> ModelSpec:
        """The model with this plan's hypothesis rates."""
        return model.model_copy(update={"pi_h0": self.pi_h0, "pi_h1": self.pi_h1})


class OCResult(CustomModel):
    """Operating characteristics of one model under one scenario."""
    scenario: str
    model: str
    rates: List[float]
    effective: List[bool]
    replicates: int
    cutoff: float

    rejection_rate: List[float] = Field(..., description="Power for effective types, type-1 error otherwise")
    rejection_se: List[float] = Field(..., description="Binomial standard error of rejection_rate")
    bias: List[float] = Field(..., description="Mean posterior mean minus true rate")
    eti_width: List[float] = Field(..., description="Mean width of the 95% interval")
    prior_ess: Optional[List[float]] = None
    m_mean: Optional[float] = None
    s_mean: Optional[float] = None
    mw: Optional[List[List[float]]] = None

    mean_type1_error: Optional[float] = Field(None, description="Average over ineffective types")
    mean_power: Optional[float] = Field(None, description="Average over effective types")
    mean_bias_effective: Optional[float] = None
    mean_bias_ineffective: Optional[float] = None
    mean_width_effective: Optional[float] = None
    mean_width_ineffective: Optional[float] = None


class CalibrationResult(CustomModel):
    model: str
    cutoff: float
    target_alpha: float
    replicates: int
    seed: int
    null_pp_summary: Dict[str, float] = Field(..., description="Distribution summary of pooled null PPs")
    achieved_type1_error: Optional[List[float]] = Field(None, description="Per-type rejection rate in a verification run")


class SweepCell(CustomModel):
    scenario: str
    model: str
    result: Optional[OCResult] = None
    error: Optional[str] = None
    exit_code: Optional[int] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


class SweepResult(CustomModel):
    cells: List[SweepCell] = Field(default_factory=list)
    cutoffs: Dict[str, float] = Field(default_factory=dict)
    calibrations: List[CalibrationResult] = Field(default_factory=list)

    @property
    def results(self) -> List[OCResult]:
        return [cell.result for cell in self.cells if cell.result is not None]

    @property
    def failures(self) -> List[SweepCell]:
        return [cell for cell in self.cells if cell.failed]
