from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import Field, field_validator, model_validator

from src.config import settings
from src.engines.constants import reports_weights
from src.engines.schemas import McmcConfig, ModelSpec
from src.harness.schemas import Scenario, SimPlan
from src.models import CustomModel, StrictModel
from src.uip.schemas import TrialData

Command = Literal["analyze", "calibrate", "simulate"]


def _check_unique_names(models: List[ModelSpec]) -> List[ModelSpec]:
    names = [m.display_name for m in models]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise ValueError(f"model names must be unique; repeated: {duplicates} (set 'label' to disambiguate)")
    return models


class AnalyzeConfig(StrictModel):
    """Fit one or more models to observed trial data."""
    data: TrialData
    models: List[ModelSpec] = Field(..., min_length=1)
    pi_h0: Optional[float] = Field(None, gt=0, lt=1, description="Applied to every model")
    pi_h1: Optional[float] = Field(None, gt=0, lt=1, description="Applied to every model")
    M: Optional[float] = Field(None, gt=0, description="Applied to BUPD models that do not set M")
    mcmc: McmcConfig = Field(default_factory=McmcConfig)
    seed: int = Field(settings.DEFAULT_SEED, ge=0, lt=2**64)

    @field_validator("models")
    @classmethod
    def unique_models(cls, v):
        return _check_unique_names(v)

    @model_validator(mode="after")
    def apply_shared(self):
        resolved = []
        for model in self.models:
            update: Dict[str, Any] = {}
            if self.pi_h0 is not None:
                update["pi_h0"] = self.pi_h0
            if self.pi_h1 is not None:
                update["pi_h1"] = self.pi_h1
            if self.M is not None and reports_weights(model.kind) and "M" not in model.model_fields_set:
                update["M"] = self.M
            resolved.append(ModelSpec.model_validate({**model.model_dump(exclude_unset=True), **update}))
        self.models = resolved
        return self


class CalibrateConfig(StrictModel):
    """Calibrate the decision cutoff of each model under the all-null scenario."""
    models: List[ModelSpec] = Field(..., min_length=1)
    plan: SimPlan = Field(default_factory=SimPlan)
    target_alpha: float = Field(0.05, gt=0, le=0.5)
    verify: bool = Field(True, description="Re-simulate the null to report the achieved type-1 error")

    @field_validator("models")
    @classmethod
    def unique_models(cls, v):
        return _check_unique_names(v)


class SimulateConfig(StrictModel):
    """Operating characteristics over a scenario x model grid."""
    scenarios: List[Union[str, Scenario]] = Field(..., min_length=1, description="Built-in names or explicit scenarios")
    models: List[ModelSpec] = Field(..., min_length=1)
    plan: SimPlan = Field(default_factory=SimPlan)
    cutoffs: Dict[str, float] = Field(default_factory=dict, description="Cutoff per model name; missing ones are calibrated")
    target_alpha: float = Field(0.05, gt=0, le=0.5)

    @field_validator("models")
    @classmethod
    def unique_models(cls, v):
        return _check_unique_names(v)

    @field_validator("cutoffs")
    @classmethod
    def check_cutoffs(cls, v):
        for name, c in v.items():
            if not 0.0 <= c <= 1.0:
                raise ValueError(f"cutoff for {name} must lie in [0, 1], got {c}")
        return v

    def resolved_scenarios(self) -> List[Scenario]:
        return [Scenario.builtin(s) if isinstance(s, str) else s for s in self.scenarios]


class RunManifest(CustomModel):
    """Everything needed to reproduce a run."""
    command: Command
    config: Dict[str, Any] = Field(..., description="Fully resolved configuration")
    seed: int
    versions: Dict[str, str]
    wall_time_s: float
    outputs: List[str]
    failures: List[Dict[str, Any]] = Field(default_factory=list)
    exit_code: int = 0


class ResultBundle(CustomModel):
    out_dir: str
    files: List[str]
    manifest: RunManifest

    @property
    def exit_code(self) -> int:
        return self.manifest.exit_code
