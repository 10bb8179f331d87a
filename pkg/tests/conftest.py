import pytest

from src.config import settings
from src.constants.trials import (
    VEMURAFENIB_LABELS,
    VEMURAFENIB_M,
    VEMURAFENIB_N,
    VEMURAFENIB_PI_H0,
    VEMURAFENIB_PI_H1,
    VEMURAFENIB_X,
)
from src.engines.constants import ModelKind
from src.engines.schemas import McmcConfig, ModelSpec
from src.numcore.streams import RngStream
from src.uip.schemas import TrialData


@pytest.fixture(autouse=True)
def isolated_log_file(tmp_path, monkeypatch):
    """Keep the file handler from logging.ini out of the working directory."""
    monkeypatch.setattr(settings, "LOG_FILE", str(tmp_path / "bupd.log"))


@pytest.fixture
def vemurafenib() -> TrialData:
    return TrialData(labels=VEMURAFENIB_LABELS, n=VEMURAFENIB_N, x=VEMURAFENIB_X)


@pytest.fixture
def model_spec():
    """Factory for a model on the vemurafenib hypotheses."""
    def make(kind: ModelKind, **kwargs) -> ModelSpec:
        params = {"pi_h0": VEMURAFENIB_PI_H0, "pi_h1": VEMURAFENIB_PI_H1, "M": VEMURAFENIB_M, **kwargs}
        return ModelSpec(kind=kind, **params)

    return make


@pytest.fixture
def short_mcmc() -> McmcConfig:
    return McmcConfig(burn_in=500, post_burn_iterations=1000, thin=1)


@pytest.fixture
def rng() -> RngStream:
    return RngStream(12345)
