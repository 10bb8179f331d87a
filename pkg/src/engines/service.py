import logging
import time
from typing import Callable, Dict, List, Optional

from src.config import settings
from src.engines.closed_form import fit_bbm_js, fit_bbm_nb, fit_bupd_js
from src.engines.constants import ModelKind, get_model_description, is_sampler
from src.engines.exceptions import InvalidCutoffException, UnknownModelException
from src.engines.samplers import fit_bhm, fit_bupd_d, fit_bupd_jsh
from src.engines.schemas import McmcConfig, ModelSpec, PosteriorSummary
from src.numcore.streams import RngStream
from src.uip.schemas import TrialData

ClosedFormFit = Callable[[TrialData, ModelSpec], PosteriorSummary]
SamplerFit = Callable[[TrialData, ModelSpec, McmcConfig, RngStream], PosteriorSummary]

CLOSED_FORM: Dict[ModelKind, ClosedFormFit] = {
    ModelKind.BBM_NB: fit_bbm_nb,
    ModelKind.BBM_JS: fit_bbm_js,
    ModelKind.BUPD_JS: fit_bupd_js,
}

SAMPLERS: Dict[ModelKind, SamplerFit] = {
    ModelKind.BHM: fit_bhm,
    ModelKind.BUPD_D: fit_bupd_d,
    ModelKind.BUPD_JSH: fit_bupd_jsh,
}


def decide_efficacy(summary: PosteriorSummary, c: float) -> List[bool]:
    """Declare type i efficacious iff Pr(pi_i > pi_h0 | data) > c."""
    if not 0.0 <= c <= 1.0:
        raise InvalidCutoffException(c)
    return [pp > c for pp in summary.pp]


class EngineService:
    """Dispatches model fits to the closed-form and sampling engines."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def fit(
        self,
        data: TrialData,
        spec: ModelSpec,
        mcmc: Optional[McmcConfig] = None,
        rng: Optional[RngStream] = None,
    ) -> PosteriorSummary:
        """
        Fit one model to trial data.

        Sampling engines use `mcmc` (defaults to the standard schedule) and
        `rng` (defaults to a stream on the configured default seed).
        """
        start = time.perf_counter()
        if spec.kind in CLOSED_FORM:
            summary = CLOSED_FORM[spec.kind](data, spec)
        elif spec.kind in SAMPLERS:
            summary = SAMPLERS[spec.kind](
                data,
                spec,
                mcmc or McmcConfig(),
                rng or RngStream(settings.DEFAULT_SEED),
            )
        else:
            raise UnknownModelException(str(spec.kind))

        self.logger.debug(
            "Fitted %s [%s] to %d types in %.3fs%s",
            spec.display_name,
            get_model_description(spec.kind),
            data.size,
            time.perf_counter() - start,
            f" (acceptance {summary.acceptance})" if is_sampler(spec.kind) else "",
        )
        return summary

    def decide(self, summary: PosteriorSummary, c: float) -> List[bool]:
        return decide_efficacy(summary, c)
