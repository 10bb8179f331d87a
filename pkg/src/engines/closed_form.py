"""Engines whose posteriors are independent beta distributions: BBM-NB, BBM-JS, BUPD-JS."""
import logging
from typing import List, Optional

import numpy as np

from src.divergence.service import divergence_array, similarity_array, softmax_weights
from src.engines.constants import CREDIBLE_LEVEL
from src.engines.schemas import ModelSpec, PosteriorSummary
from src.numcore.special import beta_summary
from src.uip.schemas import TrialData
from src.uip.service import prior_arrays

logger = logging.getLogger(__name__)


def summarize_beta(
    data: TrialData,
    spec: ModelSpec,
    a: np.ndarray,
    b: np.ndarray,
    prior_ess: Optional[np.ndarray] = None,
    m_mean: Optional[float] = None,
    s_mean: Optional[float] = None,
    mw: Optional[np.ndarray] = None,
    warnings: Optional[List[str]] = None,
) -> PosteriorSummary:
    """PosteriorSummary for independent Beta(a_i, b_i) posteriors."""
    mean, sd, lower, upper, pp = beta_summary(a, b, spec.pi_h0, CREDIBLE_LEVEL)
    return PosteriorSummary(
        model=spec.display_name,
        kind=spec.kind,
        labels=list(data.labels),
        pi_h0=spec.pi_h0,
        mean=mean.tolist(),
        sd=sd.tolist(),
        lower=lower.tolist(),
        upper=upper.tolist(),
        pp=pp.tolist(),
        ess=(a + b).tolist(),
        prior_ess=None if prior_ess is None else np.asarray(prior_ess).tolist(),
        m_mean=m_mean,
        s_mean=s_mean,
        mw=None if mw is None else mw.tolist(),
        warnings=warnings or [],
    )


def fit_bbm_nb(data: TrialData, spec: ModelSpec) -> PosteriorSummary:
    """Independent Beta(alpha0 + x_i, beta0 + n_i - x_i) per type."""
    n, x = data.n_array, data.x_array
    a = spec.alpha0 + x
    b = spec.beta0 + n - x
    prior_ess = np.full(data.size, spec.alpha0 + spec.beta0)
    return summarize_beta(data, spec, a, b, prior_ess=prior_ess)


def borrowing_gate(similarity: np.ndarray, epsilon: float, tau: float) -> np.ndarray:
    """S_ij^epsilon where S_ij > tau, else 0; own data enters with weight 1."""
    gate = np.where(similarity > tau, similarity ** epsilon, 0.0)
    np.fill_diagonal(gate, 1.0)
    return gate


def fit_bbm_js(data: TrialData, spec: ModelSpec) -> PosteriorSummary:
    """
    Beta-binomial with similarity-discounted pooling.

    Type i adds S_ij^eps * x_j responders and S_ij^eps * (n_j - x_j)
    non-responders from every type j whose similarity exceeds tau.
    """
    n, x = data.n_array, data.x_array
    gate = borrowing_gate(similarity_array(data.n, data.x), spec.epsilon, spec.tau)
    a = spec.alpha0 + gate @ x
    b = spec.beta0 + gate @ (n - x)
    prior_ess = a + b - n
    logger.debug("%s gate matrix:\n%s", spec.display_name, gate)
    return summarize_beta(data, spec, a, b, prior_ess=prior_ess)


def fit_bupd_js(data: TrialData, spec: ModelSpec) -> PosteriorSummary:
    """Unit-information priors with divergence weights at s = 1 and fixed M; conjugate update."""
    n, x = data.n_array, data.x_array
    weights = softmax_weights(divergence_array(data.n, data.x), 1.0)
    prior = prior_arrays(weights, data.mles, data.active, spec.M, spec.clamp_rate)

    warnings = []
    for i in np.flatnonzero(prior.fallback):
        msg = f"{data.labels[i]}: unit-information prior infeasible; using Beta(1, 1)"
        logger.warning(msg)
        warnings.append(msg)

    a = prior.alpha + x
    b = prior.beta + n - x
    return summarize_beta(
        data,
        spec,
        a,
        b,
        prior_ess=prior.alpha + prior.beta,
        m_mean=spec.M,
        s_mean=1.0,
        mw=spec.M * weights,
        warnings=warnings,
    )
