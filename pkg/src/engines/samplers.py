"""
Metropolis-within-Gibbs engines: BUPD-D, BUPD-JSH and BHM.

The BUPD samplers share one structure. Response rates pi are drawn exactly
from their conjugate beta conditionals given the current hyperparameters;
the weight hyperparameter (z for BUPD-D, s for BUPD-JSH) and M are then
updated by Metropolis steps whose target is the product of the beta prior
densities of the current pi. The plug-in rates inside the priors are the
observed x_i / n_i and stay fixed for the whole chain.

Proposal scales adapt every `adapt_interval` iterations during burn-in and
are frozen afterwards.
"""
import logging
import math
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import special

from src.divergence.schemas import pair_simplex_to_matrix
from src.divergence.service import divergence_array, softmax_weights
from src.engines.constants import (
    CREDIBLE_LEVEL,
    DIRICHLET_PROPOSAL_OFFSET,
    PI_FLOOR,
    TARGET_ACCEPTANCE_HIGH,
    TARGET_ACCEPTANCE_LOW,
)
from src.engines.exceptions import SamplerFailureException
from src.engines.schemas import McmcConfig, ModelSpec, PosteriorSummary
from src.exceptions import ValidationException
from src.numcore.sampling import sample_dirichlet, sample_gamma
from src.numcore.special import expit
from src.numcore.streams import RngStream
from src.uip.schemas import TrialData
from src.uip.service import PriorArrays, prior_arrays

logger = logging.getLogger(__name__)

SHRINK = 0.7
GROW = 1.3
LOG_S_LIMIT = 50.0


class StepTuner:
    """
    Proposal scale with acceptance bookkeeping.

    `scale` may be a vector (one scale per component). When `inverse` is set a
    larger scale means a smaller move (Dirichlet concentration).
    """

    def __init__(self, name: str, scale, inverse: bool = False):
        self.name = name
        self.scale = np.array(scale, dtype=float, ndmin=1)
        self.inverse = inverse
        self._window_accepted = np.zeros_like(self.scale)
        self._window_proposed = 0
        self._accepted = np.zeros_like(self.scale)
        self._proposed = 0

    def record(self, accepted, burning: bool) -> None:
        if burning:
            self._window_accepted += accepted
            self._window_proposed += 1
        else:
            self._accepted += accepted
            self._proposed += 1

    def adapt(self) -> None:
        if self._window_proposed == 0:
            return
        rate = self._window_accepted / self._window_proposed
        factor = np.where(rate < TARGET_ACCEPTANCE_LOW, SHRINK, np.where(rate > TARGET_ACCEPTANCE_HIGH, GROW, 1.0))
        self.scale = self.scale / factor if self.inverse else self.scale * factor
        self._window_accepted[:] = 0.0
        self._window_proposed = 0

    @property
    def rates(self) -> np.ndarray:
        if self._proposed == 0:
            return np.full_like(self.scale, np.nan)
        return self._accepted / self._proposed


def _schedule(mcmc: McmcConfig) -> Iterator[Tuple[bool, bool, bool]]:
    """Yields (burning, keep, adapt_now) for each iteration."""
    for it in range(mcmc.total_iterations):
        burning = it < mcmc.burn_in
        keep = not burning and (it - mcmc.burn_in + 1) % mcmc.thin == 0
        adapt_now = burning and (it + 1) % mcmc.adapt_interval == 0
        yield burning, keep, adapt_now


def _check_acceptance(model: str, acceptance: Dict[str, float], mcmc: McmcConfig) -> None:
    low, high = mcmc.acceptance_bounds
    for parameter, rate in acceptance.items():
        if not low <= rate <= high:
            raise SamplerFailureException(model, parameter, rate, low, high)


def _log_prior_density(pi: np.ndarray, prior: PriorArrays) -> float:
    """Sum over types of log Beta(pi_i; alpha_i, beta_i)."""
    return float(np.sum(
        special.xlogy(prior.alpha - 1.0, pi)
        + special.xlog1py(prior.beta - 1.0, -pi)
        - special.betaln(prior.alpha, prior.beta)
    ))


def _log_dirichlet(y: np.ndarray, concentration: np.ndarray) -> float:
    return float(
        special.gammaln(concentration.sum())
        - special.gammaln(concentration).sum()
        + np.sum((concentration - 1.0) * np.log(y))
    )


def _reflect(value: float, upper: float) -> float:
    """Fold a proposal back into [0, upper]."""
    while value < 0.0 or value > upper:
        if value < 0.0:
            value = -value
        if value > upper:
            value = 2.0 * upper - value
    return value


class ChainOutput(NamedTuple):
    """Retained pi draws (retained x I) and chain-level summaries."""
    draws: np.ndarray
    acceptance: Dict[str, float]
    prior_ess: Optional[np.ndarray] = None
    m_mean: Optional[float] = None
    s_mean: Optional[float] = None
    mw: Optional[np.ndarray] = None
    warnings: Tuple[str, ...] = ()


def summarize_chain(data: TrialData, spec: ModelSpec, chain: ChainOutput) -> PosteriorSummary:
    tail = (1.0 - CREDIBLE_LEVEL) / 2.0
    draws = chain.draws
    retained = draws.shape[0]
    mean = draws.mean(axis=0)
    var = draws.var(axis=0, ddof=1)
    lower, upper = np.quantile(draws, [tail, 1.0 - tail], axis=0)
    pp = (draws > spec.pi_h0).mean(axis=0)
    # moment-matched beta ESS; a chain stuck at one value reports the draw count
    safe_var = np.where(var > 0.0, var, 1.0)
    ess = np.where(var > 0.0, mean * (1.0 - mean) / safe_var - 1.0, float(retained))
    return PosteriorSummary(
        model=spec.display_name,
        kind=spec.kind,
        labels=list(data.labels),
        pi_h0=spec.pi_h0,
        mean=mean.tolist(),
        sd=np.sqrt(var).tolist(),
        lower=lower.tolist(),
        upper=upper.tolist(),
        pp=pp.tolist(),
        ess=ess.tolist(),
        prior_ess=None if chain.prior_ess is None else chain.prior_ess.tolist(),
        m_mean=chain.m_mean,
        s_mean=chain.s_mean,
        mw=None if chain.mw is None else chain.mw.tolist(),
        acceptance=chain.acceptance,
        retained=retained,
        warnings=list(chain.warnings),
    )


class _BupdChain:
    """State shared by the BUPD samplers: pi, M and the current weight matrix."""

    def __init__(self, data: TrialData, spec: ModelSpec, mcmc: McmcConfig, rng: RngStream):
        self.data = data
        self.spec = spec
        self.mcmc = mcmc
        self.gen = rng.generator
        self.n = data.n_array
        self.x = data.x_array
        self.mles = data.mles
        self.active = data.active
        self.m_max = spec.M
        self.M = mcmc.fix_m if mcmc.fix_m is not None else self.m_max / 2.0
        self.m_tuner = StepTuner("M", mcmc.step_m or self.m_max / 10.0)
        self.fallback_draws = 0
        # rows with a proper prior at equal weights and the largest M
        reference = np.ones((data.size, data.size)) - np.eye(data.size)
        self.guarded = ~self.prior_for(reference / reference.sum(), self.m_max).fallback

        self.weights: np.ndarray = np.zeros((data.size, data.size))
        self.prior: Optional[PriorArrays] = None
        self.pi = np.full(data.size, 0.5)

        self.draws: List[np.ndarray] = []
        self.sum_mw = np.zeros((data.size, data.size))
        self.sum_prior_ess = np.zeros(data.size)
        self.sum_m = 0.0

    def prior_for(self, weights: np.ndarray, M: float) -> PriorArrays:
        return prior_arrays(weights, self.mles, self.active, M, self.spec.clamp_rate)

    def set_state(self, weights: np.ndarray, M: float, prior: Optional[PriorArrays] = None) -> None:
        self.weights = weights
        self.M = M
        self.prior = prior if prior is not None else self.prior_for(weights, M)

    def log_density(self, prior: PriorArrays) -> float:
        """
        Log prior density of the current pi under `prior`.

        A guarded row whose moments admit no beta distribution makes the
        state impossible (-inf); its Beta(1, 1) stand-in only serves rows
        that have no proper prior anywhere in the hyperparameter space.
        """
        if np.any(prior.fallback & self.guarded):
            return -math.inf
        return _log_prior_density(self.pi, prior)

    def draw_pi(self) -> float:
        """Exact conjugate update of pi; returns the log prior density at the new pi."""
        self.pi = self.gen.beta(self.prior.alpha + self.x, self.prior.beta + self.n - self.x)
        self.pi = np.clip(self.pi, PI_FLOOR, 1.0 - PI_FLOOR)
        return self.log_density(self.prior)

    def update_m(self, current_lp: float, burning: bool) -> float:
        if self.mcmc.fix_m is not None:
            return current_lp
        proposal = _reflect(self.M + self.m_tuner.scale[0] * self.gen.standard_normal(), self.m_max)
        accepted = False
        if proposal > 0.0:
            prior = self.prior_for(self.weights, proposal)
            lp = self.log_density(prior)
            if math.log(self.gen.random()) < lp - current_lp:
                self.set_state(self.weights, proposal, prior)
                current_lp = lp
                accepted = True
        self.m_tuner.record(accepted, burning)
        return current_lp

    def store(self) -> None:
        self.draws.append(self.pi.copy())
        self.sum_mw += self.M * self.weights
        self.sum_prior_ess += self.prior.alpha + self.prior.beta
        self.sum_m += self.M
        if self.prior.fallback.any():
            self.fallback_draws += 1

    def output(self, acceptance: Dict[str, float], s_mean: Optional[float] = None) -> ChainOutput:
        retained = len(self.draws)
        warnings: Tuple[str, ...] = ()
        if self.fallback_draws:
            msg = (
                f"{self.spec.display_name}: {self.fallback_draws} retained draws used a Beta(1, 1) "
                f"fallback prior for at least one type"
            )
            logger.warning(msg)
            warnings = (msg,)
        return ChainOutput(
            draws=np.vstack(self.draws),
            acceptance=acceptance,
            prior_ess=self.sum_prior_ess / retained,
            m_mean=self.sum_m / retained,
            s_mean=s_mean,
            mw=self.sum_mw / retained,
            warnings=warnings,
        )


def sample_bupd_d(data: TrialData, spec: ModelSpec, mcmc: McmcConfig, rng: RngStream) -> ChainOutput:
    size = data.size
    n_pairs = size * (size - 1) // 2
    chain = _BupdChain(data, spec, mcmc, rng)
    z_tuner = StepTuner("z", mcmc.z_kappa, inverse=True)
    fix_z = mcmc.fix_z is not None
    if fix_z and len(mcmc.fix_z) != n_pairs:
        raise ValidationException(f"fix_z must have {n_pairs} entries for {size} types")

    z = np.asarray(mcmc.fix_z, dtype=float) if fix_z else np.full(n_pairs, 1.0 / n_pairs)
    chain.set_state(pair_simplex_to_matrix(z, size), chain.M)
    concentration0 = spec.z_concentration

    for burning, keep, adapt_now in _schedule(mcmc):
        lp = chain.draw_pi()

        if not fix_z:
            forward = z_tuner.scale[0] * z + DIRICHLET_PROPOSAL_OFFSET
            proposal = sample_dirichlet(rng, forward)
            accepted = False
            if np.all(proposal > 0.0):
                weights = pair_simplex_to_matrix(proposal, size)
                prior = chain.prior_for(weights, chain.M)
                lp_new = chain.log_density(prior)
                backward = z_tuner.scale[0] * proposal + DIRICHLET_PROPOSAL_OFFSET
                log_ratio = (
                    lp_new - lp
                    + (concentration0 - 1.0) * float(np.sum(np.log(proposal) - np.log(z)))
                    + _log_dirichlet(z, backward)
                    - _log_dirichlet(proposal, forward)
                )
                if math.log(chain.gen.random()) < log_ratio:
                    z = proposal
                    chain.set_state(weights, chain.M, prior)
                    lp = lp_new
                    accepted = True
            z_tuner.record(accepted, burning)

        chain.update_m(lp, burning)

        if adapt_now:
            z_tuner.adapt()
            chain.m_tuner.adapt()
        if keep:
            chain.store()

    acceptance = {}
    if not fix_z:
        acceptance["z"] = float(z_tuner.rates[0])
    if mcmc.fix_m is None:
        acceptance["M"] = float(chain.m_tuner.rates[0])
    _check_acceptance(spec.display_name, acceptance, mcmc)
    logger.debug("%s finished: acceptance=%s, final kappa=%.3g", spec.display_name, acceptance, z_tuner.scale[0])
    return chain.output(acceptance)


def fit_bupd_d(data: TrialData, spec: ModelSpec, mcmc: McmcConfig, rng: RngStream) -> PosteriorSummary:
    """BUPD with a Dirichlet hyper-prior on the pairwise weights and a uniform prior on M."""
    return summarize_chain(data, spec, sample_bupd_d(data, spec, mcmc, rng))


def sample_bupd_jsh(data: TrialData, spec: ModelSpec, mcmc: McmcConfig, rng: RngStream) -> ChainOutput:
    chain = _BupdChain(data, spec, mcmc, rng)
    s_tuner = StepTuner("s", mcmc.step_log_s)
    fix_s = mcmc.fix_s is not None
    divergence = divergence_array(data.n, data.x)

    def log_s_prior(log_s: float) -> float:
        # gamma density of s plus the log-scale Jacobian
        return spec.s_shape * log_s - spec.s_rate * math.exp(log_s)

    log_s = math.log(mcmc.fix_s) if fix_s else 0.0
    chain.set_state(softmax_weights(divergence, math.exp(log_s)), chain.M)
    sum_s = 0.0

    for burning, keep, adapt_now in _schedule(mcmc):
        lp = chain.draw_pi()

        if not fix_s:
            proposal = log_s + s_tuner.scale[0] * chain.gen.standard_normal()
            accepted = False
            if abs(proposal) <= LOG_S_LIMIT:
                weights = softmax_weights(divergence, math.exp(proposal))
                prior = chain.prior_for(weights, chain.M)
                lp_new = chain.log_density(prior)
                log_ratio = lp_new - lp + log_s_prior(proposal) - log_s_prior(log_s)
                if math.log(chain.gen.random()) < log_ratio:
                    log_s = proposal
                    chain.set_state(weights, chain.M, prior)
                    lp = lp_new
                    accepted = True
            s_tuner.record(accepted, burning)

        chain.update_m(lp, burning)

        if adapt_now:
            s_tuner.adapt()
            chain.m_tuner.adapt()
        if keep:
            chain.store()
            sum_s += math.exp(log_s)

    acceptance = {}
    if not fix_s:
        acceptance["s"] = float(s_tuner.rates[0])
    if mcmc.fix_m is None:
        acceptance["M"] = float(chain.m_tuner.rates[0])
    _check_acceptance(spec.display_name, acceptance, mcmc)
    logger.debug("%s finished: acceptance=%s", spec.display_name, acceptance)
    return chain.output(acceptance, s_mean=sum_s / len(chain.draws))


def fit_bupd_jsh(data: TrialData, spec: ModelSpec, mcmc: McmcConfig, rng: RngStream) -> PosteriorSummary:
    """BUPD with weights exp(-d_ij / s), a gamma hyper-prior on s and a uniform prior on M."""
    return summarize_chain(data, spec, sample_bupd_jsh(data, spec, mcmc, rng))


def sample_bhm(data: TrialData, spec: ModelSpec, mcmc: McmcConfig, rng: RngStream) -> ChainOutput:
    """
    Hierarchical model theta_i = logit(pi_i) ~ N(mu, 1 / tau).

    mu and tau have conjugate normal and gamma conditionals; each theta_i gets
    its own random-walk Metropolis step. A joint move shifts every theta_i
    and mu by the same amount, which leaves (theta - mu) unchanged and keeps
    the chain moving when a large tau pins the thetas to mu.
    """
    size = data.size
    if size < 2:
        raise ValidationException("the hierarchical model needs at least two types")
    gen = rng.generator
    n, x = data.n_array, data.x_array
    mu0, sigma2 = spec.bhm_prior_mean, spec.bhm_sigma2
    tuner = StepTuner("theta", np.full(size, mcmc.step_theta))
    shift_tuner = StepTuner("shift", mcmc.step_shift)

    theta = special.logit((x + 0.5) / (n + 1.0))
    mu = float(theta.mean())
    tau = mcmc.fix_tau if mcmc.fix_tau is not None else 1.0

    def log_likelihood(t: np.ndarray) -> np.ndarray:
        return x * t - n * np.logaddexp(0.0, t)

    def log_conditional(t: np.ndarray) -> np.ndarray:
        return log_likelihood(t) - 0.5 * tau * (t - mu) ** 2

    draws = []
    for burning, keep, adapt_now in _schedule(mcmc):
        proposal = theta + tuner.scale * gen.standard_normal(size)
        log_ratio = log_conditional(proposal) - log_conditional(theta)
        accepted = np.log(gen.random(size)) < log_ratio
        theta = np.where(accepted, proposal, theta)
        tuner.record(accepted.astype(float), burning)

        delta = float(shift_tuner.scale[0] * gen.standard_normal())
        log_ratio = float(np.sum(log_likelihood(theta + delta) - log_likelihood(theta)))
        log_ratio -= ((mu + delta - mu0) ** 2 - (mu - mu0) ** 2) / (2.0 * sigma2)
        shifted = math.log(gen.random()) < log_ratio
        if shifted:
            theta = theta + delta
            mu += delta
        shift_tuner.record(float(shifted), burning)

        precision = 1.0 / sigma2 + size * tau
        mean = (mu0 / sigma2 + tau * theta.sum()) / precision
        mu = mean + gen.standard_normal() / math.sqrt(precision)

        if mcmc.fix_tau is None:
            rate = spec.bhm_tau_rate + 0.5 * float(np.sum((theta - mu) ** 2))
            tau = float(sample_gamma(rng, spec.bhm_tau_shape + 0.5 * size, rate))

        if adapt_now:
            tuner.adapt()
            shift_tuner.adapt()
        if keep:
            draws.append(expit(theta))

    acceptance = {f"theta[{label}]": float(r) for label, r in zip(data.labels, tuner.rates)}
    acceptance["shift"] = float(shift_tuner.rates[0])
    _check_acceptance(spec.display_name, acceptance, mcmc)
    logger.debug("%s finished: acceptance=%s", spec.display_name, acceptance)
    return ChainOutput(draws=np.vstack(draws), acceptance=acceptance)


def fit_bhm(data: TrialData, spec: ModelSpec, mcmc: McmcConfig, rng: RngStream) -> PosteriorSummary:
    return summarize_chain(data, spec, sample_bhm(data, spec, mcmc, rng))
