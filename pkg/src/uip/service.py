"""Unit-information priors: weighted moments of the other types' data mapped to beta priors."""
import logging
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from src.divergence.schemas import WeightVector
from src.numcore.exceptions import DomainException
from src.numcore.schemas import BetaParams
from src.uip.exceptions import DegenerateWeightsException, MomentInfeasibleException
from src.uip.schemas import DEFAULT_CLAMP_RATE, EffectiveSampleSize, TrialData, UipConfig, UipPrior

logger = logging.getLogger(__name__)

Weights = Union[WeightVector, np.ndarray]


def _as_matrix(weights: Weights) -> np.ndarray:
    return weights.matrix if isinstance(weights, WeightVector) else np.asarray(weights, dtype=float)


def unit_information(rate: float) -> float:
    """Fisher information of a single Bernoulli observation, 1 / (rate (1 - rate))."""
    rate = float(rate)
    if not 0.0 < rate < 1.0:
        raise DomainException(f"unit_information requires a rate in (0, 1), got {rate!r}; clamp first")
    return 1.0 / (rate * (1.0 - rate))


def clamp_rate(mle, clamp: float = DEFAULT_CLAMP_RATE):
    """Clamp response rates to [clamp, 1 - clamp]. Accepts scalars or arrays."""
    clamped = np.clip(mle, clamp, 1.0 - clamp)
    return float(clamped) if np.ndim(clamped) == 0 else clamped


def prior_mean(weights: Weights, mles: Sequence[float], i: int) -> float:
    """Weighted mean of the other types' observed rates, weights renormalised over j != i."""
    row = _as_matrix(weights)[i].copy()
    row[i] = 0.0
    total = row.sum()
    if total <= 0.0:
        raise DegenerateWeightsException(f"all weights w_{i}j are zero")
    return float(row @ np.asarray(mles, dtype=float) / total)


def prior_variance(
    weights: Weights,
    mles: Sequence[float],
    M: float,
    i: int,
    clamp: float = DEFAULT_CLAMP_RATE,
) -> float:
    """eta_i^2 = 1 / (M * sum_{j != i} w_ij UI(clamp(mle_j)))."""
    if not M > 0:
        raise DomainException(f"M must be positive, got {M!r}")
    row = _as_matrix(weights)[i].copy()
    row[i] = 0.0
    ui = 1.0 / _ui_denominator(clamp_rate(np.asarray(mles, dtype=float), clamp))
    information = M * float(row @ ui)
    if information <= 0.0:
        raise DegenerateWeightsException(f"all weights w_{i}j are zero")
    return 1.0 / information


def _ui_denominator(rates: np.ndarray) -> np.ndarray:
    return rates * (1.0 - rates)


def beta_from_moments(mu: float, eta2: float) -> BetaParams:
    """Beta(alpha, beta) with mean mu and variance eta2."""
    if not eta2 > 0:
        raise DomainException(f"variance must be positive, got {eta2!r}")
    k = mu * (1.0 - mu) / eta2 - 1.0
    if not 0.0 < mu < 1.0 or k <= 0.0:
        raise MomentInfeasibleException(mu, eta2)
    return BetaParams(alpha=mu * k, beta=(1.0 - mu) * k)


class PriorArrays(NamedTuple):
    alpha: np.ndarray
    beta: np.ndarray
    mu: np.ndarray
    eta2: np.ndarray
    fallback: np.ndarray


def effective_weights(weights: np.ndarray, active: np.ndarray) -> np.ndarray:
    """
    Drop borrowing from empty types and renormalise the rest to total one.

    Column j is zeroed when type j enrolled nobody. The result is no longer
    symmetric and is only used to build priors.
    """
    w = np.where(active[None, :], weights, 0.0)
    np.fill_diagonal(w, 0.0)
    total = w.sum()
    return w / total if total > 0 else w


def prior_arrays(
    weights: np.ndarray,
    mles: np.ndarray,
    active: np.ndarray,
    M: float,
    clamp: float = DEFAULT_CLAMP_RATE,
) -> PriorArrays:
    """
    Vectorised prior construction for all types at once.

    Rows with no usable weight, or whose moments admit no beta distribution,
    get Beta(1, 1) and are flagged in `fallback`.
    """
    w = weights if active.all() else effective_weights(weights, active)
    row_sum = w.sum(axis=1) - np.diag(w)
    usable = row_sum > 0.0

    safe_sum = np.where(usable, row_sum, 1.0)
    mu = (w @ mles - np.diag(w) * mles) / safe_sum
    ui = 1.0 / _ui_denominator(np.clip(mles, clamp, 1.0 - clamp))
    information = M * (w @ ui - np.diag(w) * ui)
    with np.errstate(divide="ignore"):
        eta2 = np.where(usable, 1.0 / information, np.inf)

    k = mu * (1.0 - mu) / eta2 - 1.0
    feasible = usable & (mu > 0.0) & (mu < 1.0) & (k > 0.0)
    alpha = np.where(feasible, mu * k, 1.0)
    beta = np.where(feasible, (1.0 - mu) * k, 1.0)
    return PriorArrays(alpha=alpha, beta=beta, mu=mu, eta2=eta2, fallback=~feasible)


def build_uip_prior(data: TrialData, weights: WeightVector, config: UipConfig) -> UipPrior:
    """Unit-information priors for every type from the observed data and fixed weights."""
    if weights.size != data.size:
        raise DomainException(f"weights are {weights.size}x{weights.size} but data has {data.size} types")
    arrays = prior_arrays(weights.matrix, data.mles, data.active, config.M, config.clamp_rate)

    warnings = []
    for i in np.flatnonzero(arrays.fallback):
        label = data.labels[i]
        if not np.isfinite(arrays.eta2[i]):
            msg = f"{label}: no enrolled type to borrow from; using Beta(1, 1)"
        else:
            msg = (
                f"{label}: moments mu={arrays.mu[i]:.6g}, eta2={arrays.eta2[i]:.6g} "
                f"admit no beta prior; using Beta(1, 1)"
            )
        logger.warning(msg)
        warnings.append(msg)

    return UipPrior(
        params=[BetaParams(alpha=a, beta=b) for a, b in zip(arrays.alpha, arrays.beta)],
        mu=arrays.mu.tolist(),
        eta2=arrays.eta2.tolist(),
        fallback=arrays.fallback.tolist(),
        warnings=warnings,
    )


def effective_sample_size(
    n_i: int,
    weights: Weights,
    M: float,
    i: int,
    prior: Optional[BetaParams] = None,
) -> EffectiveSampleSize:
    """
    Posterior ESS of type i.

    `exact` is n_i + alpha_i + beta_i and needs the prior; `approximate` is
    n_i + M * sum_{l != i} w_il - 1, which equals `exact` when all rates agree.
    """
    row = _as_matrix(weights)[i].copy()
    row[i] = 0.0
    approximate = n_i + M * float(row.sum()) - 1.0
    exact = None if prior is None else n_i + prior.alpha + prior.beta
    return EffectiveSampleSize(exact=exact, approximate=approximate)
