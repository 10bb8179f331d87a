"""Special functions and beta-distribution helpers."""
import logging
import math

import numpy as np
from scipy import optimize, special

from src.numcore.exceptions import DomainException, NonConvergenceException
from src.numcore.schemas import BetaParams

logger = logging.getLogger(__name__)

QUANTILE_TOLERANCE = 1e-9
QUANTILE_MAX_ITERATIONS = 2000
QUANTILE_XTOL = float(np.finfo(float).tiny)
QUANTILE_ULPS = 4


def _check_positive(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainException(f"{name} requires x > 0, got {x!r}")
    return x


def _check_probability(p: float, name: str, open_interval: bool = False) -> float:
    p = float(p)
    if open_interval:
        if not 0.0 < p < 1.0:
            raise DomainException(f"{name} requires a probability in (0, 1), got {p!r}")
    elif not 0.0 <= p <= 1.0:
        raise DomainException(f"{name} requires a probability in [0, 1], got {p!r}")
    return p


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    return float(special.gammaln(_check_positive(x, "log_gamma")))


def digamma(x: float) -> float:
    """Digamma (psi) function for x > 0."""
    return float(special.psi(_check_positive(x, "digamma")))


def log_beta(a: float, b: float) -> float:
    return float(special.betaln(_check_positive(a, "log_beta"), _check_positive(b, "log_beta")))


def beta_cdf(p: float, params: BetaParams) -> float:
    """Regularized incomplete beta I_p(alpha, beta)."""
    p = _check_probability(p, "beta_cdf")
    return float(special.betainc(params.alpha, params.beta, p))


def beta_sf(p: float, params: BetaParams) -> float:
    """Upper tail Pr(X > p), evaluated through the reflection I_{1-p}(beta, alpha)."""
    p = _check_probability(p, "beta_sf")
    return float(special.betainc(params.beta, params.alpha, 1.0 - p))


def _brackets(a: float, b: float, x: float, q: float) -> bool:
    """True when q lies between the CDF values a few ulps either side of x."""
    step = QUANTILE_ULPS * float(np.spacing(x))
    lo = max(0.0, x - step)
    hi = min(1.0, x + step)
    return (
        special.betainc(a, b, lo) - QUANTILE_TOLERANCE
        <= q
        <= special.betainc(a, b, hi) + QUANTILE_TOLERANCE
    )


def _converged(a: float, b: float, x: float, q: float) -> bool:
    if not (math.isfinite(x) and 0.0 <= x <= 1.0):
        return False
    return abs(special.betainc(a, b, x) - q) <= QUANTILE_TOLERANCE or _brackets(a, b, x, q)


def beta_quantile(q: float, params: BetaParams) -> float:
    """
    Inverse of beta_cdf.

    A candidate x is accepted when its CDF is within QUANTILE_TOLERANCE of q,
    or when q lies between the CDF values at the neighbouring doubles of x.
    The second test covers quantiles that underflow to 0 or sit where the
    CDF jumps by more than the tolerance between adjacent doubles.
    The library inverse is tried first; otherwise a bracketed root search on
    [0, 1] is run.
    """
    q = _check_probability(q, "beta_quantile", open_interval=True)
    a, b = params.alpha, params.beta

    x = float(special.betaincinv(a, b, q))
    if _converged(a, b, x, q):
        return x

    logger.debug("betaincinv inaccurate for Beta(%g, %g) at q=%g; bracketing", a, b, q)
    try:
        x, result = optimize.brentq(
            lambda t: special.betainc(a, b, t) - q,
            0.0,
            1.0,
            xtol=QUANTILE_XTOL,
            maxiter=QUANTILE_MAX_ITERATIONS,
            full_output=True,
            disp=False,
        )
    except ValueError as exc:
        raise NonConvergenceException(
            f"beta_quantile failed for Beta({a}, {b}) at q={q}: {exc}"
        ) from exc

    if not _converged(a, b, x, q):
        residual = abs(special.betainc(a, b, x) - q)
        raise NonConvergenceException(
            f"beta_quantile did not converge for Beta({a}, {b}) at q={q}: "
            f"iterations={result.iterations}, last={x}, residual={residual:.3e}"
        )
    return float(x)


def beta_summary(alpha: np.ndarray, beta: np.ndarray, threshold: float, level: float = 0.95):
    """
    Vectorised posterior summary of independent beta posteriors.

    Returns (mean, sd, lower, upper, pr_above_threshold) arrays.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(alpha <= 0) or np.any(beta <= 0):
        raise DomainException("beta_summary requires positive shape parameters")
    # 0.025 exactly for level 0.95
    tail = round((1.0 - level) / 2.0, 12)
    total = alpha + beta
    mean = alpha / total
    sd = np.sqrt(alpha * beta / (total * total * (total + 1.0)))
    lower = np.array([beta_quantile(tail, BetaParams(alpha=a, beta=b)) for a, b in zip(alpha, beta)])
    upper = np.array([beta_quantile(1.0 - tail, BetaParams(alpha=a, beta=b)) for a, b in zip(alpha, beta)])
    pr_above = special.betainc(beta, alpha, 1.0 - threshold)
    return mean, sd, lower, upper, pr_above


def logit(p):
    return special.logit(p)


def expit(x):
    return special.expit(x)
