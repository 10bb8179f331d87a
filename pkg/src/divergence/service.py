"""Divergences between beta posteriors and the borrowing weights built from them."""
import logging
import math
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np
from scipy import integrate, special

from src.divergence.exceptions import InvalidWeightsException, QuadratureException
from src.divergence.schemas import DivergenceMatrix, WeightVector
from src.numcore.exceptions import InvalidParameterException
from src.numcore.schemas import BetaParams

logger = logging.getLogger(__name__)

Counts = Tuple[int, int]

QUAD_EPS = 1e-10
QUAD_LIMIT = 200
QUAD_ABS_TOL = 1e-7


def _check_counts(data: Counts) -> Tuple[int, int]:
    n, x = (int(v) for v in data)
    if n < 0 or not 0 <= x <= n:
        raise InvalidParameterException(f"counts must satisfy 0 <= x <= n, got n={n}, x={x}")
    return n, x


def _posterior(data: Counts) -> BetaParams:
    n, x = _check_counts(data)
    return BetaParams.from_counts(n, x)


def _log_pdf(t, prm: BetaParams):
    return (
        special.xlogy(prm.alpha - 1.0, t)
        + special.xlog1py(prm.beta - 1.0, -t)
        - special.betaln(prm.alpha, prm.beta)
    )


def _kl_closed_form(a1, b1, a2, b2):
    """Vectorised KL(Beta(a1, b1) || Beta(a2, b2))."""
    return (
        special.betaln(a2, b2)
        - special.betaln(a1, b1)
        + (a1 - a2) * special.psi(a1)
        + (b1 - b2) * special.psi(b1)
        + (a2 - a1 + b2 - b1) * special.psi(a1 + b1)
    )


def kl_beta(p: BetaParams, q: BetaParams) -> float:
    """Kullback-Leibler divergence KL(p || q) between two beta densities."""
    value = float(_kl_closed_form(p.alpha, p.beta, q.alpha, q.beta))
    # rounding can leave -1e-17 for identical arguments
    return max(value, 0.0)


def _quad(func, a: float, b: float, points=None, epsabs: float = 1.49e-8, epsrel: float = 1.49e-8) -> float:
    result = integrate.quad(
        func, a, b, limit=QUAD_LIMIT, points=points, epsabs=epsabs, epsrel=epsrel, full_output=1
    )
    value, abserr = result[0], result[1]
    if len(result) == 4 and abserr > QUAD_ABS_TOL * max(1.0, abs(value)):
        raise QuadratureException(f"quadrature failed ({result[3]}); estimate={value}, abserr={abserr:.2e}")
    if not math.isfinite(value):
        raise QuadratureException(f"quadrature returned a non-finite value: {value}")
    return float(value)


def _interior_points(*params: BetaParams):
    pts = set()
    for prm in params:
        m = prm.mean
        if QUAD_EPS < m < 1.0 - QUAD_EPS:
            pts.add(m)
    return sorted(pts) or None


def kl_beta_numeric(p: BetaParams, q: BetaParams) -> float:
    """KL(p || q) by adaptive quadrature; the check for the closed form."""
    def integrand(t):
        lp = _log_pdf(t, p)
        return math.exp(lp) * (lp - _log_pdf(t, q))

    return _quad(integrand, 0.0, 1.0, points=_interior_points(p, q), epsabs=1e-12, epsrel=1e-11)


def jeffreys_divergence(data_i: Counts, data_j: Counts) -> float:
    """
    Symmetrised KL between the Beta(1 + x, 1 + n - x) posteriors of two arms.

    d_ij = (KL(f_i || f_j) + KL(f_j || f_i)) / 2
    """
    f_i, f_j = _posterior(data_i), _posterior(data_j)
    return 0.5 * (kl_beta(f_i, f_j) + kl_beta(f_j, f_i))


def divergence_array(n: Sequence[int], x: Sequence[int]) -> np.ndarray:
    """
    I x I symmetrised-KL divergences for per-type counts.

    A type with n_i = 0 is represented by its Beta(1, 1) posterior.
    """
    n = np.asarray(n, dtype=float)
    x = np.asarray(x, dtype=float)
    if n.shape != x.shape or n.ndim != 1:
        raise InvalidParameterException("n and x must be one-dimensional and of equal length")
    if np.any(n < 0) or np.any(x < 0) or np.any(x > n):
        raise InvalidParameterException("counts must satisfy 0 <= x <= n")
    a = 1.0 + x
    b = 1.0 + n - x
    kl = _kl_closed_form(a[:, None], b[:, None], a[None, :], b[None, :])
    kl = np.maximum(kl, 0.0)
    d = 0.5 * (kl + kl.T)
    np.fill_diagonal(d, 0.0)
    return d


def divergence_matrix(n: Sequence[int], x: Sequence[int]) -> DivergenceMatrix:
    return DivergenceMatrix.from_array(divergence_array(n, x))


def softmax_weights(d: np.ndarray, s: float, mask: np.ndarray | None = None) -> np.ndarray:
    """
    exp(-d_ij / s) normalised over the off-diagonal (optionally masked) entries.

    The largest exponent is subtracted first, so s down to 1e-6 and below stays
    finite. Returns a plain array.
    """
    if not s > 0 or not math.isfinite(s):
        raise InvalidParameterException(f"temperature s must be positive and finite, got {s!r}")
    d = np.asarray(d, dtype=float)
    size = d.shape[0]
    off = ~np.eye(size, dtype=bool)
    if mask is not None:
        off &= mask
    if not off.any():
        raise InvalidWeightsException("no pair is available for borrowing")
    logits = np.where(off, -d / s, -np.inf)
    logits -= logits[off].max()
    w = np.where(off, np.exp(logits), 0.0)
    return w / w.sum()


def weights_from_divergence(d: Union[DivergenceMatrix, np.ndarray], s: float = 1.0) -> WeightVector:
    """Borrowing weights w_ij proportional to exp(-d_ij / s); s = 1 is the fixed transform."""
    arr = d.matrix if isinstance(d, DivergenceMatrix) else np.asarray(d, dtype=float)
    return WeightVector.from_array(softmax_weights(arr, s))


@lru_cache(maxsize=65536)
def _js_similarity_cached(n_i: int, x_i: int, n_j: int, x_j: int) -> float:
    f_i = BetaParams.from_counts(n_i, x_i)
    f_j = BetaParams.from_counts(n_j, x_j)
    def integrand(t):
        p = math.exp(_log_pdf(t, f_i))
        q = math.exp(_log_pdf(t, f_j))
        m = 0.5 * (p + q)
        return 0.5 * (special.rel_entr(p, m) + special.rel_entr(q, m))

    jsd = _quad(integrand, QUAD_EPS, 1.0 - QUAD_EPS, points=_interior_points(f_i, f_j)) / math.log(2.0)
    return 1.0 - min(max(jsd, 0.0), 1.0)


def js_mixture_similarity(data_i: Counts, data_j: Counts) -> float:
    """
    1 - JSD between the two arms' Beta(1 + x, 1 + n - x) posteriors.

    JSD is the mixture Jensen-Shannon divergence with base-2 logarithm, so the
    similarity lies in [0, 1] and equals 1 for identical data.
    """
    key_i, key_j = _check_counts(data_i), _check_counts(data_j)
    if key_i == key_j:
        return 1.0
    # argument order does not matter; cache on the sorted pair
    lo, hi = sorted((key_i, key_j))
    return _js_similarity_cached(*lo, *hi)


def similarity_array(n: Sequence[int], x: Sequence[int]) -> np.ndarray:
    """Pairwise mixture-JSD similarities with a unit diagonal."""
    n = [int(v) for v in n]
    x = [int(v) for v in x]
    size = len(n)
    sim = np.eye(size)
    for i in range(size):
        for j in range(i + 1, size):
            sim[i, j] = sim[j, i] = js_mixture_similarity((n[i], x[i]), (n[j], x[j]))
    return sim
