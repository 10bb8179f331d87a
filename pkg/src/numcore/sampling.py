"""Samplers drawing from an RngStream with parameter validation."""
from typing import Optional, Sequence, Union

import numpy as np

from src.numcore.exceptions import InvalidParameterException
from src.numcore.schemas import BetaParams
from src.numcore.streams import RngStream

Size = Optional[Union[int, tuple]]

SIMPLEX_TOLERANCE = 1e-9


def sample_beta(rng: RngStream, params: BetaParams, size: Size = None):
    return rng.generator.beta(params.alpha, params.beta, size=size)


def sample_gamma(rng: RngStream, shape: float, rate: float, size: Size = None):
    """Gamma draws parameterised by shape and rate (inverse scale)."""
    if shape <= 0 or rate <= 0:
        raise InvalidParameterException(f"gamma requires shape > 0 and rate > 0, got ({shape}, {rate})")
    return rng.generator.gamma(shape, 1.0 / rate, size=size)


def sample_dirichlet(rng: RngStream, concentration: Sequence[float], size: Size = None):
    concentration = np.asarray(concentration, dtype=float)
    if concentration.ndim != 1 or concentration.size < 2:
        raise InvalidParameterException("dirichlet requires a concentration vector of length >= 2")
    if np.any(~np.isfinite(concentration)) or np.any(concentration <= 0):
        raise InvalidParameterException("dirichlet concentrations must be positive")
    return rng.generator.dirichlet(concentration, size=size)


def sample_binomial(rng: RngStream, n, p, size: Size = None):
    n_arr = np.asarray(n)
    p_arr = np.asarray(p, dtype=float)
    if np.any(n_arr < 0):
        raise InvalidParameterException("binomial requires n >= 0")
    if np.any((p_arr < 0) | (p_arr > 1)):
        raise InvalidParameterException("binomial requires p in [0, 1]")
    return rng.generator.binomial(n_arr, p_arr, size=size)


def sample_multinomial(rng: RngStream, n: int, probabilities: Sequence[float], size: Size = None):
    probs = np.asarray(probabilities, dtype=float)
    if n < 0:
        raise InvalidParameterException("multinomial requires n >= 0")
    if probs.ndim != 1 or np.any(probs < 0):
        raise InvalidParameterException("multinomial probabilities must be a non-negative vector")
    if abs(probs.sum() - 1.0) > SIMPLEX_TOLERANCE:
        raise InvalidParameterException(f"multinomial probabilities must sum to 1, got {probs.sum()}")
    return rng.generator.multinomial(n, probs, size=size)
