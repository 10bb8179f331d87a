"""
Model catalogue: the six inference engines and their defaults.
"""

from enum import Enum
from typing import List


class ModelKind(str, Enum):
    """Supported basket-trial models"""
    BBM_NB = "BBM-NB"
    BBM_JS = "BBM-JS"
    BHM = "BHM"
    BUPD_D = "BUPD-D"
    BUPD_JS = "BUPD-JS"
    BUPD_JSH = "BUPD-JSH"


class ModelKindInfo:
    """Descriptions and structural properties of each model"""

    DESCRIPTIONS = {
        ModelKind.BBM_NB: "Independent beta-binomial, no borrowing",
        ModelKind.BBM_JS: "Beta-binomial borrowing gated by Jensen-Shannon similarity",
        ModelKind.BHM: "Bayesian hierarchical model on the logit scale",
        ModelKind.BUPD_D: "Unit-information prior, Dirichlet hyper-prior on weights",
        ModelKind.BUPD_JS: "Unit-information prior, divergence weights with s = 1",
        ModelKind.BUPD_JSH: "Unit-information prior, divergence weights with gamma hyper-prior on s",
    }

    SAMPLERS = {ModelKind.BHM, ModelKind.BUPD_D, ModelKind.BUPD_JSH}

    # Reported quantities: M * w_ij matrix, posterior mean of M, of s
    REPORTS_WEIGHTS = {ModelKind.BUPD_D, ModelKind.BUPD_JS, ModelKind.BUPD_JSH}


# Sampler acceptance-rate window checked after burn-in
MIN_ACCEPTANCE = 0.05
MAX_ACCEPTANCE = 0.95

# Burn-in adaptation aims for acceptance inside this band
TARGET_ACCEPTANCE_LOW = 0.20
TARGET_ACCEPTANCE_HIGH = 0.50

# Dirichlet proposal z' ~ Dirichlet(kappa * z + offset)
DIRICHLET_PROPOSAL_OFFSET = 1e-3

# pi is kept away from 0 and 1 before evaluating log densities
PI_FLOOR = 1e-12

CREDIBLE_LEVEL = 0.95


def get_model_kinds() -> List[ModelKind]:
    return list(ModelKind)


def get_model_description(kind: ModelKind) -> str:
    return ModelKindInfo.DESCRIPTIONS.get(kind, "")


def is_sampler(kind: ModelKind) -> bool:
    """True for models fitted by Markov chain Monte Carlo"""
    return kind in ModelKindInfo.SAMPLERS


def reports_weights(kind: ModelKind) -> bool:
    return kind in ModelKindInfo.REPORTS_WEIGHTS


def is_valid_model_kind(kind: str) -> bool:
    try:
        ModelKind(kind)
        return True
    except ValueError:
        return False
