import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ebayes.errors import DomainError


@dataclass(slots=True)
class SpikeSlabConfig:
    """
    Hyperprior of the sparse priors: beta weight w(λ) = λ^{α−1}(1−λ)^{β−1} and Laplace slab rate τ.

    Attributes:
        alpha: First exponent of the weight.
        beta: Second exponent of the weight.
        tau: Slab rate.
    """

    alpha: float = 1.0
    beta: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "tau"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive real, got {value!r}.")

    def log_weight(self, lam: float) -> float:
        """
        log w(λ), with 0·log 0 = 0 for a unit exponent and −∞ otherwise at the endpoints.
        """
        if not 0.0 <= lam <= 1.0:
            raise DomainError(f"lambda must lie in [0, 1], got {lam!r}.")
        out = 0.0
        for exponent, base in ((self.alpha - 1.0, lam), (self.beta - 1.0, 1.0 - lam)):
            if exponent == 0.0:
                continue
            if base == 0.0:
                return -math.inf
            out += exponent * math.log(base)
        return out


@dataclass(slots=True, eq=False)
class SequenceData:
    """
    Observation Y ~ N(θ*, I_p) of the Gaussian sequence model.

    Attributes:
        y: The length-p observation vector.
    """

    y: np.ndarray

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.y.size < 1:
            raise DomainError("y must hold at least one coordinate.")
        if not np.all(np.isfinite(self.y)):
            raise DomainError("y must be finite.")

    @property
    def p(self) -> int:
        return int(self.y.size)


@dataclass(slots=True, eq=False)
class EBFit:
    """
    Empirical Bayes posterior of the sequence model at the selected hyperparameter.

    Attributes:
        lambda_hat: Maximizer of the weighted marginal likelihood.
        log_marginal_at_hat: Objective value at ``lambda_hat``.
        inclusion_prob: Per-coordinate posterior probability of the slab.
        post_mean: Per-coordinate posterior mean.
        draws: Optional posterior draws, one row per draw.
    """

    lambda_hat: float
    log_marginal_at_hat: float
    inclusion_prob: np.ndarray
    post_mean: np.ndarray
    draws: Optional[np.ndarray] = None
