from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ebayes.decomp.models import Support
from ebayes.errors import DomainError


@dataclass(slots=True, eq=False)
class RegressionData:
    """
    Observation Y ~ N(Xθ*, I_n) of the sparse regression model.

    Attributes:
        Y: Response of length n.
        X: The n×p design.
    """

    Y: np.ndarray
    X: np.ndarray

    def __post_init__(self):
        self.Y = np.asarray(self.Y, dtype=float).ravel()
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        if self.X.shape[0] != self.Y.size:
            raise DomainError(f"X has {self.X.shape[0]} rows but Y has {self.Y.size} entries.")
        if not (np.all(np.isfinite(self.Y)) and np.all(np.isfinite(self.X))):
            raise DomainError("Y and X must be finite.")

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def p(self) -> int:
        return int(self.X.shape[1])


@dataclass(slots=True, eq=False)
class SupportMarginal:
    """
    Marginal likelihood of one support under its Laplace slab.

    Attributes:
        log_marginal: log ∫N(Y; X_Sθ_S, I)·Π_{j∈S}(τ/2)e^{−τ|θ_j|}dθ_S.
        se: Standard error of ``log_marginal`` (quadrature disagreement or Monte Carlo error).
        post_mean: Posterior mean of θ_S given S.
        method: One of "empty", "diagonal", "quadrature", "importance".
        ess: Effective sample size for "importance", ``None`` otherwise.
    """

    log_marginal: float
    se: float
    post_mean: np.ndarray
    method: str
    ess: float | None = None


@dataclass(slots=True, eq=False)
class RegressionEBFit:
    """
    Empirical Bayes posterior of the sparse regression model.

    Attributes:
        lambda_hat: Maximizer of the weighted marginal likelihood over the enumerated supports.
        log_marginal_at_hat: Objective at ``lambda_hat``.
        support_posterior: (support, probability) pairs sorted by decreasing probability.
        s_max: Largest enumerated support size.
        truncation_mass: ν_λ̂ mass of the supports larger than ``s_max``.
        post_mean: Posterior mean of θ at ``lambda_hat``.
        tau: Slab rate used.
        n_skipped: Rank-deficient supports left out of the enumeration.
    """

    lambda_hat: float
    log_marginal_at_hat: float
    support_posterior: List[Tuple[Support, float]]
    s_max: int
    truncation_mass: float
    post_mean: np.ndarray
    tau: float
    n_skipped: int = 0

    @property
    def top_support(self) -> Support:
        return self.support_posterior[0][0]
