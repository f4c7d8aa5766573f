import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from ebayes import utils
from ebayes.dists import LOG_SQRT_2PI, EllipticalLaplace, log_density_elliptical_laplace, sample_elliptical_laplace
from ebayes.errors import DomainError, PrecisionError

logger = logging.getLogger(__name__)

N_IS = 2000
PRIOR_SHARE = 0.2


@dataclass(slots=True)
class StructureMarginal:
    """
    Importance-sampling estimate of the marginal likelihood of one structure.

    Attributes:
        estimate: log ∫N(Y; X_Z B, I)·f(B)dB.
        se: Delta-method standard error of ``estimate``.
        ess: Effective sample size of the weights.
        post_mean: Posterior mean of B given the structure.
    """

    estimate: float
    se: float
    ess: float
    post_mean: np.ndarray


def log_marginal_structure(
    Y: np.ndarray,
    operator: np.ndarray,
    tau: float,
    n_is: int = N_IS,
    rng: np.random.Generator = None,
) -> StructureMarginal:
    """
    Log marginal likelihood of a structure under its elliptical Laplace prior.

    With G = X_ZᵀX_Z and B̂ the least-squares fit, the likelihood is
    N(Y; X_Z B, I) = (2π)^{−N/2}·exp(−RSS/2 − (B−B̂)ᵀG(B−B̂)/2). Draws come from the mixture
    (1−a)·N(B̂, G⁻¹) + a·f with a = 0.2 and fixed component counts; the weights use the mixture density, so the
    prior component keeps them bounded when τ is large and the posterior sits near the origin.

    Args:
        Y: Observation of length N.
        operator: The N×ℓ design X_Z.
        tau: Elliptical Laplace rate.
        n_is: Number of draws.
        rng: Random stream.

    Returns:
        The StructureMarginal.

    Raises:
        DomainError: If the shapes disagree or ``n_is < 20``.
        StructureError: If the operator is rank deficient.
        PrecisionError: If the effective sample size falls below n_is/20.
    """
    Y = np.asarray(Y, dtype=float)
    prior = EllipticalLaplace(operator, tau)
    M = prior.operator
    if Y.ndim != 1 or M.shape[0] != Y.size:
        raise DomainError(f"operator has {M.shape[0]} rows but Y has shape {Y.shape}.")
    if n_is < 20:
        raise DomainError(f"n_is must be at least 20, got {n_is}.")
    if rng is None:
        rng = np.random.default_rng()

    prior.inv_sqrt_gram()
    G = prior.gram
    ell = prior.ell
    with utils.linalg_guard("structure least squares"):
        B_hat = cho_solve(cho_factor(G, lower=True), M.T @ Y)
        L = np.linalg.cholesky(G)
    rss = float(np.sum((Y - M @ B_hat) ** 2))

    n_prior = int(round(PRIOR_SHARE * n_is))
    n_gauss = n_is - n_prior
    z = rng.standard_normal((n_gauss, ell))
    gauss_draws = B_hat + solve_triangular(L, z.T, lower=True, trans="T").T
    draws = np.vstack([gauss_draws, sample_elliptical_laplace(prior, rng, n_prior)])

    centred = (draws - B_hat) @ L
    quad = np.sum(centred**2, axis=1)
    log_gauss = -ell * LOG_SQRT_2PI + float(np.sum(np.log(np.diag(L)))) - 0.5 * quad
    log_prior = np.atleast_1d(log_density_elliptical_laplace(prior, draws))
    log_proposal = np.logaddexp(math.log1p(-PRIOR_SHARE) + log_gauss, math.log(PRIOR_SHARE) + log_prior)
    log_lik = -Y.size * LOG_SQRT_2PI - 0.5 * rss - 0.5 * quad

    log_w = log_lik + log_prior - log_proposal
    estimate, se, ess = utils.log_importance_estimate(log_w)
    normalized = np.exp(log_w - np.max(log_w))
    post_mean = normalized @ draws / normalized.sum()
    logger.debug("structure marginal: ell=%d estimate=%.6g se=%.3g ess=%.1f", ell, estimate, se, ess)
    if ess < n_is / 20.0:
        raise PrecisionError(f"importance sampling ESS {ess:.1f} is below {n_is / 20.0:.1f}.", estimate, se)
    return StructureMarginal(estimate=estimate, se=se, ess=ess, post_mean=post_mean)
