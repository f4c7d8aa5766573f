import logging
import math

import numpy as np
from joblib import Parallel, delayed

from ebayes import utils
from ebayes.errors import DomainError
from ebayes.sieve_density.marginal import log_marginal_k
from ebayes.sieve_density.models import DensityData, SieveFit, SievePriorConfig

logger = logging.getLogger(__name__)


def poisson_log_weight(k: int, tau: float) -> float:
    """
    log w(k) = k·log τ − log k!.
    """
    return k * math.log(tau) - math.lgamma(k + 1.0)


def select_k_and_fit(
    data: DensityData,
    cfg: SievePriorConfig,
    rng: np.random.Generator,
    n_draws: int = 1000,
    n_jobs: int = 1,
) -> SieveFit:
    """
    Empirical Bayes choice of the truncation level and the posterior it induces.

    k̂ maximizes log w(k) + log_marginal_k over k ∈ {1, ..., min(n, k_max)}, ties toward the smaller k. Each k uses
    its own stream derived from one seed taken from ``rng``, so the fit does not depend on ``n_jobs``. Posterior
    draws come from the Laplace Gaussian at the mode of the k̂-th sieve.

    Args:
        data: A nonempty sample on [0, 1].
        cfg: Prior and numerical settings.
        rng: Random stream.
        n_draws: Posterior draws to attach.
        n_jobs: joblib workers over k.

    Returns:
        The SieveFit.

    Raises:
        DomainError: If the sample is empty.
        NumericError: If a mode search fails.
    """
    if data.n == 0:
        raise DomainError("select_k_and_fit needs a nonempty sample.")
    seed = int(rng.integers(2**62))
    levels = range(1, min(data.n, cfg.k_max) + 1)
    marginals = Parallel(n_jobs=n_jobs)(delayed(log_marginal_k)(data, k, cfg, utils.derive_rng(seed, k), False) for k in levels)

    log_scores = {m.k: poisson_log_weight(m.k, cfg.tau_pois) + m.estimate for m in marginals}
    k_hat = max(log_scores, key=lambda k: (log_scores[k], -k))
    best = marginals[k_hat - 1]
    logger.debug("sieve EB: n=%d k_hat=%d score=%.6g", data.n, k_hat, log_scores[k_hat])

    draw_rng = utils.derive_rng(seed, 0)
    draws = draw_rng.multivariate_normal(best.map_theta, best.cov, size=n_draws, method="cholesky") if n_draws else np.zeros((0, k_hat))
    return SieveFit(
        k_hat=k_hat,
        map_theta=best.map_theta,
        cov=best.cov,
        draws=draws,
        log_scores=log_scores,
        marginals=list(marginals),
        quad_nodes=max(cfg.quad_nodes, 1024),
    )
