import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp, xlogy
from scipy.stats import binom

from ebayes import utils
from ebayes.decomp.models import Support, iter_supports
from ebayes.errors import CapabilityError, DomainError, StructureError
from ebayes.reg_eb.marginal import N_IS, log_marginal_support
from ebayes.reg_eb.models import RegressionData, RegressionEBFit, SupportMarginal
from ebayes.seq_eb.models import SpikeSlabConfig

logger = logging.getLogger(__name__)

ENUMERATION_BUDGET = 10**6
N_GRID = 512
TOLERANCE = 1e-8


def regression_tau(X: np.ndarray, zeta: float = 1.0) -> float:
    """
    Slab rate τ = p^{−ζ}·‖X‖ with ‖X‖ the largest column norm.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return float(X.shape[1] ** (-zeta) * np.max(np.linalg.norm(X, axis=0)))


def enumeration_size(p: int, s_max: int) -> int:
    return sum(math.comb(p, s) for s in range(min(p, s_max) + 1))


def enumerate_support_marginals(
    data: RegressionData,
    tau: float,
    s_max: int,
    seed: int = 0,
    n_is: int = N_IS,
) -> Tuple[Dict[Support, SupportMarginal], int]:
    """
    Marginal likelihoods of every support of size at most ``s_max``.

    Each support that needs importance sampling draws from its own stream derived from ``(seed, support)``, so the
    result does not depend on the enumeration order.

    Returns:
        The marginals keyed by support, and the number of rank-deficient supports left out.

    Raises:
        CapabilityError: If more than 10^6 supports would be enumerated.
    """
    if s_max < 0:
        raise DomainError(f"s_max must be nonnegative, got {s_max}.")
    total = enumeration_size(data.p, s_max)
    if total > ENUMERATION_BUDGET:
        raise CapabilityError(f"{total} supports exceed the enumeration budget of {ENUMERATION_BUDGET}.")

    marginals: Dict[Support, SupportMarginal] = {}
    skipped = 0
    for S in iter_supports(data.p, s_max):
        rng = utils.derive_rng(seed, utils.stable_seed("support", S.indices))
        try:
            marginals[S] = log_marginal_support(data, S, tau, rng=rng, n_is=n_is)
        except StructureError:
            skipped += 1
    if skipped:
        logger.warning("left %d rank-deficient supports out of the enumeration", skipped)
    return marginals, skipped


def _size_totals(marginals: Dict[Support, SupportMarginal], p: int) -> np.ndarray:
    by_size: List[List[float]] = [[] for _ in range(p + 1)]
    for S, m in marginals.items():
        by_size[S.size].append(m.log_marginal)
    return np.array([logsumexp(values) if values else -np.inf for values in by_size])


def _log_nu(sizes: np.ndarray, p: int, lam: float) -> np.ndarray:
    return xlogy(p - sizes, 1.0 - lam) + xlogy(sizes, lam)


def support_posterior(marginals: Dict[Support, SupportMarginal], p: int, lam: float) -> List[Tuple[Support, float]]:
    """
    Posterior over the enumerated supports at a fixed λ, sorted by decreasing probability.
    """
    supports = list(marginals)
    sizes = np.array([S.size for S in supports])
    with np.errstate(divide="ignore"):
        log_post = _log_nu(sizes, p, lam) + np.array([marginals[S].log_marginal for S in supports])
    probs = np.exp(log_post - logsumexp(log_post))
    order = sorted(range(len(supports)), key=lambda i: (-probs[i], supports[i].size, supports[i].indices))
    return [(supports[i], float(probs[i])) for i in order]


def mmle_regression(
    data: RegressionData,
    cfg: SpikeSlabConfig,
    s_max: int,
    seed: int = 0,
    n_is: int = N_IS,
) -> RegressionEBFit:
    """
    Maximum marginal likelihood estimate of λ for sparse regression over an enumerated support set.

    The marginal likelihood at λ is the logsumexp over supports of log ν_λ(S) + log_marginal_support(S); since ν_λ
    depends on |S| only, support marginals are pooled by size once and the λ search costs O(p) per evaluation.

    Args:
        data: The regression data.
        cfg: Weight exponents and slab rate τ (see :func:`regression_tau`).
        s_max: Largest support size enumerated.
        seed: Seed of the per-support importance-sampling streams.
        n_is: Importance sample size for supports larger than three.

    Returns:
        The fitted RegressionEBFit.

    Raises:
        CapabilityError: If the enumeration exceeds 10^6 supports.
    """
    p = data.p
    marginals, skipped = enumerate_support_marginals(data, cfg.tau, s_max, seed, n_is)
    totals = _size_totals(marginals, p)
    sizes = np.arange(p + 1)

    def objective(lam: float) -> float:
        log_w = cfg.log_weight(lam)
        if log_w == -np.inf:
            return -np.inf
        with np.errstate(divide="ignore"):
            return log_w + float(logsumexp(_log_nu(sizes, p, lam) + totals))

    lambda_hat, value = utils.maximize_unit_interval(objective, N_GRID, TOLERANCE)
    posterior = support_posterior(marginals, p, lambda_hat)

    post_mean = np.zeros(p)
    for S, prob in posterior:
        if S.size:
            post_mean[list(S.indices)] += prob * marginals[S].post_mean

    top = min(p, s_max)
    truncation = float(binom.sf(top, p, lambda_hat)) if top < p else 0.0
    logger.debug("regression MMLE: lambda_hat=%.6g top support=%s (%.3f)", lambda_hat, posterior[0][0].indices, posterior[0][1])
    return RegressionEBFit(
        lambda_hat=lambda_hat,
        log_marginal_at_hat=value,
        support_posterior=posterior,
        s_max=s_max,
        truncation_mass=truncation,
        post_mean=post_mean,
        tau=cfg.tau,
        n_skipped=skipped,
    )
