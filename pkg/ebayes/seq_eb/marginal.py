import logging
from typing import Callable

import numpy as np
from scipy.stats import norm

from ebayes import dists
from ebayes.errors import DomainError
from ebayes.seq_eb.models import SequenceData, SpikeSlabConfig

logger = logging.getLogger(__name__)


def check_lambda(lam: float) -> float:
    if not (np.isfinite(lam) and 0.0 <= lam <= 1.0):
        raise DomainError(f"lambda must lie in [0, 1], got {lam!r}.")
    return float(lam)


def log_mixture_terms(log_phi: np.ndarray, log_m: np.ndarray, lam: float) -> np.ndarray:
    """
    Per-coordinate log[(1−λ)φ(y_j) + λ·m(y_j)] given the two log densities.
    """
    with np.errstate(divide="ignore"):
        spike = np.log1p(-lam) + log_phi
        slab = np.log(lam) + log_m
    return np.logaddexp(spike, slab)


def sequence_objective(data: SequenceData, cfg: SpikeSlabConfig) -> Callable[[float], float]:
    """
    Builds λ ↦ log_marginal_lambda(data, λ, cfg) with the per-coordinate densities computed once.
    """
    log_phi = norm.logpdf(data.y)
    log_m = dists.log_gauss_laplace_marginal(data.y, cfg.tau)

    def objective(lam: float) -> float:
        lam = check_lambda(lam)
        log_w = cfg.log_weight(lam)
        if log_w == -np.inf:
            return -np.inf
        return log_w + float(np.sum(log_mixture_terms(log_phi, log_m, lam)))

    return objective


def log_marginal_lambda(data: SequenceData, lam: float, cfg: SpikeSlabConfig) -> float:
    """
    Weighted log marginal likelihood log w(λ) + Σ_j log[(1−λ)φ(y_j) + λ·m(y_j)].

    Args:
        data: The observation.
        lam: Mixing weight of the slab, in [0, 1].
        cfg: Weight exponents and slab rate.

    Returns:
        The objective value (``-inf`` at an endpoint where the weight vanishes).

    Raises:
        DomainError: If ``lam`` is outside [0, 1].
    """
    return sequence_objective(data, cfg)(lam)
