import logging
from typing import Optional

import numpy as np

from ebayes import utils
from ebayes.errors import DomainError
from ebayes.seq_eb import marginal, models, posterior
from ebayes.seq_eb.marginal import log_marginal_lambda, sequence_objective
from ebayes.seq_eb.models import EBFit, SequenceData, SpikeSlabConfig
from ebayes.seq_eb.posterior import (
    posterior_inclusion,
    posterior_mean_coordinate,
    posterior_risk,
    posterior_second_moment_coordinate,
    sample_posterior,
)

logger = logging.getLogger(__name__)

N_GRID = 512
TOLERANCE = 1e-8


def mmle(
    data: SequenceData,
    cfg: SpikeSlabConfig,
    n_draws: int = 0,
    rng: Optional[np.random.Generator] = None,
) -> EBFit:
    """
    Maximum marginal likelihood estimate of λ for the sequence model and the posterior it induces.

    λ̂ maximizes :func:`log_marginal_lambda` over [0, 1]: a 512-point grid finds the best cell, golden-section search
    refines it to 1e−8, ties go to the smaller λ.

    Args:
        data: The observation.
        cfg: Weight exponents and slab rate.
        n_draws: Posterior draws to attach (0 for none).
        rng: Random stream, required when ``n_draws > 0``.

    Returns:
        The fitted EBFit.
    """
    objective = sequence_objective(data, cfg)
    lambda_hat, value = utils.maximize_unit_interval(objective, N_GRID, TOLERANCE)
    logger.debug("sequence MMLE: p=%d lambda_hat=%.6g objective=%.6g", data.p, lambda_hat, value)

    draws = None
    if n_draws:
        if rng is None:
            raise DomainError("rng is required to draw from the posterior.")
        draws = sample_posterior(data, lambda_hat, cfg.tau, n_draws, rng)

    return EBFit(
        lambda_hat=lambda_hat,
        log_marginal_at_hat=value,
        inclusion_prob=np.atleast_1d(posterior_inclusion(data.y, lambda_hat, cfg.tau)),
        post_mean=np.atleast_1d(posterior_mean_coordinate(data.y, lambda_hat, cfg.tau)),
        draws=draws,
    )
