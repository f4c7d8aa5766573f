import numpy as np
from scipy.special import log_ndtr
from scipy.stats import norm, truncnorm

from ebayes import dists
from ebayes.errors import DomainError
from ebayes.seq_eb.marginal import check_lambda, log_mixture_terms
from ebayes.seq_eb.models import SequenceData


def _scalar_or_array(values):
    values = np.asarray(values)
    return float(values) if values.ndim == 0 else values


def posterior_inclusion(y_j, lam: float, tau: float):
    """
    Posterior probability that a coordinate comes from the slab: λm(y) / ((1−λ)φ(y) + λm(y)).

    Vectorized over ``y_j``.
    """
    lam = check_lambda(lam)
    log_m = dists.log_gauss_laplace_marginal(y_j, tau)
    log_phi = norm.logpdf(y_j)
    with np.errstate(divide="ignore"):
        log_slab = np.log(lam) + log_m
    return _scalar_or_array(np.exp(log_slab - log_mixture_terms(log_phi, log_m, lam)))


def posterior_mean_coordinate(y_j, lam: float, tau: float):
    """
    Posterior mean of a coordinate: inclusion probability times the mean of the slab posterior.

    Vectorized over ``y_j``.
    """
    _, slab_mean, _ = dists.laplace_gauss_moments(y_j, 1.0, tau)
    return _scalar_or_array(posterior_inclusion(y_j, lam, tau) * slab_mean)


def posterior_second_moment_coordinate(y_j, lam: float, tau: float):
    """
    Posterior second moment E[θ_j² | Y]; the spike contributes nothing.
    """
    _, _, slab_second = dists.laplace_gauss_moments(y_j, 1.0, tau)
    return _scalar_or_array(posterior_inclusion(y_j, lam, tau) * slab_second)


def posterior_risk(data: SequenceData, lam: float, tau: float, theta_star) -> float:
    """
    Posterior-averaged squared loss E‖θ − θ*‖² under Π_λ(·|Y), in closed form.
    """
    theta_star = np.asarray(theta_star, dtype=float)
    if theta_star.shape != data.y.shape:
        raise DomainError("theta_star must match the data dimension.")
    first = posterior_mean_coordinate(data.y, lam, tau)
    second = posterior_second_moment_coordinate(data.y, lam, tau)
    return float(np.sum(second - 2.0 * theta_star * first + theta_star**2))


def sample_posterior(data: SequenceData, lam: float, tau: float, n_draws: int, rng: np.random.Generator) -> np.ndarray:
    """
    Independent per-coordinate posterior draws.

    A Bernoulli(inclusion) variable picks the spike (an exact zero) or the slab. Slab draws first choose the positive
    or negative half with the log-space mixture weights, then sample N(y−τ, 1) truncated to (0, ∞) or N(y+τ, 1)
    truncated to (−∞, 0).

    Args:
        data: The observation.
        lam: Mixing weight of the slab.
        tau: Slab rate.
        n_draws: Number of draws, positive.
        rng: Random stream.

    Returns:
        An ``n_draws``×p matrix.

    Raises:
        DomainError: If ``n_draws`` is not positive.
    """
    if int(n_draws) != n_draws or n_draws < 1:
        raise DomainError(f"n_draws must be a positive integer, got {n_draws!r}.")
    n_draws = int(n_draws)
    y = data.y
    size = (n_draws, y.size)

    included = rng.random(size) < posterior_inclusion(y, lam, tau)

    log_pos = -tau * y + log_ndtr(y - tau)
    log_neg = tau * y + log_ndtr(-y - tau)
    w_pos = np.exp(log_pos - np.logaddexp(log_pos, log_neg))
    positive = rng.random(size) < w_pos

    mu_pos, mu_neg = y - tau, y + tau
    pos_draws = truncnorm.rvs(-mu_pos, np.inf, loc=mu_pos, scale=1.0, size=size, random_state=rng)
    neg_draws = truncnorm.rvs(-np.inf, -mu_neg, loc=mu_neg, scale=1.0, size=size, random_state=rng)

    slab = np.where(positive, pos_draws, neg_draws)
    return np.where(included, slab, 0.0)
