import logging
import math
from typing import Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from ebayes import utils
from ebayes.errors import DomainError, NumericError, PrecisionError
from ebayes.sieve_density.basis import basis_moments, fourier_basis, log_normalizer, log_normalizers
from ebayes.sieve_density.models import DensityData, KMarginal, SievePriorConfig

logger = logging.getLogger(__name__)

MAX_NEWTON = 200
GRAD_TOL = 1e-8
ROUNDOFF = 1e-12


def log_likelihood(theta: np.ndarray, data: DensityData, quad_nodes: int = 256) -> float:
    """
    Σ_i log p(X_i|θ) = θ·Σ_i φ(X_i) − n·c(θ).
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if data.n == 0:
        return 0.0
    return float(fourier_basis(data.x, theta.size).sum(axis=0) @ theta - data.n * log_normalizer(theta, quad_nodes))


def log_likelihood_grad(theta: np.ndarray, data: DensityData, quad_nodes: int = 256) -> np.ndarray:
    """
    Gradient of :func:`log_likelihood`: Σ_i φ(X_i) − n·E_θ[φ].
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    _, mean, _ = basis_moments(theta, quad_nodes)
    return fourier_basis(data.x, theta.size).sum(axis=0) - data.n * mean


def map_estimate(data: DensityData, k: int, cfg: SievePriorConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mode of Σ_i log p(X_i|θ) − ‖θ‖²/(2σ²) over ℝ^k by damped Newton iterations.

    Returns:
        The mode and the negated Hessian at the mode (positive definite).

    Raises:
        NumericError: If ‖gradient‖ ≤ 1e−8 is not reached within 200 iterations or a line search finds no ascent.
    """
    totals = fourier_basis(data.x, k).sum(axis=0)
    n, precision = data.n, 1.0 / cfg.sigma2

    def evaluate(theta):
        c, mean, cov = basis_moments(theta, cfg.quad_nodes)
        value = totals @ theta - n * c - 0.5 * precision * theta @ theta
        return value, totals - n * mean - precision * theta, n * cov + precision * np.eye(k)

    theta = np.zeros(k)
    value, grad, neg_hess = evaluate(theta)
    for iteration in range(MAX_NEWTON):
        if np.linalg.norm(grad) <= GRAD_TOL:
            logger.debug("sieve MAP k=%d converged after %d Newton steps", k, iteration)
            return theta, neg_hess
        with utils.linalg_guard(f"Newton step for k={k}"):
            step = cho_solve(cho_factor(neg_hess), grad)
        t = 1.0
        while True:
            trial = theta + t * step
            trial_value, trial_grad, trial_hess = evaluate(trial)
            # steps that are flat to round-off still count as ascent
            if trial_value >= value + 1e-4 * t * (grad @ step) - ROUNDOFF * (1.0 + abs(value)):
                break
            t *= 0.5
            if t < 1e-10:
                logger.debug("sieve MAP k=%d line search stalled at objective %.10g, |grad| = %.3e", k, value, np.linalg.norm(grad))
                raise NumericError(f"Newton line search for k={k} found no ascent (|grad| = {np.linalg.norm(grad):.3e}).")
        theta, value, grad, neg_hess = trial, trial_value, trial_grad, trial_hess
    if np.linalg.norm(grad) <= GRAD_TOL:
        return theta, neg_hess
    raise NumericError(f"Newton iterations for k={k} did not converge (|grad| = {np.linalg.norm(grad):.3e}).")


def _log_prior(thetas: np.ndarray, sigma2: float) -> np.ndarray:
    k = thetas.shape[-1]
    return -0.5 * k * math.log(2.0 * math.pi * sigma2) - 0.5 * np.sum(thetas**2, axis=-1) / sigma2


def log_marginal_k(data: DensityData, k: int, cfg: SievePriorConfig, rng: np.random.Generator, strict: bool = True) -> KMarginal:
    """
    log ∫ Π_i p(X_i|θ) dΠ^{(k)}(θ) under the N(0, σ²I_k) sieve prior.

    The Laplace approximation at the mode is corrected by importance sampling with ``cfg.n_is`` draws from the
    Laplace Gaussian; c(θ) of all draws comes from one batched quadrature on twice the configured rule.

    Args:
        data: The sample; an empty sample gives 0 exactly.
        k: Truncation level, 1 ≤ k ≤ k_max.
        cfg: Prior and numerical settings.
        rng: Random stream of the correction.
        strict: Raise on a failed ESS diagnostic; otherwise log it and keep the estimate.

    Returns:
        The KMarginal.

    Raises:
        DomainError: If k is outside [1, k_max].
        NumericError: If the mode search fails.
        PrecisionError: If ``strict`` and the correction's ESS is below n_is/20.
    """
    if not 1 <= k <= cfg.k_max:
        raise DomainError(f"k must lie in [1, {cfg.k_max}], got {k}.")
    if data.n == 0:
        return KMarginal(k=k, estimate=0.0, se=0.0, laplace=0.0, ess=float(cfg.n_is), map_theta=np.zeros(k), cov=cfg.sigma2 * np.eye(k))

    theta_hat, neg_hess = map_estimate(data, k, cfg)
    with utils.linalg_guard(f"Laplace covariance for k={k}"):
        L = np.linalg.cholesky(neg_hess)
    log_det = 2.0 * float(np.sum(np.log(np.diag(L))))
    log_post_hat = log_likelihood(theta_hat, data, cfg.quad_nodes) + float(_log_prior(theta_hat, cfg.sigma2))
    laplace = log_post_hat + 0.5 * k * math.log(2.0 * math.pi) - 0.5 * log_det

    z = rng.standard_normal((cfg.n_is, k))
    draws = theta_hat + solve_triangular(L, z.T, lower=True, trans="T").T
    totals = fourier_basis(data.x, k).sum(axis=0)
    log_lik = draws @ totals - data.n * log_normalizers(draws, 2 * cfg.quad_nodes)
    log_q = -0.5 * k * math.log(2.0 * math.pi) + 0.5 * log_det - 0.5 * np.sum(z**2, axis=1)
    estimate, se, ess = utils.log_importance_estimate(log_lik + _log_prior(draws, cfg.sigma2) - log_q)

    cov = cho_solve((L, True), np.eye(k))
    logger.debug("sieve marginal k=%d laplace=%.6g corrected=%.6g se=%.3g ess=%.1f", k, laplace, estimate, se, ess)
    if ess < cfg.n_is / 20.0:
        if not strict:
            logger.warning("sieve marginal for k=%d kept with ESS %.1f", k, ess)
        else:
            raise PrecisionError(f"sieve marginal for k={k}: ESS {ess:.1f} is below {cfg.n_is / 20.0:.1f}.", estimate, se)
    return KMarginal(k=k, estimate=estimate, se=se, laplace=laplace, ess=ess, map_theta=theta_hat, cov=cov)
