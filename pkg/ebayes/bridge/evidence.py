import math
from typing import Hashable, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.stats import multivariate_normal

from ebayes import utils
from ebayes.bridge.models import ConjugateModel, ConjugateModelFamily
from ebayes.errors import DomainError


def check_observation(family: ConjugateModelFamily, Y) -> np.ndarray:
    Y = np.atleast_1d(np.asarray(Y, dtype=float))
    if Y.shape != (family.n_obs,) or not np.all(np.isfinite(Y)):
        raise DomainError(f"Y must be a finite vector of length {family.n_obs}.")
    return Y


def exact_log_evidence(family: ConjugateModelFamily, k: Hashable, Y) -> float:
    """
    log ∫ N(Y; A_kθ, I)·N(θ; μ_k, Σ_k) dθ = log N(Y; A_kμ_k, I + A_kΣ_kA_kᵀ).
    """
    Y = check_observation(family, Y)
    model = family.models[family.index(k)]
    A = model.design
    with utils.linalg_guard(f"marginal covariance of model {k!r}"):
        return float(multivariate_normal.logpdf(Y, mean=A @ model.mu, cov=np.eye(Y.size) + A @ model.cov @ A.T))


def posterior(family: ConjugateModelFamily, k: Hashable, Y) -> Tuple[np.ndarray, np.ndarray]:
    """
    Posterior N(m, S) of θ^{(k)} given Y in precision form: S⁻¹ = Σ⁻¹ + AᵀA, m = S(Σ⁻¹μ + AᵀY).
    """
    Y = check_observation(family, Y)
    model = family.models[family.index(k)]
    A = model.design
    with utils.linalg_guard(f"posterior precision of model {k!r}"):
        prior_factor = cho_factor(model.cov)
        prior_precision = cho_solve(prior_factor, np.eye(model.dim))
        precision_factor = cho_factor(prior_precision + A.T @ A)
    cov = cho_solve(precision_factor, np.eye(model.dim))
    mean = cho_solve(precision_factor, cho_solve(prior_factor, model.mu) + A.T @ Y)
    return mean, 0.5 * (cov + cov.T)


def posterior_gain(model: ConjugateModel, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    The same posterior in gain form: K = ΣAᵀ(I + AΣAᵀ)⁻¹, m = μ + K(Y − Aμ), S = Σ − KAΣ.
    """
    A = model.design
    with utils.linalg_guard(f"innovation covariance of model {model.k!r}"):
        innovation = cho_factor(np.eye(model.n_obs) + A @ model.cov @ A.T)
    gain = cho_solve(innovation, A @ model.cov).T
    mean = model.mu + gain @ (Y - A @ model.mu)
    cov = model.cov - gain @ A @ model.cov
    return mean, 0.5 * (cov + cov.T)


def chib_log_evidence(model: ConjugateModel, Y: np.ndarray) -> float:
    """
    log evidence from the identity p(Y) = p(Y|θ)p(θ)/p(θ|Y) at the posterior mean, with the gain-form posterior.
    """
    mean, cov = posterior_gain(model, Y)
    A = model.design
    log_lik = -0.5 * Y.size * math.log(2.0 * math.pi) - 0.5 * float(np.sum((Y - A @ mean) ** 2))
    log_prior = float(multivariate_normal.logpdf(mean, mean=model.mu, cov=model.cov))
    log_post = float(multivariate_normal.logpdf(mean, mean=mean, cov=cov))
    return log_lik + log_prior - log_post


def gaussian_kl(mean_q: np.ndarray, cov_q: np.ndarray, mean_p: np.ndarray, cov_p: np.ndarray) -> float:
    """
    KL(N(mean_q, cov_q) ‖ N(mean_p, cov_p)).
    """
    with utils.linalg_guard("Gaussian KL"):
        factor_p = cho_factor(cov_p)
        factor_q = cho_factor(cov_q)
    diff = mean_p - mean_q
    trace = float(np.trace(cho_solve(factor_p, cov_q)))
    quad = float(diff @ cho_solve(factor_p, diff))
    log_det_p = 2.0 * float(np.sum(np.log(np.diag(factor_p[0]))))
    log_det_q = 2.0 * float(np.sum(np.log(np.diag(factor_q[0]))))
    return 0.5 * (trace + quad - mean_q.size + log_det_p - log_det_q)
