import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ebayes.errors import DomainError
from ebayes.sieve_density.basis import fourier_basis, log_normalizer, log_normalizers, quadrature_rule
from ebayes.sieve_density.models import SievePriorConfig
from ebayes.sieve_density.selection import poisson_log_weight

QUAD_NODES = 1024


@dataclass(slots=True)
class PriorMassSplit:
    """
    The model and parameter parts of the prior-mass condition at the oracle truncation level.

    Attributes:
        k_star: ⌈(n/log n)^{1/(2α+1)}⌉.
        eps_sq: n^{1/(2α+1)}(log n)^{2α/(2α+1)}.
        model_part: −log π(k*)/ε*², π the normalized truncated Poisson weight.
        log_parameter_mass: log Π^{(k*)}(n·D₂(P*‖P_θ) ≤ ε*²).
        log_parameter_mass_se: Delta-method standard error of ``log_parameter_mass``.
        parameter_part: −log_parameter_mass/ε*² (inf when no draw hit the ball).
    """

    k_star: int
    eps_sq: float
    model_part: float
    log_parameter_mass: float
    log_parameter_mass_se: float
    parameter_part: float


def oracle_level(n: int, alpha: float) -> int:
    return int(math.ceil((n / math.log(n)) ** (1.0 / (2.0 * alpha + 1.0))))


def oracle_rate(n: int, alpha: float) -> float:
    return n ** (1.0 / (2.0 * alpha + 1.0)) * math.log(n) ** (2.0 * alpha / (2.0 * alpha + 1.0))


def renyi2(theta_star: np.ndarray, thetas: np.ndarray, quad_nodes: int = QUAD_NODES) -> np.ndarray:
    """
    Order-2 Rényi divergences D₂(P*‖P_θ) = log ∫ p*²/p_θ for every row of ``thetas``.
    """
    theta_star = np.atleast_1d(np.asarray(theta_star, dtype=float))
    thetas = np.atleast_2d(thetas)
    nodes, weights = quadrature_rule(quad_nodes)
    log_star = fourier_basis(nodes, theta_star.size) @ theta_star - log_normalizer(theta_star, quad_nodes)
    log_theta = thetas @ fourier_basis(nodes, thetas.shape[1]).T - log_normalizers(thetas, quad_nodes)[:, None]
    return logsumexp(2.0 * log_star - log_theta, b=weights, axis=1)


def prior_mass_split(
    theta_star,
    n: int,
    cfg: SievePriorConfig,
    alpha: float,
    n_mc: int,
    rng: np.random.Generator,
) -> PriorMassSplit:
    """
    Splits the prior-mass condition of the sieve prior into its model and parameter parts for a truth θ*.

    The ball {n·D₂(P*‖P_θ) ≤ ε*²} is far too small for plain prior sampling, so its N(0, σ²I) mass is estimated by
    importance sampling from N(θ*_{1:k*}, ε*²/(n·k*)·I).

    Args:
        theta_star: Coefficients of the true density.
        n: Sample size, at least 3.
        cfg: The sieve prior.
        alpha: Smoothness index driving k* and ε*².
        n_mc: Importance draws on the k*-th sieve.
        rng: Random stream.

    Returns:
        The PriorMassSplit.

    Raises:
        DomainError: If ``n < 3``, ``alpha`` is not positive, ``n_mc < 2`` or k* exceeds k_max.
    """
    if n < 3 or not alpha > 0 or n_mc < 2:
        raise DomainError("n must be at least 3, alpha positive and n_mc at least 2.")
    theta_star = np.atleast_1d(np.asarray(theta_star, dtype=float))
    k_star = oracle_level(n, alpha)
    if k_star > cfg.k_max:
        raise DomainError(f"k* = {k_star} exceeds k_max = {cfg.k_max}.")
    eps_sq = oracle_rate(n, alpha)

    log_w = np.array([poisson_log_weight(k, cfg.tau_pois) for k in range(1, cfg.k_max + 1)])
    log_pi = log_w[k_star - 1] - float(logsumexp(log_w))

    centre = np.zeros(k_star)
    head = theta_star[:k_star]
    centre[: head.size] = head
    scale_sq = eps_sq / (n * k_star)
    draws = centre + math.sqrt(scale_sq) * rng.standard_normal((n_mc, k_star))
    log_prior = -0.5 * np.sum(draws**2, axis=1) / cfg.sigma2 - 0.5 * k_star * math.log(2.0 * math.pi * cfg.sigma2)
    log_q = -0.5 * np.sum((draws - centre) ** 2, axis=1) / scale_sq - 0.5 * k_star * math.log(2.0 * math.pi * scale_sq)
    inside = n * renyi2(theta_star, draws) <= eps_sq

    if not np.any(inside):
        return PriorMassSplit(k_star, eps_sq, -log_pi / eps_sq, -math.inf, math.inf, math.inf)
    log_terms = np.where(inside, log_prior - log_q, -np.inf)
    log_mass = float(logsumexp(log_terms) - math.log(n_mc))
    shift = float(np.max(log_terms))
    terms = np.exp(log_terms - shift)
    se = float(terms.std(ddof=1) / (math.sqrt(n_mc) * terms.mean()))
    return PriorMassSplit(
        k_star=k_star,
        eps_sq=eps_sq,
        model_part=-log_pi / eps_sq,
        log_parameter_mass=log_mass,
        log_parameter_mass_se=se,
        parameter_part=-log_mass / eps_sq,
    )
