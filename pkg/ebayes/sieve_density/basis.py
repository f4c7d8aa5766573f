"""
Fourier basis, quadrature and distances for the exponential-family density model on [0, 1].
"""

import functools
import math
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import logsumexp

from ebayes.errors import DomainError, PrecisionError

PANEL_ORDER = 16
REFINE_TOL = 1e-10
MAX_REFINEMENTS = 4
SAMPLER_GRID = 4096


def fourier_basis(x, k: int) -> np.ndarray:
    """
    Evaluates φ_1..φ_k at ``x``: φ_{2j−1}(x) = √2·cos(2πjx), φ_{2j}(x) = √2·sin(2πjx).

    Returns:
        A len(x)×k matrix.
    """
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}.")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    index = np.arange(1, k + 1)
    freq = 2.0 * math.pi * ((index + 1) // 2)
    phase = np.outer(x, freq)
    return math.sqrt(2.0) * np.where(index % 2 == 1, np.cos(phase), np.sin(phase))


@functools.lru_cache(maxsize=32)
def quadrature_rule(n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss–Legendre rule on [0, 1] with 16-node panels and at least ``n_nodes`` nodes.
    """
    panels = max(1, -(-n_nodes // PANEL_ORDER))
    ref_nodes, ref_weights = leggauss(PANEL_ORDER)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    nodes = (edges[:-1, None] + half[:, None] * (ref_nodes + 1.0)).ravel()
    weights = (half[:, None] * ref_weights).ravel()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def _log_normalizer_at(theta: np.ndarray, n_nodes: int) -> float:
    nodes, weights = quadrature_rule(n_nodes)
    return float(logsumexp(fourier_basis(nodes, theta.size) @ theta, b=weights))


def log_normalizer(theta, quad_nodes: int = 256) -> float:
    """
    c(θ) = log ∫₀¹ exp(Σ_j θ_j φ_j(x)) dx by composite Gauss–Legendre quadrature.

    The rule is doubled until two successive values agree within 1e−10.

    Raises:
        DomainError: If θ is not finite.
        PrecisionError: If four doublings do not reach agreement.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if not np.all(np.isfinite(theta)):
        raise DomainError("theta must be finite.")
    if theta.size == 0 or not np.any(theta):
        return 0.0
    previous = _log_normalizer_at(theta, quad_nodes)
    for level in range(1, MAX_REFINEMENTS + 1):
        current = _log_normalizer_at(theta, quad_nodes * 2**level)
        if abs(current - previous) <= REFINE_TOL:
            return current
        previous = current
    raise PrecisionError(f"c(theta) did not settle after {MAX_REFINEMENTS} refinements.", previous, abs(current - previous))


def log_normalizers(thetas: np.ndarray, quad_nodes: int) -> np.ndarray:
    """
    c(θ) for every row of ``thetas`` on a fixed rule, without the refinement check.
    """
    thetas = np.atleast_2d(thetas)
    nodes, weights = quadrature_rule(quad_nodes)
    return logsumexp(thetas @ fourier_basis(nodes, thetas.shape[1]).T, b=weights, axis=1)


def basis_moments(theta: np.ndarray, quad_nodes: int) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    c(θ), E_θ[φ] and Cov_θ[φ] on a fixed rule.
    """
    nodes, weights = quadrature_rule(quad_nodes)
    phi = fourier_basis(nodes, theta.size)
    log_f = phi @ theta
    c = float(logsumexp(log_f, b=weights))
    p = weights * np.exp(log_f - c)
    mean = p @ phi
    cov = (phi * p[:, None]).T @ phi - np.outer(mean, mean)
    return c, mean, cov


def _log_density_on(theta: np.ndarray, nodes: np.ndarray, quad_nodes: int) -> np.ndarray:
    return fourier_basis(nodes, theta.size) @ theta - log_normalizer(theta, quad_nodes)


def hellinger_sq(theta_a, theta_b, quad_nodes: int = 1024) -> float:
    """
    Squared Hellinger distance 1 − ∫√(f_a f_b), clipped to [0, 1].
    """
    theta_a = np.atleast_1d(np.asarray(theta_a, dtype=float))
    theta_b = np.atleast_1d(np.asarray(theta_b, dtype=float))
    nodes, weights = quadrature_rule(quad_nodes)
    log_a = _log_density_on(theta_a, nodes, quad_nodes)
    log_b = _log_density_on(theta_b, nodes, quad_nodes)
    affinity = float(np.sum(weights * np.exp(0.5 * (log_a + log_b))))
    return float(np.clip(1.0 - affinity, 0.0, 1.0))


def hellinger_sq_to(theta, f: Callable[[np.ndarray], np.ndarray], quad_nodes: int = 1024) -> float:
    """
    Squared Hellinger distance from P_θ to a reference density ``f`` on [0, 1].
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    nodes, weights = quadrature_rule(quad_nodes)
    reference = np.maximum(np.asarray(f(nodes), dtype=float), 0.0)
    affinity = float(np.sum(weights * np.sqrt(reference) * np.exp(0.5 * _log_density_on(theta, nodes, quad_nodes))))
    return float(np.clip(1.0 - affinity, 0.0, 1.0))


def sample_from_density(theta, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Exact rejection sampler for P_θ with a uniform proposal.

    The envelope is the largest log density on a 4096-point grid plus the Lipschitz constant of the log density
    times half the grid spacing.

    Returns:
        ``n`` draws in [0, 1].
    """
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}.")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    k = theta.size
    grid = np.linspace(0.0, 1.0, SAMPLER_GRID + 1)
    log_f = fourier_basis(grid, k) @ theta
    freq = 2.0 * math.pi * ((np.arange(1, k + 1) + 1) // 2)
    lipschitz = math.sqrt(2.0) * float(np.sum(np.abs(theta) * freq))
    log_envelope = float(log_f.max()) + lipschitz * 0.5 / SAMPLER_GRID

    out = np.empty(0)
    while out.size < n:
        batch = max(2 * (n - out.size), 64)
        x = rng.uniform(size=batch)
        accept = np.log(rng.uniform(size=batch)) <= fourier_basis(x, k) @ theta - log_envelope
        out = np.concatenate([out, x[accept]])
    return out[:n]


def sobolev_truth(length: int = 20, decay: float = 1.5) -> np.ndarray:
    """
    Coefficients θ*_j = j^{−decay}, j = 1..length.
    """
    if length < 1 or not decay > 0:
        raise DomainError("length must be positive and decay positive.")
    return np.arange(1, length + 1, dtype=float) ** (-decay)
