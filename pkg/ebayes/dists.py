"""
Elementary densities, convolutions, tail bounds and samplers shared by the model modules.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigh
from scipy.special import gammaln, log_ndtr
from scipy.stats import norm

from ebayes import utils
from ebayes.errors import DomainError, StructureError

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
EIGEN_FLOOR = 1e-12


def _finite(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite.")
    return arr


def _positive(value: float, name: str) -> float:
    if not (np.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive real, got {value!r}.")
    return float(value)


@dataclass(slots=True)
class LaplaceSlab:
    """
    Laplace slab density g(x) = (τ/2)·exp(−τ|x|).

    Attributes:
        tau: Rate of the slab.
    """

    tau: float

    def __post_init__(self):
        self.tau = _positive(self.tau, "tau")

    def log_pdf(self, x):
        return math.log(self.tau / 2.0) - self.tau * np.abs(x)

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        return rng.laplace(0.0, 1.0 / self.tau, size=size)


def log_gauss_laplace_marginal(y, tau: float):
    """
    Log of the Gaussian–Laplace convolution m(y) = ∫φ(y−θ)·(τ/2)e^{−τ|θ|}dθ.

    Closed form (τ/2)·e^{τ²/2}·[e^{−τy}Φ(y−τ) + e^{τy}Φ(−y−τ)], combined in log-space through log Φ so that
    e^{τ²/2} never materializes.

    Args:
        y: Scalar or array of observations.
        tau: Slab rate.

    Returns:
        log m(y) with the shape of ``y``.

    Raises:
        DomainError: If ``y`` is not finite or ``tau`` is not positive.
    """
    y = _finite(y, "y")
    tau = _positive(tau, "tau")
    upper = -tau * y + log_ndtr(y - tau)
    lower = tau * y + log_ndtr(-y - tau)
    out = math.log(tau / 2.0) + 0.5 * tau * tau + np.logaddexp(upper, lower)
    return float(out) if out.ndim == 0 else out


def gauss_laplace_marginal(y, tau: float):
    """
    The per-coordinate slab marginal m(y); see :func:`log_gauss_laplace_marginal`.
    """
    return np.exp(log_gauss_laplace_marginal(y, tau))


def laplace_gauss_moments(c, g, tau: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Moments of the one-dimensional density proportional to exp(−g(v−c)²/2 − τ|v|).

    The density splits into N(c−τ/g, 1/g) truncated to (0, ∞) and N(c+τ/g, 1/g) truncated to (−∞, 0); mixture
    weights are kept in log-space and the truncated-normal means use the inverse Mills ratio.

    Args:
        c: Centre(s) of the Gaussian factor.
        g: Precision(s) of the Gaussian factor, positive.
        tau: Laplace rate.

    Returns:
        ``(log ∫exp(...)dv, mean, second moment)``, each broadcast over ``c`` and ``g``.
    """
    c = np.asarray(c, dtype=float)
    g = np.asarray(g, dtype=float)
    sd = 1.0 / np.sqrt(g)
    mu_pos = c - tau / g
    mu_neg = c + tau / g
    z_pos = mu_pos / sd
    z_neg = -mu_neg / sd

    base = 0.5 * tau * tau / g
    log_a_pos = base - tau * c + log_ndtr(z_pos)
    log_a_neg = base + tau * c + log_ndtr(z_neg)
    log_total = np.logaddexp(log_a_pos, log_a_neg)
    w_pos = np.exp(log_a_pos - log_total)
    w_neg = np.exp(log_a_neg - log_total)

    mills_pos = np.exp(norm.logpdf(z_pos) - log_ndtr(z_pos))
    mills_neg = np.exp(norm.logpdf(z_neg) - log_ndtr(z_neg))
    mean_pos = mu_pos + sd * mills_pos
    mean_neg = mu_neg - sd * mills_neg
    var_pos = sd * sd * (1.0 - z_pos * mills_pos - mills_pos * mills_pos)
    var_neg = sd * sd * (1.0 - z_neg * mills_neg - mills_neg * mills_neg)

    mean = w_pos * mean_pos + w_neg * mean_neg
    second = w_pos * (var_pos + mean_pos**2) + w_neg * (var_neg + mean_neg**2)
    log_norm = 0.5 * np.log(2.0 * np.pi / g) + log_total
    return log_norm, mean, second


def chi2_tail_bound(d: int, t: float) -> float:
    """
    Upper bound exp(2d/3 − t/3) on P(χ²_d ≥ t), clamped to 1.

    Raises:
        DomainError: If ``d < 1`` or ``t < 0``.
    """
    if int(d) != d or d < 1:
        raise DomainError(f"d must be a positive integer, got {d!r}.")
    if not (np.isfinite(t) and t >= 0):
        raise DomainError(f"t must be a nonnegative real, got {t!r}.")
    return float(min(1.0, math.exp(2.0 * d / 3.0 - t / 3.0)))


@dataclass(slots=True, eq=False)
class EllipticalLaplace:
    """
    Elliptical Laplace distribution on ℝ^ℓ with density ∝ exp(−τ‖M B‖).

    Attributes:
        operator: The N×ℓ design M of the structure.
        tau: Rate.
        ell: Intrinsic dimension (column count of ``operator``).
    """

    operator: np.ndarray
    tau: float
    ell: int = field(init=False)
    _gram: np.ndarray = field(init=False, repr=False)
    _inv_sqrt: Optional[np.ndarray] = field(init=False, default=None, repr=False)
    _log_det: Optional[float] = field(init=False, default=None, repr=False)

    def __post_init__(self):
        self.operator = np.atleast_2d(_finite(self.operator, "operator"))
        if self.operator.ndim != 2:
            raise StructureError("operator must be a matrix.")
        self.tau = _positive(self.tau, "tau")
        self.ell = int(self.operator.shape[1])
        self._gram = self.operator.T @ self.operator

    def _decompose(self) -> None:
        with utils.linalg_guard("Gram eigendecomposition"):
            eigvals, eigvecs = eigh(self._gram)
        if eigvals.min() < EIGEN_FLOOR:
            raise StructureError(f"operator is rank deficient (smallest Gram eigenvalue {eigvals.min():.3e}).")
        self._inv_sqrt = (eigvecs / np.sqrt(eigvals)) @ eigvecs.T
        self._log_det = float(np.sum(np.log(eigvals)))

    @property
    def gram(self) -> np.ndarray:
        return self._gram

    def inv_sqrt_gram(self) -> np.ndarray:
        """
        (MᵀM)^{−1/2} by symmetric eigendecomposition.

        Raises:
            StructureError: If an eigenvalue of MᵀM is below 1e−12.
        """
        if self._inv_sqrt is None:
            self._decompose()
        return self._inv_sqrt

    def log_det_gram(self) -> float:
        if self._log_det is None:
            self._decompose()
        return self._log_det

    def log_normalizer(self) -> float:
        """
        log[(√det(MᵀM)/2)·(τ/√π)^ℓ·Γ(ℓ/2)/Γ(ℓ)].
        """
        ell = self.ell
        return (
            0.5 * self.log_det_gram()
            - math.log(2.0)
            + ell * (math.log(self.tau) - 0.5 * math.log(math.pi))
            + gammaln(ell / 2.0)
            - gammaln(ell)
        )


def log_density_elliptical_laplace(prior: EllipticalLaplace, B) -> np.ndarray:
    """
    Log density of the elliptical Laplace distribution.

    Args:
        prior: The distribution.
        B: A vector of length ℓ, or a matrix of row vectors.

    Returns:
        The log density (scalar for a vector input).

    Raises:
        DomainError: If the trailing dimension of ``B`` is not ℓ.
        StructureError: If the operator is rank deficient.
    """
    B = np.asarray(B, dtype=float)
    if B.shape[-1] != prior.ell:
        raise DomainError(f"B must have trailing dimension {prior.ell}, got shape {B.shape}.")
    quad = np.einsum("...i,ij,...j->...", B, prior.gram, B)
    out = prior.log_normalizer() - prior.tau * np.sqrt(np.maximum(quad, 0.0))
    return float(out) if np.ndim(out) == 0 else out


def sample_elliptical_laplace(prior: EllipticalLaplace, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """
    Draws from the elliptical Laplace distribution.

    v = r·u with u uniform on the unit sphere of ℝ^ℓ and r ~ Gamma(shape=ℓ, rate=τ), then B = (MᵀM)^{−1/2}v.

    Args:
        prior: The distribution.
        rng: Random stream.
        size: Number of draws; ``None`` returns a single vector.

    Returns:
        A vector of length ℓ, or a ``size``×ℓ matrix.

    Raises:
        StructureError: If the operator is rank deficient.
    """
    transform = prior.inv_sqrt_gram()
    n = 1 if size is None else int(size)
    u = rng.standard_normal((n, prior.ell))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    r = rng.gamma(shape=prior.ell, scale=1.0 / prior.tau, size=n)
    draws = (r[:, None] * u) @ transform
    return draws[0] if size is None else draws
