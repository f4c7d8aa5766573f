from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from ebayes.errors import DomainError
from ebayes.sieve_density.basis import fourier_basis, hellinger_sq_to, log_normalizer

MIN_QUAD_NODES = 256


@dataclass(slots=True)
class SievePriorConfig:
    """
    Sieve prior of the exponential-family density model.

    Attributes:
        sigma2: Variance of the independent N(0, σ²) coefficients.
        tau_pois: Rate of the Poisson weight w(k) = τ^k/k!.
        k_max: Largest truncation level searched.
        quad_nodes: Gauss–Legendre nodes used for c(θ).
        n_is: Importance draws correcting the Laplace approximation.
    """

    sigma2: float = 1.0
    tau_pois: float = 1.0
    k_max: int = 50
    quad_nodes: int = MIN_QUAD_NODES
    n_is: int = 2000

    def __post_init__(self):
        if not (self.sigma2 > 0 and self.tau_pois > 0):
            raise DomainError("sigma2 and tau_pois must be positive.")
        if self.k_max < 1 or self.n_is < 20:
            raise DomainError("k_max must be positive and n_is at least 20.")
        if self.quad_nodes < MIN_QUAD_NODES:
            raise DomainError(f"quad_nodes must be at least {MIN_QUAD_NODES}, got {self.quad_nodes}.")


@dataclass(slots=True)
class ExpFamilyModel:
    """
    The density exp(Σ_{j=1}^{k} θ_j φ_j(x) − c(θ)) on [0, 1].

    Attributes:
        theta: Coefficients θ_1..θ_k (θ_0 = 0).
        quad_nodes: Quadrature resolution of c(θ).
        k: Truncation level, the length of ``theta``.
    """

    theta: np.ndarray
    quad_nodes: int = MIN_QUAD_NODES
    k: int = field(init=False)

    def __post_init__(self):
        self.theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        if self.theta.ndim != 1 or not np.all(np.isfinite(self.theta)):
            raise DomainError("theta must be a finite vector.")
        if self.quad_nodes < MIN_QUAD_NODES:
            raise DomainError(f"quad_nodes must be at least {MIN_QUAD_NODES}, got {self.quad_nodes}.")
        self.k = int(self.theta.size)

    def log_normalizer(self) -> float:
        return log_normalizer(self.theta, self.quad_nodes)

    def log_density(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return fourier_basis(x, self.k) @ self.theta - self.log_normalizer()


@dataclass(slots=True)
class DensityData:
    """
    An i.i.d. sample on [0, 1].

    Attributes:
        x: The observations; may be empty.
    """

    x: np.ndarray

    def __post_init__(self):
        self.x = np.atleast_1d(np.asarray(self.x, dtype=float))
        if self.x.ndim != 1 or not np.all(np.isfinite(self.x)):
            raise DomainError("x must be a finite vector.")
        if self.x.size and (self.x.min() < 0.0 or self.x.max() > 1.0):
            raise DomainError("observations must lie in [0, 1].")

    @property
    def n(self) -> int:
        return int(self.x.size)


@dataclass(slots=True)
class KMarginal:
    """
    Attributes:
        k: Truncation level.
        estimate: Importance-corrected log ∫Πp(X_i|θ)dΠ^{(k)}(θ).
        se: Standard error of ``estimate``.
        laplace: The uncorrected Laplace approximation.
        ess: Effective sample size of the correction.
        map_theta: Mode of the posterior on the k-th sieve.
        cov: Inverse negative Hessian at the mode.
    """

    k: int
    estimate: float
    se: float
    laplace: float
    ess: float
    map_theta: np.ndarray
    cov: np.ndarray


@dataclass(slots=True)
class SieveFit:
    """
    Empirical Bayes fit over truncation levels.

    Attributes:
        k_hat: Selected truncation level.
        map_theta: Posterior mode at k̂.
        cov: Laplace covariance at k̂.
        draws: Draws from the Laplace Gaussian at k̂.
        log_scores: log w(k) + log marginal, per k.
        marginals: The KMarginal per k.
        quad_nodes: Quadrature resolution used for distances.
    """

    k_hat: int
    map_theta: np.ndarray
    cov: np.ndarray
    draws: np.ndarray
    log_scores: Dict[int, float]
    marginals: List[KMarginal]
    quad_nodes: int = MIN_QUAD_NODES

    def hellinger_sq_to(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        """
        Squared Hellinger distance from the plug-in density at the mode to a reference density.
        """
        return hellinger_sq_to(self.map_theta, f, self.quad_nodes)

    def hellinger_to(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.sqrt(self.hellinger_sq_to(f)))

    def posterior_hellinger_sq(self, f: Callable[[np.ndarray], np.ndarray], n: Optional[int] = None) -> float:
        """
        Posterior average of the squared Hellinger distance to ``f`` over the first ``n`` draws.
        """
        draws = self.draws if n is None else self.draws[:n]
        return float(np.mean([hellinger_sq_to(theta, f, self.quad_nodes) for theta in draws]))
