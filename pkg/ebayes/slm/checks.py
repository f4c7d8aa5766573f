import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.linalg import orth
from scipy.special import logsumexp

from ebayes.dists import EllipticalLaplace, sample_elliptical_laplace
from ebayes.errors import CapabilityError, DomainError
from ebayes.slm.models import SLMConfig, Structure, StructureRegistry, Truth
from ebayes.slm.weights import epsilon_sq, log_delta

logger = logging.getLogger(__name__)

MAX_TEST_STRUCTURES = 10_000
MIN_MASS_DRAWS = 1000


@dataclass(slots=True)
class StructureTestEstimate:
    """
    Monte Carlo type-1 error of the maximum of the structure tests.

    Attributes:
        type_one: Rejection frequency under the truth.
        se: Its binomial standard error.
        log_union_bound: log Σ_Z of the χ² tail bounds of the individual tests.
        log_reference: −ε(Z*)² + 1, the order of the bound in the testing lemma.
        n_structures: Alternatives tested.
        holds: Whether the frequency stays within 3 SE of the union bound.
    """

    __test__ = False

    type_one: float
    se: float
    log_union_bound: float
    log_reference: float
    n_structures: int
    holds: bool


@dataclass(slots=True)
class SLMMassRatio:
    """
    Attributes:
        log_ratio: log Γ_Z(‖X_Z B − θ*‖² ≤ ε²) − log Γ_{Z*}(‖X_{Z*}(B − B*)‖² ≤ ε(Z*)²).
        se: Delta-method standard error of ``log_ratio``.
        log_bound: log δ(Z) − log δ(Z*) + ε²/6 + C2(ε(Z)² + ε(Z*)²).
        holds: Whether the ratio stays below the bound (an empty numerator always does).
    """

    log_ratio: float
    se: float
    log_bound: float
    holds: bool


def _joint_basis(operator_Z: np.ndarray, operator_Zstar: np.ndarray) -> np.ndarray:
    return orth(np.hstack([operator_Z, operator_Zstar]))


def test_reject_structure(Y, operator_Z, operator_Zstar, center, eps_sq: float) -> bool:
    """
    Rejects when ‖P_{Z,Z*}(Y − center)‖² > 6ε², P the projection onto the joint column span of the two operators.

    Raises:
        DomainError: If ``eps_sq`` is negative or the shapes disagree.
    """
    if eps_sq < 0:
        raise DomainError(f"eps_sq must be nonnegative, got {eps_sq!r}.")
    residual = np.asarray(Y, dtype=float) - np.asarray(center, dtype=float)
    operator_Z = np.atleast_2d(np.asarray(operator_Z, dtype=float))
    operator_Zstar = np.atleast_2d(np.asarray(operator_Zstar, dtype=float))
    if operator_Z.shape[0] != residual.size or operator_Zstar.shape[0] != residual.size:
        raise DomainError("operators and Y must have the same number of rows.")
    Q = _joint_basis(operator_Z, operator_Zstar)
    return bool(np.sum((Q.T @ residual) ** 2) > 6.0 * eps_sq)


def estimate_slm_type_one(registry: StructureRegistry, truth: Truth, n_mc: int, rng: np.random.Generator) -> StructureTestEstimate:
    """
    Rejection frequency of max_Z φ_Z under Y = θ* + noise, each Z tested at 6(ε(Z)² + ε(Z*)²).

    Raises:
        CapabilityError: If the registry holds more than 10^4 candidate structures.
        StructureError: If the true structure belongs to no class.
    """
    total = sum(registry.candidate_count(spec.lambda_id) for spec in registry.specs)
    if total > MAX_TEST_STRUCTURES:
        raise CapabilityError(f"{total} structures exceed the test budget of {MAX_TEST_STRUCTURES}.")
    star_spec = registry.spec(registry.owner(truth.structure))
    eps_star = epsilon_sq(star_spec)
    M_star = truth.structure.operator

    noise = rng.standard_normal((n_mc, M_star.shape[0]))
    rejected = np.zeros(n_mc, dtype=bool)
    log_bounds: List[float] = []
    n_structures = 0
    for spec in registry.specs:
        threshold = 6.0 * (epsilon_sq(spec) + eps_star)
        for structure in registry.structures(spec.lambda_id):
            Q = _joint_basis(structure.operator, M_star)
            d = Q.shape[1]
            rejected |= np.sum((noise @ Q) ** 2, axis=1) > threshold
            log_bounds.append(min(0.0, 2.0 * d / 3.0 - threshold / 3.0))
            n_structures += 1

    freq = float(rejected.mean())
    se = math.sqrt(max(freq * (1.0 - freq), 1.0 / n_mc) / n_mc)
    log_union = float(logsumexp(log_bounds)) if log_bounds else -math.inf
    return StructureTestEstimate(
        type_one=freq,
        se=se,
        log_union_bound=log_union,
        log_reference=1.0 - eps_star,
        n_structures=n_structures,
        holds=freq <= min(1.0, math.exp(log_union)) + 3.0 * se,
    )


def _ball_mass(operator: np.ndarray, center: np.ndarray, radius_sq: float, tau: float, n_mc: int, rng) -> float:
    prior = EllipticalLaplace(operator, tau)
    draws = sample_elliptical_laplace(prior, rng, n_mc)
    return float(np.mean(np.sum((draws @ prior.operator.T - center) ** 2, axis=1) <= radius_sq))


def slm_mass_ratio(
    registry: StructureRegistry,
    Z: Structure,
    Z_star: Structure,
    B_star: np.ndarray,
    eps_sq: float,
    cfg: SLMConfig,
    n_mc: int,
    rng: np.random.Generator,
    C2: float = 1.0,
) -> SLMMassRatio:
    """
    Monte Carlo check of Γ_Z(ball ε²)/Γ_{Z*}(ball ε(Z*)²) ≤ δ(Z)/δ(Z*)·exp(ε²/6 + C2(ε(Z)² + ε(Z*)²)).

    Both balls are centred at θ* = X_{Z*}B* in the signal space.

    Raises:
        DomainError: If ``n_mc < 1000`` or ``eps_sq`` is not positive.
        StructureError: If either structure belongs to no class.
    """
    if n_mc < MIN_MASS_DRAWS:
        raise DomainError(f"n_mc must be at least {MIN_MASS_DRAWS}, got {n_mc}.")
    if not eps_sq > 0:
        raise DomainError(f"eps_sq must be positive, got {eps_sq!r}.")
    spec = registry.spec(registry.owner(Z))
    star = registry.spec(registry.owner(Z_star))
    theta_star = Z_star.operator @ np.asarray(B_star, dtype=float)

    numerator = _ball_mass(Z.operator, theta_star, eps_sq, cfg.tau, n_mc, rng)
    denominator = _ball_mass(Z_star.operator, theta_star, epsilon_sq(star), cfg.tau, n_mc, rng)
    log_bound = log_delta(spec) - log_delta(star) + eps_sq / 6.0 + C2 * (epsilon_sq(spec) + epsilon_sq(star))

    if numerator == 0.0:
        return SLMMassRatio(log_ratio=-math.inf, se=math.inf, log_bound=log_bound, holds=True)
    if denominator == 0.0:
        logger.warning("no prior draw of the true structure fell in its ball; ratio unbounded")
        return SLMMassRatio(log_ratio=math.inf, se=math.inf, log_bound=log_bound, holds=False)
    se = math.sqrt((1.0 - numerator) / (n_mc * numerator) + (1.0 - denominator) / (n_mc * denominator))
    log_ratio = math.log(numerator) - math.log(denominator)
    return SLMMassRatio(log_ratio=log_ratio, se=se, log_bound=log_bound, holds=log_ratio <= log_bound)
