import math
from dataclasses import dataclass
from typing import Hashable, Iterable, List, Union

import numpy as np
from scipy.special import gammaln, logsumexp

from ebayes.errors import DomainError, StructureError
from ebayes.slm.models import SLMConfig, Structure, StructureRegistry, StructureSpec


@dataclass(slots=True)
class ComplexityCheck:
    """
    Outcome of the complexity condition #{λ : t−1 < ε(Z_λ)² ≤ t} ≤ t.

    Attributes:
        holds: Whether the condition holds for every positive integer t.
        offending: The values of t that violate it.
        log_tail_sum: log Σ_λ exp(−ε(Z_λ)²); at most log Σ_t t·e^{1−t} < 1 whenever the condition holds.
    """

    holds: bool
    offending: List[int]
    log_tail_sum: float


@dataclass(slots=True)
class SieveSumResult:
    """
    Attributes:
        log_sum_direct: The sieve sum assembled from γ, δ, w and ν structure class by structure class.
        log_sum_cancelled: The same sum after the gamma factors cancel.
        log_bound: (D+1)ε(Z_λ*)² + 1.
        holds: Whether the direct sum stays below the bound.
    """

    log_sum_direct: float
    log_sum_cancelled: float
    log_bound: float
    holds: bool


def epsilon_sq(spec: StructureSpec) -> float:
    """
    Complexity ε(Z_λ)² = ℓ(Z_λ) + log|Z̄_λ|.
    """
    return float(spec.ell + spec.log_count)


def log_delta(spec: StructureSpec) -> float:
    """
    log δ(Z) = log Γ(ℓ/2) − log Γ(ℓ), the gamma ratio of the elliptical Laplace normalizer.
    """
    return float(gammaln(spec.ell / 2.0) - gammaln(spec.ell))


def log_weight_slm(spec: StructureSpec, cfg: SLMConfig) -> float:
    """
    log w(λ) = log Γ(ℓ) − log Γ(ℓ/2) − D·ε(Z_λ)².
    """
    return float(gammaln(spec.ell) - gammaln(spec.ell / 2.0) - cfg.D * epsilon_sq(spec))


def check_complexity_condition(specs: Union[StructureRegistry, Iterable[StructureSpec]]) -> ComplexityCheck:
    """
    Checks that at most t structure classes have complexity in (t−1, t], for every positive integer t.

    Args:
        specs: A registry or a plain collection of StructureSpec.

    Returns:
        The ComplexityCheck.
    """
    if isinstance(specs, StructureRegistry):
        specs = specs.specs
    eps = np.array([epsilon_sq(spec) for spec in specs], dtype=float)
    if eps.size == 0:
        return ComplexityCheck(holds=True, offending=[], log_tail_sum=-math.inf)

    bins = np.ceil(eps).astype(int)
    values, counts = np.unique(bins, return_counts=True)
    offending = [int(t) for t, c in zip(values, counts) if c > t]
    return ComplexityCheck(holds=not offending, offending=offending, log_tail_sum=float(logsumexp(-eps)))


def effective_weight_slm(structure: Structure, registry: StructureRegistry, cfg: SLMConfig) -> float:
    """
    log γ(Z) = log w(λ) − log|Z̄_λ| for the class λ owning ``structure``.

    Raises:
        StructureError: If no class of the registry contains the structure.
    """
    lambda_id = registry.owner(structure)
    if lambda_id is None:
        raise StructureError(f"structure {structure.key!r} belongs to no class of {registry.registry_name}.")
    spec = registry.spec(lambda_id)
    return log_weight_slm(spec, cfg) - spec.log_count


def verify_slm_sieve(registry: StructureRegistry, cfg: SLMConfig, lambda_star: Hashable, C2: float = 1.0) -> SieveSumResult:
    """
    Evaluates Σ_Z γ(Z)δ(Z)/(w(λ*)ν_{λ*}(Z*)δ(Z*))·exp(2C2ε(Z)²) on a registry.

    ν_{λ*} is uniform on Z̄_{λ*}, and every structure of a class shares γ, δ and ε, so the sum over structures is a
    sum over classes weighted by |Z̄_λ|. The cancelled form is Σ_λ exp((2C2−D)ε_λ² + Dε_{λ*}²)·|Z̄_{λ*}|; the bound
    exp((D+1)ε_{λ*}² + 1) holds whenever D ≥ 2C2+1 and the complexity condition holds.

    Raises:
        DomainError: If ``C2`` is not positive.
        StructureError: If ``lambda_star`` is not a class of the registry.
    """
    if not C2 > 0:
        raise DomainError(f"C2 must be positive, got {C2!r}.")
    star = registry.spec(lambda_star)
    eps_star = epsilon_sq(star)
    log_denominator = log_weight_slm(star, cfg) - star.log_count + log_delta(star)

    direct, cancelled = [], []
    for spec in registry.specs:
        eps = epsilon_sq(spec)
        log_gamma = log_weight_slm(spec, cfg) - spec.log_count
        direct.append(spec.log_count + log_gamma + log_delta(spec) - log_denominator + 2.0 * C2 * eps)
        cancelled.append((2.0 * C2 - cfg.D) * eps + cfg.D * eps_star + star.log_count)

    log_sum_direct = float(logsumexp(direct))
    log_bound = (cfg.D + 1.0) * eps_star + 1.0
    return SieveSumResult(
        log_sum_direct=log_sum_direct,
        log_sum_cancelled=float(logsumexp(cancelled)),
        log_bound=log_bound,
        holds=log_sum_direct <= log_bound + 1e-9,
    )
