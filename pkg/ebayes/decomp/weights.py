import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, xlogy

from ebayes import utils
from ebayes.decomp.models import iter_supports
from ebayes.errors import CapabilityError, DomainError

logger = logging.getLogger(__name__)

MAX_GROUPED_P = 40
MAX_ENUMERATED_P = 16


def _check_size(s: int, p: int) -> None:
    if p < 1 or not 0 <= s <= p:
        raise DomainError(f"support size must satisfy 0 <= s <= p, got s={s}, p={p}.")


def log_nu_lambda(s: int, p: int, lam: float) -> float:
    """
    log ν_λ(S) = (p−s)·log(1−λ) + s·log λ with 0·log 0 = 0.
    """
    _check_size(s, p)
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam!r}.")
    return float(xlogy(p - s, 1.0 - lam) + xlogy(s, lam))


def nu_lambda(s: int, p: int, lam: float) -> float:
    """
    ν_λ(S) = (1−λ)^{p−s}·λ^s, the prior mass the spike-and-slab prior gives to a support of size s.
    """
    return math.exp(log_nu_lambda(s, p, lam))


def _check_exponents(p: int, alpha: float, beta: float) -> float:
    if not (alpha > 0 and beta > 0):
        raise DomainError(f"alpha and beta must be positive, got {alpha!r}, {beta!r}.")
    total = p + alpha + beta - 2.0
    if total <= 0:
        raise DomainError(f"p + alpha + beta - 2 must be positive, got {total!r}.")
    return total


def lambda_star(s: int, p: int, alpha: float, beta: float) -> float:
    """
    The maximizer (α+s−1)/(p+α+β−2) of w(λ)ν_λ(s), clipped to [0, 1].
    """
    _check_size(s, p)
    total = _check_exponents(p, alpha, beta)
    return float(min(1.0, max(0.0, (alpha + s - 1.0) / total)))


def effective_weight(s: int, p: int, alpha: float, beta: float) -> float:
    """
    log γ_s, the largest weight max_λ w(λ)ν_λ(s) any λ puts on a support of size s.

    Closed form (α+s−1)·log((α+s−1)/c) + (p−s+β−1)·log((p−s+β−1)/c) with c = p+α+β−2 and 0·log 0 = 0.
    A negative exponent makes the weight unbounded at an endpoint and returns ``inf``.

    Raises:
        DomainError: If c ≤ 0 or the arguments are out of range.
    """
    _check_size(s, p)
    total = _check_exponents(p, alpha, beta)
    a = alpha + s - 1.0
    b = p - s + beta - 1.0
    if a < 0 or b < 0:
        return math.inf
    return float(xlogy(a, a / total) + xlogy(b, b / total))


def gamma_ratio_bounds(p: int, alpha: float, beta: float) -> tuple[float, float]:
    """
    Bracket [α/(e(p+β−1)), e(α+p)/(β−1)] of the consecutive ratio γ_{s+1}/γ_s.
    """
    lower = alpha / (math.e * (p + beta - 1.0))
    upper = math.e * (alpha + p) / (beta - 1.0) if beta > 1.0 else math.inf
    return lower, upper


@dataclass(slots=True)
class SumLemmaResult:
    """
    Outcome of the exact evaluation of the spike-and-slab sum.

    Attributes:
        log_sum: log Σ_s C(p,s)·γ_s/γ_{s*}·p^{2·C2·s}.
        minimal_C4: Smallest C4 with log_sum ≤ C4·s*·log p.
        lambda_star: The hyperparameter attaining γ_{s*}.
        c1_prime: Smallest C1' with α/(e(p+β−1)) ≥ p^{−C1'}.
    """

    log_sum: float
    minimal_C4: float
    lambda_star: float
    c1_prime: float


def _minimal_c4(log_sum: float, s_star: int, p: int) -> float:
    scale = s_star * math.log(p)
    if scale == 0.0:
        return 0.0 if log_sum <= 0.0 else math.inf
    return log_sum / scale


def verify_sum_lemma(p: int, alpha: float, beta: float, C2: float, s_star: int) -> SumLemmaResult:
    """
    Evaluates the sum of the spike-and-slab decomposition lemma exactly, grouped by support size.

    γ depends on S only through |S|, so Σ_S γ(S)/γ(S*)·exp(2·C2·|S|·log p) groups into p+1 binomial terms, each
    summed in log-space.

    Args:
        p: Dimension, at most 40.
        alpha: First weight exponent.
        beta: Second weight exponent.
        C2: Rate constant of the lemma.
        s_star: Size of the true support.

    Returns:
        The log-sum and the constants the lemma asks about.

    Raises:
        CapabilityError: If ``p`` exceeds 40.
    """
    if p > MAX_GROUPED_P:
        raise CapabilityError(f"exact summation supports p <= {MAX_GROUPED_P}, got {p}.")
    _check_size(s_star, p)
    log_p = math.log(p)
    sizes = np.arange(p + 1)
    log_gamma = np.array([effective_weight(int(s), p, alpha, beta) for s in sizes])
    if not np.isfinite(log_gamma[s_star]):
        raise DomainError("the effective weight of the true support is unbounded.")
    terms = utils.log_binomial(p, sizes) + log_gamma - log_gamma[s_star] + 2.0 * C2 * sizes * log_p
    log_sum = float(logsumexp(terms))
    c1_prime = -math.log(alpha / (math.e * (p + beta - 1.0))) / log_p if log_p > 0 else math.nan
    result = SumLemmaResult(
        log_sum=log_sum,
        minimal_C4=_minimal_c4(log_sum, s_star, p),
        lambda_star=lambda_star(s_star, p, alpha, beta),
        c1_prime=c1_prime,
    )
    logger.debug("sum lemma p=%d s*=%d: log_sum=%.6g C4=%.6g", p, s_star, result.log_sum, result.minimal_C4)
    return result


def sum_lemma_by_enumeration(p: int, alpha: float, beta: float, C2: float, s_star: int) -> float:
    """
    The log-sum of :func:`verify_sum_lemma` by explicit enumeration of all 2^p supports.

    Raises:
        CapabilityError: If ``p`` exceeds 16.
    """
    if p > MAX_ENUMERATED_P:
        raise CapabilityError(f"support enumeration supports p <= {MAX_ENUMERATED_P}, got {p}.")
    log_p = math.log(p)
    reference = effective_weight(s_star, p, alpha, beta)
    terms = [effective_weight(S.size, p, alpha, beta) - reference + 2.0 * C2 * S.size * log_p for S in iter_supports(p)]
    return float(logsumexp(terms))
