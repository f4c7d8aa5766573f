import logging
import math
from typing import Hashable, List

import numpy as np
from scipy.special import logsumexp

from ebayes.bridge.evidence import check_observation, chib_log_evidence, exact_log_evidence, gaussian_kl, posterior, posterior_gain
from ebayes.bridge.models import ConjugateModel, ConjugateModelFamily, EquivalenceReport
from ebayes.errors import CapabilityError, DomainError

logger = logging.getLogger(__name__)

MAX_MODELS = 5


def _log_pi(family: ConjugateModelFamily) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(family.pi)


def _direct_log_mixture_weights(family: ConjugateModelFamily, Y: np.ndarray) -> np.ndarray:
    log_pi = _log_pi(family)
    terms = np.array([lp + chib_log_evidence(m, Y) if lp > -np.inf else -np.inf for m, lp in zip(family.models, log_pi)])
    return terms - logsumexp(terms)


def kl_to_hierarchical(family: ConjugateModelFamily, Y, k: Hashable, q_mean, q_cov) -> float:
    """
    KL of a Gaussian Q supported on model k to the hierarchical posterior.

    Restricted to Ξ_k the hierarchical posterior is ω_k·Π^{(k)}(·|Y), so the KL is KL(Q ‖ Π^{(k)}(·|Y)) − log ω_k.
    The component posterior is taken in gain form and ω_k from the posterior-mean evidence identity.

    Returns:
        The KL, inf when π(k) = 0.
    """
    Y = check_observation(family, Y)
    i = family.index(k)
    log_omega = _direct_log_mixture_weights(family, Y)[i]
    if log_omega == -np.inf:
        return math.inf
    mean, cov = posterior_gain(family.models[i], Y)
    return gaussian_kl(np.asarray(q_mean, dtype=float), np.atleast_2d(q_cov), mean, cov) - log_omega


def verify_eb_vb_equivalence(family: ConjugateModelFamily, Y) -> EquivalenceReport:
    """
    Checks that maximizing the weighted evidence and minimizing the KL to the hierarchical posterior over
    distributions supported on a single model pick the same model.

    The minimal KL over {Q : Q(Ξ_k) = 1} is attained at the model posterior and equals log p̄(Y) − log π(k) −
    log evidence_k in closed form; it is also evaluated directly as the Gaussian KL of the precision-form posterior
    to the hierarchical posterior. Models with π(k) = 0 get an infinite KL and take no part in the residual.

    Raises:
        CapabilityError: If the family has more than five models.
    """
    if len(family) > MAX_MODELS:
        raise CapabilityError(f"equivalence check supports at most {MAX_MODELS} models, got {len(family)}.")
    Y = check_observation(family, Y)
    log_pi = _log_pi(family)
    labels = [m.k for m in family.models]
    weighted = np.array([lp + exact_log_evidence(family, m.k, Y) if lp > -np.inf else -np.inf for m, lp in zip(family.models, log_pi)])
    log_bar = float(logsumexp(weighted))

    kl_values, kl_direct = {}, {}
    residual = 0.0
    for model, value in zip(family.models, weighted):
        if value == -np.inf:
            kl_values[model.k] = kl_direct[model.k] = math.inf
            continue
        kl_values[model.k] = log_bar - float(value)
        mean, cov = posterior(family, model.k, Y)
        kl_direct[model.k] = kl_to_hierarchical(family, Y, model.k, mean, cov)
        residual = max(residual, abs(kl_values[model.k] - kl_direct[model.k]))

    k_hat_mmle = labels[int(np.argmax(weighted))]
    k_hat_kl = min(labels, key=lambda k: kl_values[k])
    agree = k_hat_mmle == k_hat_kl
    logger.debug("EB/VB check: k_mmle=%r k_kl=%r residual=%.3e", k_hat_mmle, k_hat_kl, residual)
    if not agree:
        logger.warning("evidence and KL choices disagree: %r vs %r", k_hat_mmle, k_hat_kl)
    return EquivalenceReport(
        k_hat_mmle=k_hat_mmle,
        k_hat_kl=k_hat_kl,
        kl_values=kl_values,
        kl_direct=kl_direct,
        log_evidence_bar=log_bar,
        identity_residual=residual,
        agree=agree,
    )


def suboptimal_kl_margin(family: ConjugateModelFamily, Y) -> float:
    """
    Smallest excess KL of another model's posterior over the selected model's posterior.

    Raises:
        DomainError: If fewer than two models have positive probability.
    """
    report = verify_eb_vb_equivalence(family, Y)
    others = [k for k, v in report.kl_values.items() if k != report.k_hat_kl and math.isfinite(v)]
    if not others:
        raise DomainError("need at least two models with positive probability.")
    best = report.kl_direct[report.k_hat_kl]
    return min(report.kl_direct[k] for k in others) - best


def make_sieve_family(design: np.ndarray, sigma2: float, pi) -> ConjugateModelFamily:
    """
    Nested family whose k-th model uses the first k columns of ``design`` with prior N(0, σ²I_k), k = 1..len(pi).
    """
    design = np.atleast_2d(np.asarray(design, dtype=float))
    pi = np.atleast_1d(np.asarray(pi, dtype=float))
    if pi.size > design.shape[1]:
        raise DomainError(f"{pi.size} models need at least as many design columns, got {design.shape[1]}.")
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2!r}.")
    models = [ConjugateModel(k, np.zeros(k), sigma2 * np.eye(k), design[:, :k]) for k in range(1, pi.size + 1)]
    return ConjugateModelFamily(models, pi)


def random_family(rng: np.random.Generator, n: int, dims: List[int]) -> ConjugateModelFamily:
    """
    A random conjugate family: Gaussian designs and means, Wishart-like covariances, Dirichlet(1) model weights.
    """
    models = []
    for k, d in enumerate(dims, start=1):
        W = rng.standard_normal((d, d))
        models.append(ConjugateModel(k, rng.standard_normal(d), W @ W.T / d + 0.5 * np.eye(d), rng.standard_normal((n, d))))
    return ConjugateModelFamily(models, rng.dirichlet(np.ones(len(dims))))


def sample_observation(family: ConjugateModelFamily, rng: np.random.Generator) -> np.ndarray:
    """
    Y drawn from the hierarchical model: k ~ π, θ ~ N(μ_k, Σ_k), Y = A_kθ + noise.
    """
    model: ConjugateModel = family.models[int(rng.choice(len(family), p=family.pi))]
    theta = rng.multivariate_normal(model.mu, model.cov)
    return model.design @ theta + rng.standard_normal(model.n_obs)
