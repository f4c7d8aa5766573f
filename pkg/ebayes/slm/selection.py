import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, Iterator, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.special import logsumexp

from ebayes import utils
from ebayes.errors import CapabilityError, DomainError, PrecisionError
from ebayes.slm.marginal import log_marginal_structure
from ebayes.slm.models import SLMConfig, Structure, StructureRegistry
from ebayes.slm.weights import epsilon_sq, log_weight_slm

logger = logging.getLogger(__name__)

CHUNK = 256
UNSTABLE_SE = 3.0


@dataclass(slots=True)
class LambdaScore:
    """
    Score of one structure class.

    Attributes:
        lambda_id: The class.
        score: log w(λ) + log of the average structure marginal over Z̄_λ.
        se: Delta-method standard error of ``score``.
        n_structures: Structures whose marginal was estimated.
        mode: "exact" or "subsample".
        approximate: Whether the structure sum was estimated rather than enumerated.
        n_low_ess: Structures whose importance sampler failed its ESS diagnostic.
    """

    lambda_id: Hashable
    score: float
    se: float
    n_structures: int
    mode: str
    approximate: bool
    n_low_ess: int = 0


@dataclass(slots=True)
class SelectionResult:
    """
    Attributes:
        lambda_hat: The selected class.
        scores: LambdaScore per class.
        unstable: Whether the top two scores are within three combined standard errors.
        post_mean: Posterior mean of the signal X_Z B given λ̂.
        top_structure: Key of the structure with the largest marginal in the selected class.
    """

    lambda_hat: Hashable
    scores: Dict[Hashable, LambdaScore]
    unstable: bool
    post_mean: np.ndarray
    top_structure: Optional[Tuple]

    @property
    def per_lambda_log_scores(self) -> Dict[Hashable, float]:
        return {lambda_id: s.score for lambda_id, s in self.scores.items()}

    @property
    def approximate(self) -> bool:
        return any(s.approximate for s in self.scores.values())


class _ClassSum:
    """
    Streaming logsumexp of structure marginals with the matching mixture of signal means.
    """

    def __init__(self, size: int):
        self.log_values: List[float] = []
        self.ses: List[float] = []
        self.n_low_ess = 0
        self._shift = -math.inf
        self._signal = np.zeros(size)
        self._mass = 0.0
        self._top = -math.inf
        self.top_key: Optional[Tuple] = None

    def add(self, key: Tuple, estimate: float, se: float, signal: Optional[np.ndarray]) -> None:
        if estimate > self._top:
            self._top, self.top_key = estimate, key
        self.log_values.append(estimate)
        self.ses.append(se)
        if signal is None:
            self.n_low_ess += 1
            return
        if estimate > self._shift:
            scale = math.exp(self._shift - estimate) if math.isfinite(self._shift) else 0.0
            self._signal *= scale
            self._mass *= scale
            self._shift = estimate
        weight = math.exp(estimate - self._shift)
        self._signal += weight * signal
        self._mass += weight

    def log_sum(self) -> Tuple[float, float]:
        if not self.log_values:
            return -math.inf, 0.0
        values = np.array(self.log_values)
        total = float(logsumexp(values))
        shares = np.exp(values - total)
        return total, float(np.sqrt(np.sum((shares * np.array(self.ses)) ** 2)))

    def signal_mean(self) -> np.ndarray:
        return self._signal / self._mass if self._mass > 0 else self._signal


def _structure_marginal(Y: np.ndarray, structure: Structure, tau: float, n_is: int, seed: int):
    rng = utils.derive_rng(seed, utils.stable_seed(structure.lambda_id, structure.key))
    try:
        fit = log_marginal_structure(Y, structure.operator, tau, n_is, rng)
    except PrecisionError as e:
        return structure.key, e.estimate, e.se, None
    return structure.key, fit.estimate, fit.se, structure.operator @ fit.post_mean


def _chunks(structures: Iterable[Structure]) -> Iterator[List[Structure]]:
    iterator = iter(structures)
    while chunk := list(itertools.islice(iterator, CHUNK)):
        yield chunk


def _class_structures(registry: StructureRegistry, lambda_id: Hashable, cfg: SLMConfig, seed: int) -> Tuple[Iterable[Structure], str, float]:
    """
    The structures to score for a class, the mode used, and the log correction turning their logsumexp into
    log Σ_{Z ∈ Z̄_λ} exp(L_Z) − log|Z̄_λ|.
    """
    spec = registry.spec(lambda_id)
    candidates = registry.candidate_count(lambda_id)
    if candidates <= cfg.max_structures:
        return registry.structures(lambda_id), "exact", -spec.log_count

    if cfg.large_class == "error":
        raise CapabilityError(
            f"class {lambda_id!r} of {registry.registry_name} has {candidates} candidates, more than the budget of "
            f"{cfg.max_structures}; set large_class to 'subsample'."
        )
    rng = utils.derive_rng(seed, utils.stable_seed("subsample", lambda_id))
    sample = [registry.sample_structure(lambda_id, rng) for _ in range(cfg.n_subsample)]
    return sample, "subsample", -math.log(cfg.n_subsample)


def eb_select_lambda(
    Y: np.ndarray,
    registry: StructureRegistry,
    cfg: SLMConfig,
    rng: np.random.Generator,
    n_jobs: int = 1,
) -> SelectionResult:
    """
    Empirical Bayes choice of the structure class.

    score(λ) = log w(λ) + logsumexp_{Z ∈ Z̄_λ} L_Z − log|Z̄_λ| with L_Z the structure marginal. Classes with more
    candidates than ``cfg.max_structures`` raise CapabilityError, or with ``cfg.large_class`` "subsample" are scored
    on ``cfg.n_subsample`` uniform draws from Z̄_λ with the count correction and flagged approximate.

    Every structure draws from its own stream derived from one seed taken from ``rng`` and the structure key, so
    the result does not depend on the enumeration order or on ``n_jobs``.

    Args:
        Y: Observation vector of length N.
        registry: The structure classes.
        cfg: Weight exponent, prior rate and budgets.
        rng: Random stream.
        n_jobs: joblib workers for the structure marginals.

    Returns:
        The SelectionResult; ties go to the smaller ε(Z_λ)².

    Raises:
        CapabilityError: If a class exceeds the budget and ``cfg.large_class`` is "error".
    """
    Y = np.asarray(Y, dtype=float).ravel()
    if not np.all(np.isfinite(Y)):
        raise DomainError("Y must be finite.")
    if not registry.specs:
        raise DomainError(f"{registry.registry_name} has no structure classes.")
    seed = int(rng.integers(2**62))

    scores: Dict[Hashable, LambdaScore] = {}
    sums: Dict[Hashable, _ClassSum] = {}
    with Parallel(n_jobs=n_jobs) as parallel:
        for spec in registry.specs:
            structures, mode, correction = _class_structures(registry, spec.lambda_id, cfg, seed)
            acc = _ClassSum(Y.size)
            for chunk in _chunks(structures):
                for key, estimate, se, signal in parallel(delayed(_structure_marginal)(Y, s, cfg.tau, cfg.n_is, seed) for s in chunk):
                    acc.add(key, estimate, se, signal)

            total, se = acc.log_sum()
            score = log_weight_slm(spec, cfg) + total + correction
            approximate = mode != "exact"
            scores[spec.lambda_id] = LambdaScore(spec.lambda_id, score, se, len(acc.log_values), mode, approximate, acc.n_low_ess)
            sums[spec.lambda_id] = acc
            if approximate:
                logger.warning("score of class %r is approximate (%s over %d structures)", spec.lambda_id, mode, len(acc.log_values))
            if acc.n_low_ess:
                logger.warning("%d structures of class %r failed the ESS diagnostic", acc.n_low_ess, spec.lambda_id)
            logger.debug("class %r: score=%.6g se=%.3g structures=%d", spec.lambda_id, score, se, len(acc.log_values))

    eps = {spec.lambda_id: epsilon_sq(spec) for spec in registry.specs}
    ranked = sorted(scores.values(), key=lambda s: (-s.score, eps[s.lambda_id]))
    best = ranked[0]
    unstable = False
    if len(ranked) > 1 and math.isfinite(best.score):
        gap = best.score - ranked[1].score
        unstable = bool(gap < UNSTABLE_SE * math.hypot(best.se, ranked[1].se))
        if unstable:
            logger.warning("selection of %r is unstable: gap %.3g to %r", best.lambda_id, gap, ranked[1].lambda_id)

    return SelectionResult(
        lambda_hat=best.lambda_id,
        scores=scores,
        unstable=unstable,
        post_mean=sums[best.lambda_id].signal_mean(),
        top_structure=sums[best.lambda_id].top_key,
    )
