"""
Chi-square tests of the sparse models and Monte Carlo estimates of their error probabilities.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ebayes.decomp.models import SpikeSlabRateMap, Support, iter_supports
from ebayes.errors import DomainError


def _threshold(s: int, s_star: int, p: int) -> float:
    rates = SpikeSlabRateMap(p)
    return 6.0 * (rates.rate_sq(s) + rates.rate_sq(s_star))


def _check_dims(Y: np.ndarray, theta_star: np.ndarray, S: Support, S_star: Support) -> None:
    if Y.shape != theta_star.shape or S.p != Y.size or S_star.p != Y.size:
        raise DomainError("Y, theta_star and the supports must share the dimension p.")


def test_reject_sequence(Y, theta_star, S: Support, S_star: Support) -> bool:
    """
    Sequence test φ_S: rejects when ‖(Y−θ*)_{S∪S*}‖² > 6(|S|+|S*|)·log p.
    """
    Y = np.asarray(Y, dtype=float)
    theta_star = np.asarray(theta_star, dtype=float)
    _check_dims(Y, theta_star, S, S_star)
    union = list(S.union(S_star).indices)
    statistic = float(np.sum((Y[union] - theta_star[union]) ** 2))
    return statistic > _threshold(S.size, S_star.size, Y.size)


def max_sequence_rejections(residuals: np.ndarray, S_star: Support) -> np.ndarray:
    """
    Evaluates max_S φ_S for each row of ``residuals`` (rows of Y − θ*).

    For a fixed |S| = s the statistic is largest when S holds the s largest squared residuals outside S*, so the
    maximum over all 2^p supports reduces to p − |S*| + 1 comparisons per row.
    """
    residuals = np.atleast_2d(np.asarray(residuals, dtype=float))
    p = residuals.shape[1]
    inside = S_star.mask()
    base = np.sum(residuals[:, inside] ** 2, axis=1)
    outside = np.sort(residuals[:, ~inside] ** 2, axis=1)[:, ::-1]
    gains = np.concatenate([np.zeros((residuals.shape[0], 1)), np.cumsum(outside, axis=1)], axis=1)
    thresholds = np.array([_threshold(s, S_star.size, p) for s in range(gains.shape[1])])
    return np.any(base[:, None] + gains > thresholds[None, :], axis=1)


def max_test_sequence(Y, theta_star, S_star: Support) -> bool:
    """
    The combined sequence test φ = max over all S ⊂ [p] of φ_S.
    """
    Y = np.asarray(Y, dtype=float)
    theta_star = np.asarray(theta_star, dtype=float)
    _check_dims(Y, theta_star, S_star, S_star)
    return bool(max_sequence_rejections(Y - theta_star, S_star)[0])


def _projection_basis(X: np.ndarray, union: Support) -> np.ndarray:
    if union.size == 0:
        return np.zeros((X.shape[0], 0))
    q, _ = np.linalg.qr(X[:, list(union.indices)])
    return q


def test_reject_regression(Y, X, theta_star, S: Support, S_star: Support) -> bool:
    """
    Regression test: rejects when ‖P_{S∪S*}(Y − Xθ*)‖² > 6(|S|+|S*|)·log p.

    P_{S∪S*} projects onto the column span of X restricted to S ∪ S*.
    """
    Y = np.asarray(Y, dtype=float)
    X = np.asarray(X, dtype=float)
    theta_star = np.asarray(theta_star, dtype=float)
    p = X.shape[1]
    if Y.shape != (X.shape[0],) or theta_star.shape != (p,) or S.p != p or S_star.p != p:
        raise DomainError("Y, X, theta_star and the supports have inconsistent dimensions.")
    q = _projection_basis(X, S.union(S_star))
    statistic = float(np.sum((q.T @ (Y - X @ theta_star)) ** 2))
    return statistic > _threshold(S.size, S_star.size, p)


def max_regression_rejections(residuals: np.ndarray, X: np.ndarray, S_star: Support, s_max: int) -> np.ndarray:
    """
    Evaluates max over |S| ≤ s_max of the regression test for each row of ``residuals`` (rows of Y − Xθ*).
    """
    residuals = np.atleast_2d(np.asarray(residuals, dtype=float))
    p = X.shape[1]
    rejected = np.zeros(residuals.shape[0], dtype=bool)
    for S in iter_supports(p, s_max):
        q = _projection_basis(X, S.union(S_star))
        statistic = np.sum((residuals @ q) ** 2, axis=1)
        rejected |= statistic > _threshold(S.size, S_star.size, p)
    return rejected


def max_test_regression(Y, X, theta_star, S_star: Support, s_max: int) -> bool:
    """
    The combined regression test over all supports of size at most ``s_max``.
    """
    X = np.asarray(X, dtype=float)
    residual = np.asarray(Y, dtype=float) - X @ np.asarray(theta_star, dtype=float)
    return bool(max_regression_rejections(residual, X, S_star, s_max)[0])


@dataclass(slots=True)
class TestErrorEstimate:
    """
    Monte Carlo error probabilities of the combined test.

    Attributes:
        type_one: Rejection frequency under θ*.
        type_one_se: Its binomial standard error.
        type_one_bound: The bound p^{−|S*|}.
        power: Rejection frequency under the alternative.
        power_se: Its binomial standard error.
        power_bound: 1 − exp(−(2/3)ε² + 5(|S|+|S*|)·log p), floored at 0.
        eps_sq: Squared separation ε² of the alternative.
        n_mc: Monte Carlo replicates.
    """

    __test__ = False

    type_one: float
    type_one_se: float
    type_one_bound: float
    power: float
    power_se: float
    power_bound: float
    eps_sq: float
    n_mc: int


def _binomial_se(freq: float, n: int) -> float:
    return math.sqrt(freq * (1.0 - freq) / n)


def estimate_test_errors(
    p: int,
    s_star: int,
    n_mc: int,
    rng: np.random.Generator,
    separation: float = 20.0,
    design: Optional[np.ndarray] = None,
    s_max: Optional[int] = None,
) -> TestErrorEstimate:
    """
    Monte Carlo type-1 error and power of the combined chi-square test.

    The truth θ* has unit entries on S* = {0, …, s*−1}. The alternative moves θ* along the same support (or along
    coordinate 0 when S* is empty) by ε² = separation·s*·log p, measured by ‖θ−θ*‖² in the sequence model and by
    ‖X(θ−θ*)‖² when a design is given.

    Args:
        p: Dimension.
        s_star: Size of the true support.
        n_mc: Monte Carlo replicates per error type.
        rng: Random stream.
        separation: Multiple of s*·log p defining the alternative.
        design: Optional n×p design selecting the regression test.
        s_max: Largest |S| scanned by the regression test (default p).

    Returns:
        The two frequencies with their standard errors and bounds.
    """
    if not 0 <= s_star <= p or n_mc < 1:
        raise DomainError("need 0 <= s_star <= p and n_mc >= 1.")
    S_star = Support(tuple(range(s_star)), p)
    S_alt = S_star if s_star > 0 else Support((0,), p)
    theta_star = S_star.mask().astype(float)
    eps_sq = separation * max(s_star, 1) * math.log(p)

    direction = S_alt.mask().astype(float)
    if design is None:
        shift = direction * math.sqrt(eps_sq / direction.sum())

        def rejections(mean_shift: np.ndarray) -> np.ndarray:
            noise = rng.standard_normal((n_mc, p))
            return max_sequence_rejections(noise + mean_shift, S_star)

        null_shift, alt_shift = np.zeros(p), shift
    else:
        X = np.asarray(design, dtype=float)
        top = p if s_max is None else s_max
        signal = X @ direction
        alt_shift = signal * math.sqrt(eps_sq / float(signal @ signal))
        null_shift = np.zeros(X.shape[0])

        def rejections(mean_shift: np.ndarray) -> np.ndarray:
            noise = rng.standard_normal((n_mc, X.shape[0]))
            return max_regression_rejections(noise + mean_shift, X, S_star, top)

    type_one = float(np.mean(rejections(null_shift)))
    power = float(np.mean(rejections(alt_shift)))
    log_p = math.log(p)
    power_bound = 1.0 - math.exp(-(2.0 / 3.0) * eps_sq + 5.0 * (S_alt.size + s_star) * log_p)
    return TestErrorEstimate(
        type_one=type_one,
        type_one_se=_binomial_se(type_one, n_mc),
        type_one_bound=math.exp(-s_star * log_p),
        power=power,
        power_se=_binomial_se(power, n_mc),
        power_bound=max(0.0, power_bound),
        eps_sq=eps_sq,
        n_mc=n_mc,
    )

