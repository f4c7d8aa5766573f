import itertools
import math

import numpy as np
import pytest

from ebayes import utils
from ebayes.decomp import (
    SpikeSlabRateMap,
    Support,
    effective_weight,
    estimate_slab_ball_mass,
    estimate_test_errors,
    gamma_ratio_bounds,
    iter_supports,
    lambda_star,
    log_nu_lambda,
    mass_ratio_check,
    nu_lambda,
    sum_lemma_by_enumeration,
    verify_sum_lemma,
)
from ebayes.decomp import chisq
from ebayes.errors import CapabilityError, DomainError
from ebayes.seq_eb import SpikeSlabConfig


def test_support_is_normalized_and_validated():
    assert Support.of([3, 1, 3], 5).indices == (1, 3)
    assert Support.from_mask([False, True, True]).indices == (1, 2)
    assert Support((0, 2), 4).union(Support((1, 2), 4)).indices == (0, 1, 2)
    with pytest.raises(DomainError):
        Support((2, 1), 4)
    with pytest.raises(DomainError):
        Support((4,), 4)


def test_rate_map():
    rates = SpikeSlabRateMap(8)
    assert rates.rate_sq(0) == 0.0
    assert rates.rate_sq(3) == pytest.approx(3 * math.log(8))
    assert rates.delta(Support((1, 4), 8)) == 1.0
    with pytest.raises(DomainError):
        rates.rate_sq(-1)
    with pytest.raises(DomainError):
        SpikeSlabRateMap(0)


def test_spike_slab_masses_sum_to_one():
    total = sum(nu_lambda(S.size, 10, 0.3) for S in iter_supports(10))
    assert total == pytest.approx(1.0, abs=1e-12)
    assert sum(1 for _ in iter_supports(10)) == 2**10
    assert log_nu_lambda(0, 4, 0.0) == 0.0
    assert log_nu_lambda(2, 4, 0.0) == -np.inf


@pytest.mark.parametrize("p,alpha,beta", [(6, 1.0, 1.0), (10, 1.0, 10.0), (15, 2.0, 225.0)])
def test_effective_weight_is_the_maximum_over_lambda(p, alpha, beta):
    cfg = SpikeSlabConfig(alpha=alpha, beta=beta)
    for s in range(p + 1):

        def objective(lam: float) -> float:
            log_w = cfg.log_weight(lam)
            return -np.inf if log_w == -np.inf else log_w + log_nu_lambda(s, p, lam)

        x_hat, numeric = utils.maximize_unit_interval(objective, n_grid=2048, tol=1e-12)
        assert effective_weight(s, p, alpha, beta) == pytest.approx(numeric, abs=1e-8)
        assert x_hat == pytest.approx(lambda_star(s, p, alpha, beta), abs=1e-5)


def test_effective_weight_edge_cases():
    assert effective_weight(0, 6, 1.0, 1.0) == 0.0
    assert effective_weight(0, 6, 0.5, 1.0) == math.inf
    with pytest.raises(DomainError):
        effective_weight(7, 6, 1.0, 1.0)


def test_consecutive_weight_ratios_stay_in_their_bracket():
    for p in (8, 12, 20):
        beta = float(p) ** 4
        lower, upper = gamma_ratio_bounds(p, 1.0, beta)
        log_gamma = [effective_weight(s, p, 1.0, beta) for s in range(p + 1)]
        ratios = np.exp(np.diff(log_gamma))
        assert np.all(ratios >= lower)
        assert np.all(ratios <= upper)


@pytest.mark.parametrize("p", [8, 12, 16])
def test_sum_lemma_bound_holds_for_every_true_size(p):
    beta = float(p) ** 4
    for s_star in range(p + 1):
        log_sum = verify_sum_lemma(p, 1.0, beta, 1.0, s_star).log_sum
        assert log_sum <= (12.0 * s_star * math.log(p) if s_star else 2.0)


def test_sum_lemma_constant_at_the_reference_point():
    result = verify_sum_lemma(12, 1.0, 12.0**4, 1.0, 2)
    assert math.isfinite(result.minimal_C4)
    assert result.minimal_C4 <= 12.0
    assert result.lambda_star == pytest.approx(2.0 / (12 + 12.0**4 - 1.0))


def test_sum_lemma_empty_truth_vanishes_as_beta_grows():
    values = [verify_sum_lemma(12, 1.0, 12.0**k, 0.0, 0).log_sum for k in (4, 6, 8)]
    assert values[0] > values[1] > values[2] > 0.0
    assert values[2] < 1e-6
    assert verify_sum_lemma(12, 1.0, 12.0**4, 0.0, 0).minimal_C4 == math.inf


@pytest.mark.parametrize("p,s_star", [(8, 0), (8, 2), (10, 3)])
def test_grouped_sum_equals_full_enumeration(p, s_star):
    grouped = verify_sum_lemma(p, 1.0, float(p) ** 4, 1.0, s_star).log_sum
    assert sum_lemma_by_enumeration(p, 1.0, float(p) ** 4, 1.0, s_star) == pytest.approx(grouped, abs=1e-9)


def test_sum_lemma_size_limits():
    with pytest.raises(CapabilityError):
        verify_sum_lemma(41, 1.0, 1.0, 1.0, 1)
    with pytest.raises(CapabilityError):
        sum_lemma_by_enumeration(17, 1.0, 1.0, 1.0, 1)


def test_sequence_test_thresholds():
    p = 8
    S_star = Support((0, 1), p)
    theta_star = S_star.mask().astype(float)
    assert not chisq.test_reject_sequence(theta_star, theta_star, Support((), p), S_star)
    far = theta_star.copy()
    far[5] += 10.0
    assert chisq.test_reject_sequence(far, theta_star, Support((5,), p), S_star)
    assert not chisq.test_reject_sequence(far, theta_star, Support((4,), p), S_star)
    assert chisq.max_test_sequence(far, theta_star, S_star)
    with pytest.raises(DomainError):
        chisq.test_reject_sequence(np.zeros(3), theta_star, S_star, S_star)


def test_max_regression_test():
    p = 8
    S_star = Support((0, 1), p)
    theta_star = S_star.mask().astype(float)
    far = theta_star.copy()
    far[5] += 10.0
    assert not chisq.max_test_regression(theta_star, np.eye(p), theta_star, S_star, 2)
    assert chisq.max_test_regression(far, np.eye(p), theta_star, S_star, 2)


def test_max_sequence_rejections_match_brute_force(rng):
    p = 6
    S_star = Support((0,), p)
    residuals = 2.5 * rng.standard_normal((200, p))
    fast = chisq.max_sequence_rejections(residuals, S_star)
    theta_star = np.zeros(p)
    slow = [any(chisq.test_reject_sequence(r, theta_star, S, S_star) for S in iter_supports(p)) for r in residuals]
    assert fast.tolist() == slow


def test_regression_test_reduces_to_the_sequence_test(rng):
    p = 5
    X = np.eye(p)
    S_star = Support((1,), p)
    theta_star = S_star.mask().astype(float)
    for _ in range(50):
        Y = theta_star + 3.0 * rng.standard_normal(p)
        for S in itertools.islice(iter_supports(p), 16):
            assert chisq.test_reject_regression(Y, X, theta_star, S, S_star) == chisq.test_reject_sequence(Y, theta_star, S, S_star)


def test_sequence_test_error_probabilities(rng):
    est = estimate_test_errors(8, 2, 10_000, rng)
    assert est.type_one_bound == pytest.approx(8.0**-2)
    assert est.type_one <= est.type_one_bound + 3.0 * est.type_one_se
    assert est.power >= 0.99
    assert est.power >= est.power_bound - 3.0 * est.power_se


def test_regression_test_error_probabilities(rng):
    X = rng.standard_normal((20, 6))
    est = estimate_test_errors(6, 1, 4000, rng, separation=30.0, design=X, s_max=3)
    assert est.type_one <= est.type_one_bound + 3.0 * est.type_one_se
    assert est.power >= 0.99


def test_slab_ball_mass(rng):
    p = 4
    theta_star = np.array([1.0, 0.0, 0.0, 0.0])
    empty = estimate_slab_ball_mass(Support((), p), theta_star, 2.0, 1.0, 1000, rng)
    assert empty.mass == 1.0 and empty.se == 0.0
    assert estimate_slab_ball_mass(Support((), p), theta_star, 0.5, 1.0, 1000, rng).mass == 0.0

    # one Laplace(1) coordinate centred at 1: P(|X - 1| <= 1) = (1 - e^{-2}) / 2
    est = estimate_slab_ball_mass(Support((0,), p), theta_star, 1.0, 1.0, 20_000, rng)
    assert est.mass == pytest.approx((1.0 - math.exp(-2.0)) / 2.0, abs=4.0 * est.se)
    with pytest.raises(DomainError):
        estimate_slab_ball_mass(Support((0,), p), theta_star, 1.0, 1.0, 999, rng)


def test_mass_ratio_check_with_a_loose_constant(rng):
    p = 6
    S_star = Support((0,), p)
    theta_star = S_star.mask().astype(float)
    grid = [k * math.log(p) for k in (1, 2, 4)]
    for S in (S_star, Support((0, 1), p), Support((3, 4), p)):
        records = mass_ratio_check(S, S_star, theta_star, grid, 1.0, 5.0, 4000, rng)
        assert len(records) == len(grid)
        assert all(r.holds for r in records)
