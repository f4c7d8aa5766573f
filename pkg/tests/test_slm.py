import math

import numpy as np
import pytest
from scipy import integrate

from ebayes.errors import CapabilityError, DomainError, StructureError
from ebayes.reg_eb import RegressionData, mmle_regression, regression_tau
from ebayes.seq_eb import SpikeSlabConfig
from ebayes.slm import (
    SLMConfig,
    Structure,
    StructureSpec,
    check_complexity_condition,
    checks,
    eb_select_lambda,
    effective_weight_slm,
    epsilon_sq,
    estimate_slm_type_one,
    is_full_rank,
    log_marginal_structure,
    log_weight_slm,
    make_biclustering_registry,
    make_explicit_registry,
    make_multitask_registry,
    make_sparse_regression_registry,
    name_to_factory,
    slm_mass_ratio,
    verify_slm_sieve,
)
from ebayes.slm import selection


def test_spec_validation():
    with pytest.raises(DomainError):
        StructureSpec("a", 0, 1.0)
    with pytest.raises(DomainError):
        StructureSpec("a", 2, -0.5)
    with pytest.raises(DomainError):
        SLMConfig(large_class="guess")
    with pytest.raises(DomainError):
        SLMConfig(large_class="search")


def test_weights_of_a_class():
    spec = StructureSpec("a", 2, math.log(3.0))
    cfg = SLMConfig(D=4.0)
    assert epsilon_sq(spec) == pytest.approx(2.0 + math.log(3.0))
    # Γ(2) = Γ(1), so only the complexity term is left
    assert log_weight_slm(spec, cfg) == pytest.approx(-4.0 * (2.0 + math.log(3.0)))


def test_effective_weight_divides_by_class_size(rng):
    registry = make_sparse_regression_registry(rng.standard_normal((10, 4)), s_max=2)
    cfg = SLMConfig()
    structure = next(registry.structures(2))
    spec = registry.spec(2)
    assert effective_weight_slm(structure, registry, cfg) == pytest.approx(log_weight_slm(spec, cfg) - math.log(6.0))

    orphan = Structure(3, (0, 1, 2), registry.operator((0, 1, 2)))
    with pytest.raises(StructureError):
        effective_weight_slm(orphan, registry, cfg)


def test_complexity_condition():
    check = check_complexity_condition(make_biclustering_registry(24, 24, 4, 4))
    assert check.holds
    assert check.offending == []
    assert check.log_tail_sum < 1.0

    crowded = [StructureSpec(i, 1, c) for i, c in enumerate([0.2, 0.5, 0.9])]
    check = check_complexity_condition(crowded)
    assert not check.holds
    assert check.offending == [2]

    assert check_complexity_condition([]).holds


def test_sieve_sum_cancels_and_stays_below_bound():
    registry = make_biclustering_registry(12, 12, 3, 3)
    cfg = SLMConfig(D=3.0)
    for spec in registry.specs:
        result = verify_slm_sieve(registry, cfg, spec.lambda_id, C2=1.0)
        assert result.log_sum_direct == pytest.approx(result.log_sum_cancelled, abs=1e-8)
        assert result.holds


def test_sieve_sum_arguments():
    registry = make_biclustering_registry(4, 4, 2, 2)
    with pytest.raises(DomainError):
        verify_slm_sieve(registry, SLMConfig(), (1, 1), C2=0.0)
    with pytest.raises(StructureError):
        verify_slm_sieve(registry, SLMConfig(), (5, 5))


def test_full_rank(rng):
    X = rng.standard_normal((8, 3))
    assert is_full_rank(X)
    X[:, 2] = X[:, 0]
    assert not is_full_rank(X)


def test_biclustering_classes():
    registry = make_biclustering_registry(3, 2, 2, 2)
    assert [spec.lambda_id for spec in registry.specs] == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert registry.spec((2, 2)).log_count == pytest.approx(3 * math.log(2) + 2 * math.log(2))
    assert registry.candidate_count((2, 2)) == 32

    structures = list(registry.structures((2, 2)))
    # onto labelings only: (2³ − 2)·(2² − 2)
    assert len(structures) == 12
    for structure in structures:
        assert structure.operator.shape == (6, 4)
        assert np.all(structure.operator.sum(axis=1) == 1.0)
        assert registry.owner(structure) == (2, 2)


def test_biclustering_truth_is_a_checkerboard(rng):
    registry = make_biclustering_registry(6, 4, 2, 2)
    truth = registry.sample_truth((2, 2), rng, separation=5.0)
    rows, cols = truth.structure.key
    expected = 5.0 * ((np.array(rows)[:, None] + np.array(cols)[None, :]) % 2)
    np.testing.assert_allclose(truth.mean.reshape(6, 4), expected)
    assert sorted(rows) == [0, 0, 0, 1, 1, 1]


def test_biclustering_subsample_draws_onto_labelings(rng):
    registry = make_biclustering_registry(8, 8, 2, 2)
    for _ in range(20):
        structure = registry.sample_structure((2, 2), rng)
        assert registry.owner(structure) == (2, 2)
        assert is_full_rank(structure.operator)


def test_sparse_regression_skips_rank_deficient_supports(rng):
    X = rng.standard_normal((10, 4))
    X[:, 3] = X[:, 0]
    registry = make_sparse_regression_registry(X, s_max=2)
    assert [spec.log_count for spec in registry.specs] == pytest.approx([math.log(4), math.log(6)])
    supports = [s.key for s in registry.structures(2)]
    assert len(supports) == 5
    assert (0, 3) not in supports


def test_multitask_operator_vectorizes_rows(rng):
    X = rng.standard_normal((8, 3))
    registry = make_multitask_registry(X, m=2, s_max=2)
    assert [spec.ell for spec in registry.specs] == [2, 4]
    A = rng.standard_normal((2, 2))
    operator = registry.operator((0, 2))
    assert operator.shape == (16, 4)
    np.testing.assert_allclose(operator @ A.ravel(), (X[:, [0, 2]] @ A).ravel())


def test_explicit_registry(rng):
    specs = [StructureSpec("a", 1, 0.0), StructureSpec("b", 2, math.log(2.0))]
    operators = {"b": [rng.standard_normal((5, 2)), rng.standard_normal((5, 2))]}
    registry = make_explicit_registry(specs, operators)
    assert registry.candidate_count("a") == 0
    assert [s.key for s in registry.structures("b")] == [("b", 0), ("b", 1)]
    assert registry.owner(Structure("b", ("b", 1), operators["b"][1])) == "b"
    assert registry.owner(Structure("b", ("b", 7), operators["b"][1])) is None

    with pytest.raises(StructureError):
        make_explicit_registry(specs + [StructureSpec("a", 1, 0.0)])
    with pytest.raises(StructureError):
        make_explicit_registry(specs, {"a": [rng.standard_normal((5, 2))]})
    singular = np.ones((5, 2))
    with pytest.raises(StructureError):
        make_explicit_registry(specs, {"b": [singular]})


def test_factories_are_registered():
    assert set(name_to_factory) == {"biclustering", "sparse-regression", "multitask", "explicit"}


def test_structure_marginal_matches_quadrature(rng):
    x = rng.standard_normal((15, 1))
    Y = 1.5 * x[:, 0] + rng.standard_normal(15)
    tau = 0.7
    norm = float(np.linalg.norm(x))

    def integrand(b):
        log_lik = -7.5 * math.log(2 * math.pi) - 0.5 * float(np.sum((Y - x[:, 0] * b) ** 2))
        return math.exp(log_lik + math.log(tau * norm / 2.0) - tau * norm * abs(b))

    b_hat = float(x[:, 0] @ Y) / norm**2
    lo, hi = b_hat - 10.0 / norm, b_hat + 10.0 / norm
    points = [0.0] if lo < 0.0 < hi else None
    reference = math.log(integrate.quad(integrand, lo, hi, points=points, epsabs=0, epsrel=1e-10, limit=200)[0])

    fit = log_marginal_structure(Y, x, tau, n_is=20_000, rng=rng)
    assert fit.ess > 5000
    assert abs(fit.estimate - reference) < 4 * fit.se + 1e-3
    assert fit.post_mean.shape == (1,)


def test_structure_marginal_arguments(rng):
    with pytest.raises(DomainError):
        log_marginal_structure(np.zeros(4), rng.standard_normal((5, 1)), 1.0, rng=rng)
    with pytest.raises(DomainError):
        log_marginal_structure(np.zeros(5), rng.standard_normal((5, 1)), 1.0, n_is=10, rng=rng)
    with pytest.raises(StructureError):
        log_marginal_structure(np.zeros(5), np.ones((5, 2)), 1.0, rng=rng)


def test_structure_marginal_is_rotation_invariant(rng):
    N = 12
    operator = rng.standard_normal((N, 2))
    Y = operator @ np.array([1.0, -2.0]) + rng.standard_normal(N)
    Q, _ = np.linalg.qr(rng.standard_normal((N, N)))
    plain = log_marginal_structure(Y, operator, 0.8, n_is=500, rng=np.random.default_rng(11))
    rotated = log_marginal_structure(Q @ Y, Q @ operator, 0.8, n_is=500, rng=np.random.default_rng(11))
    assert rotated.estimate == pytest.approx(plain.estimate, abs=1e-8)
    np.testing.assert_allclose(rotated.post_mean, plain.post_mean, atol=1e-8)


def test_selection_recovers_the_bicluster_class(rng):
    registry = make_biclustering_registry(6, 6, 2, 2)
    truth = registry.sample_truth((2, 2), rng, separation=6.0)
    Y = truth.mean + rng.standard_normal(truth.mean.size)

    result = eb_select_lambda(Y, registry, SLMConfig(D=4.0, n_is=200), rng)
    assert result.lambda_hat == (2, 2)
    assert not result.approximate
    assert result.scores[(2, 2)].mode == "exact"
    assert result.scores[(2, 2)].n_structures == 62 * 62
    assert set(result.per_lambda_log_scores) == {(1, 1), (1, 2), (2, 1), (2, 2)}
    assert np.sum((result.post_mean - truth.mean) ** 2) < 20.0


def test_selection_does_not_depend_on_workers():
    registry = make_biclustering_registry(4, 4, 2, 2)
    Y = np.random.default_rng(3).standard_normal(16)
    cfg = SLMConfig(n_is=100)
    serial = eb_select_lambda(Y, registry, cfg, np.random.default_rng(7), n_jobs=1)
    parallel = eb_select_lambda(Y, registry, cfg, np.random.default_rng(7), n_jobs=2)
    assert serial.per_lambda_log_scores == parallel.per_lambda_log_scores
    assert serial.lambda_hat == parallel.lambda_hat


def test_a_single_class_is_always_selected(rng):
    operators = [rng.standard_normal((10, 2)) for _ in range(3)]
    registry = make_explicit_registry([StructureSpec("only", 2, math.log(3.0))], {"only": operators})
    result = eb_select_lambda(rng.standard_normal(10), registry, SLMConfig(n_is=200), rng)
    assert result.lambda_hat == "only"
    assert set(result.per_lambda_log_scores) == {"only"}
    assert not result.unstable


def test_sparse_regression_ranks_sizes_like_regression_eb(rng):
    n, p = 40, 8
    X = rng.standard_normal((n, p))
    theta_star = np.zeros(p)
    theta_star[[1, 5]] = [4.0, -4.0]
    Y = X @ theta_star + rng.standard_normal(n)

    result = eb_select_lambda(Y, make_sparse_regression_registry(X, s_max=3), SLMConfig(n_is=500), rng)
    slm_scores = result.per_lambda_log_scores

    data = RegressionData(Y, X)
    fit = mmle_regression(data, SpikeSlabConfig(alpha=1.0, beta=float(p) ** 2, tau=regression_tau(X, 1.0)), s_max=3)
    size_mass = {s: 0.0 for s in (1, 2, 3)}
    for S, prob in fit.support_posterior:
        if S.size in size_mass:
            size_mass[S.size] += prob

    assert result.lambda_hat == 2
    assert sorted(slm_scores, key=slm_scores.get, reverse=True) == sorted(size_mass, key=size_mass.get, reverse=True)


def test_large_classes(rng):
    registry = make_biclustering_registry(6, 6, 2, 2)
    Y = rng.standard_normal(36)
    with pytest.raises(CapabilityError):
        eb_select_lambda(Y, registry, SLMConfig(max_structures=100), rng)

    cfg = SLMConfig(n_is=100, max_structures=100, large_class="subsample", n_subsample=50)
    result = eb_select_lambda(Y, registry, cfg, rng)
    assert result.approximate
    assert result.scores[(2, 2)].mode == "subsample"
    assert result.scores[(2, 2)].n_structures == 50
    assert result.scores[(1, 2)].mode == "exact"
    assert result.scores[(1, 1)].mode == "exact"

    sparse = make_sparse_regression_registry(rng.standard_normal((20, 6)), s_max=2)
    cfg = SLMConfig(n_is=100, max_structures=3, large_class="subsample", n_subsample=30)
    result = eb_select_lambda(rng.standard_normal(20), sparse, cfg, rng)
    assert all(score.mode == "subsample" and score.n_structures == 30 for score in result.scores.values())


def test_default_budget_enumerates_every_class_it_can():
    registry = make_biclustering_registry(12, 12, 2, 2)
    cfg = SLMConfig(large_class="subsample")
    modes = {}
    for spec in registry.specs:
        structures, modes[spec.lambda_id], correction = selection._class_structures(registry, spec.lambda_id, cfg, 0)
    assert modes == {(1, 1): "exact", (1, 2): "exact", (2, 1): "exact", (2, 2): "subsample"}
    assert len(structures) == cfg.n_subsample
    assert correction == pytest.approx(-math.log(cfg.n_subsample))


def test_structure_test_rejects_outside_the_ball(rng):
    X = rng.standard_normal((10, 2))
    center = rng.standard_normal(10)
    assert not checks.test_reject_structure(center, X[:, :1], X[:, 1:], center, 1.0)
    assert checks.test_reject_structure(center + 10.0 * X[:, 0], X[:, :1], X[:, 1:], center, 1.0)
    with pytest.raises(DomainError):
        checks.test_reject_structure(center, X[:, :1], X[:, 1:], center, -1.0)


def test_structure_type_one_error(rng):
    registry = make_biclustering_registry(4, 4, 2, 2)
    truth = registry.sample_truth((2, 2), rng)
    estimate = estimate_slm_type_one(registry, truth, 2000, rng)
    assert estimate.n_structures == 1 + 14 + 14 + 14 * 14
    assert estimate.holds

    with pytest.raises(CapabilityError):
        estimate_slm_type_one(make_biclustering_registry(8, 8, 2, 2), truth, 10, rng)


def test_mass_ratio_of_the_true_structure_is_near_one(rng):
    X = rng.standard_normal((20, 5))
    X /= np.linalg.norm(X, axis=0)
    registry = make_sparse_regression_registry(X, s_max=2)
    Z_star = next(registry.structures(1))
    eps_star = epsilon_sq(registry.spec(1))

    ratio = slm_mass_ratio(registry, Z_star, Z_star, np.array([0.5]), eps_star, SLMConfig(), 4000, rng)
    assert abs(ratio.log_ratio) < 5 * ratio.se + 1e-3
    assert ratio.holds

    with pytest.raises(DomainError):
        slm_mass_ratio(registry, Z_star, Z_star, np.array([0.5]), eps_star, SLMConfig(), 100, rng)
    with pytest.raises(DomainError):
        slm_mass_ratio(registry, Z_star, Z_star, np.array([0.5]), 0.0, SLMConfig(), 4000, rng)
