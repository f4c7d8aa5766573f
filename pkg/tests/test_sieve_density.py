import math

import numpy as np
import pytest
from scipy import integrate, special

from ebayes.errors import DomainError, NumericError
from ebayes.sieve_density import (
    DensityData,
    ExpFamilyModel,
    SievePriorConfig,
    basis,
    fourier_basis,
    hellinger_sq,
    hellinger_sq_to,
    log_likelihood,
    log_likelihood_grad,
    log_marginal_k,
    log_normalizer,
    marginal,
    map_estimate,
    oracle_level,
    oracle_rate,
    poisson_log_weight,
    prior_mass_split,
    renyi2,
    sample_from_density,
    select_k_and_fit,
    sobolev_truth,
)


def _truth_density(theta):
    model = ExpFamilyModel(theta)
    return lambda x: np.exp(model.log_density(x))


def test_fourier_basis_is_orthonormal():
    nodes, weights = basis.quadrature_rule(256)
    phi = fourier_basis(nodes, 6)
    np.testing.assert_allclose((phi * weights[:, None]).T @ phi, np.eye(6), atol=1e-12)
    np.testing.assert_allclose(weights @ phi, np.zeros(6), atol=1e-12)


def test_log_normalizer_of_a_single_cosine():
    assert log_normalizer(np.zeros(4)) == 0.0
    for a in (0.3, 1.0, 2.5):
        # ∫₀¹ exp(a√2·cos 2πx) dx = I₀(a√2)
        assert log_normalizer([a]) == pytest.approx(math.log(special.i0(a * math.sqrt(2.0))), abs=1e-10)
    with pytest.raises(DomainError):
        log_normalizer([np.nan])


def test_density_integrates_to_one():
    f = _truth_density(sobolev_truth(8))
    assert integrate.quad(lambda x: float(f(x)[0]), 0.0, 1.0, limit=200)[0] == pytest.approx(1.0, abs=1e-9)


def test_hellinger_distances():
    theta = sobolev_truth(5)
    assert hellinger_sq(theta, theta) == pytest.approx(0.0, abs=1e-10)
    assert hellinger_sq_to(theta, _truth_density(theta)) == pytest.approx(0.0, abs=1e-10)
    assert hellinger_sq_to(np.zeros(3), lambda x: np.ones_like(x)) == pytest.approx(0.0, abs=1e-12)

    other = 0.5 * theta
    assert hellinger_sq(theta, other) == pytest.approx(hellinger_sq(other, theta), abs=1e-12)
    assert 0.0 < hellinger_sq(theta, other) < 1.0


def test_sampler_matches_basis_means(rng):
    theta = np.array([0.8, -0.4, 0.3])
    x = sample_from_density(theta, 20_000, rng)
    assert x.shape == (20_000,)
    assert x.min() >= 0.0 and x.max() <= 1.0
    _, mean, _ = basis.basis_moments(theta, 256)
    np.testing.assert_allclose(fourier_basis(x, 3).mean(axis=0), mean, atol=0.04)
    assert sample_from_density(theta, 0, rng).size == 0


def test_likelihood_gradient_matches_differences(rng):
    data = DensityData(sample_from_density(sobolev_truth(4), 50, rng))
    theta = np.array([0.5, -0.2, 0.1])
    h = 1e-4
    numeric = [
        (log_likelihood(theta + h * e, data) - log_likelihood(theta - h * e, data)) / (2 * h) for e in np.eye(3)
    ]
    np.testing.assert_allclose(log_likelihood_grad(theta, data), numeric, atol=1e-3)
    assert log_likelihood(theta, DensityData(np.array([]))) == 0.0


def test_map_is_a_stationary_point(rng):
    cfg = SievePriorConfig(sigma2=2.0)
    data = DensityData(sample_from_density(sobolev_truth(6), 200, rng))
    theta, neg_hess = map_estimate(data, 4, cfg)
    assert np.linalg.norm(log_likelihood_grad(theta, data) - theta / cfg.sigma2) < 1e-6
    assert np.all(np.linalg.eigvalsh(neg_hess) > 0)


def test_map_reports_a_stalled_line_search(monkeypatch, rng):
    data = DensityData(sample_from_density(sobolev_truth(4), 50, rng))

    def cliff(theta, n_nodes):
        # every move away from the origin lowers the objective
        return (1e6 if np.any(theta) else 0.0), np.zeros(theta.size), np.eye(theta.size)

    monkeypatch.setattr(marginal, "basis_moments", cliff)
    with pytest.raises(NumericError):
        map_estimate(data, 3, SievePriorConfig())


def test_marginal_matches_quadrature(rng):
    cfg = SievePriorConfig(n_is=4000)
    data = DensityData(sample_from_density([0.6], 30, rng))
    fit = log_marginal_k(data, 1, cfg, rng)

    def integrand(t):
        return math.exp(log_likelihood([t], data) - 0.5 * t * t - 0.5 * math.log(2 * math.pi))

    centre, sd = float(fit.map_theta[0]), math.sqrt(float(fit.cov[0, 0]))
    reference = math.log(integrate.quad(integrand, centre - 12 * sd, centre + 12 * sd, epsabs=0, epsrel=1e-10)[0])
    assert abs(fit.estimate - reference) < 4 * fit.se + 1e-3
    assert abs(fit.laplace - reference) < 0.1


def test_marginal_edge_cases(rng):
    cfg = SievePriorConfig(k_max=5)
    empty = log_marginal_k(DensityData(np.array([])), 3, cfg, rng)
    assert empty.estimate == 0.0
    with pytest.raises(DomainError):
        log_marginal_k(DensityData(np.array([0.5])), 6, cfg, rng)
    with pytest.raises(DomainError):
        DensityData(np.array([0.2, 1.3]))
    with pytest.raises(DomainError):
        SievePriorConfig(quad_nodes=100)


def test_poisson_weight():
    assert poisson_log_weight(3, 2.0) == pytest.approx(3 * math.log(2.0) - math.log(6.0))


def test_selection_fits_a_smooth_density(rng):
    theta_star = sobolev_truth()
    data = DensityData(sample_from_density(theta_star, 500, rng))
    cfg = SievePriorConfig(k_max=12, n_is=500)
    fit = select_k_and_fit(data, cfg, rng, n_draws=50)

    assert set(fit.log_scores) == set(range(1, 13))
    assert fit.log_scores[fit.k_hat] == max(fit.log_scores.values())
    assert fit.draws.shape == (50, fit.k_hat)
    assert fit.hellinger_sq_to(_truth_density(theta_star)) < 0.05
    assert fit.hellinger_to(_truth_density(theta_star)) ** 2 == pytest.approx(fit.hellinger_sq_to(_truth_density(theta_star)))
    assert fit.posterior_hellinger_sq(_truth_density(theta_star), n=10) < 0.1


def test_selection_does_not_depend_on_workers(rng):
    data = DensityData(sample_from_density(sobolev_truth(), 100, rng))
    cfg = SievePriorConfig(k_max=4, n_is=200)
    serial = select_k_and_fit(data, cfg, np.random.default_rng(11), n_draws=5)
    parallel = select_k_and_fit(data, cfg, np.random.default_rng(11), n_draws=5, n_jobs=2)
    assert serial.log_scores == parallel.log_scores
    np.testing.assert_array_equal(serial.draws, parallel.draws)

    with pytest.raises(DomainError):
        select_k_and_fit(DensityData(np.array([])), cfg, rng)


def test_oracle_level_and_rate():
    assert oracle_level(200, 1.0) == 4
    assert oracle_rate(200, 1.0) == pytest.approx(200 ** (1 / 3) * math.log(200) ** (2 / 3))


def test_renyi_divergence():
    theta_star = sobolev_truth(6)
    thetas = np.vstack([np.r_[theta_star[:3], 0.0], np.zeros(4), np.array([0.5, 0.0, 0.0, 0.2])])
    values = renyi2(theta_star, thetas)
    assert values.shape == (3,)
    assert np.all(values >= 0.0)
    assert renyi2(theta_star, theta_star[None, :])[0] == pytest.approx(0.0, abs=1e-10)


def test_prior_mass_split(rng):
    split = prior_mass_split(sobolev_truth(), 200, SievePriorConfig(), 1.0, 2000, rng)
    assert split.k_star == 4
    assert 0.0 < split.model_part <= 1.0
    assert math.isfinite(split.log_parameter_mass)
    assert split.parameter_part <= 2.0

    with pytest.raises(DomainError):
        prior_mass_split(sobolev_truth(), 2, SievePriorConfig(), 1.0, 100, rng)
    with pytest.raises(DomainError):
        prior_mass_split(sobolev_truth(), 200, SievePriorConfig(k_max=2), 1.0, 100, rng)
