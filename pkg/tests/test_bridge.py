import math

import numpy as np
import pytest
from scipy import integrate, stats

from ebayes.bridge import (
    ConjugateModel,
    ConjugateModelFamily,
    chib_log_evidence,
    exact_log_evidence,
    gaussian_kl,
    kl_to_hierarchical,
    make_sieve_family,
    posterior,
    posterior_gain,
    random_family,
    sample_observation,
    suboptimal_kl_margin,
    verify_eb_vb_equivalence,
)
from ebayes.errors import CapabilityError, DomainError, NumericError


def test_scalar_evidence_matches_quadrature():
    model = ConjugateModel(1, [0.5], [[2.0]], [[1.5]])
    family = ConjugateModelFamily([model], [1.0])
    y = 1.2

    def integrand(t):
        return stats.norm.pdf(y, 1.5 * t, 1.0) * stats.norm.pdf(t, 0.5, math.sqrt(2.0))

    reference = math.log(integrate.quad(integrand, -20, 20, epsabs=0, epsrel=1e-12)[0])
    assert exact_log_evidence(family, 1, [y]) == pytest.approx(reference, abs=1e-9)


def test_evidence_and_posterior_forms_agree(rng):
    family = random_family(rng, 10, [1, 2, 3])
    Y = sample_observation(family, rng)
    assert Y.shape == (10,)
    for model in family.models:
        assert chib_log_evidence(model, Y) == pytest.approx(exact_log_evidence(family, model.k, Y), abs=1e-9)
        mean, cov = posterior(family, model.k, Y)
        gain_mean, gain_cov = posterior_gain(model, Y)
        np.testing.assert_allclose(mean, gain_mean, atol=1e-10)
        np.testing.assert_allclose(cov, gain_cov, atol=1e-10)


def test_gaussian_kl():
    eye = np.eye(2)
    assert gaussian_kl(np.zeros(2), eye, np.zeros(2), eye) == pytest.approx(0.0, abs=1e-14)
    expected = 0.5 * (1 / 4 + 1 / 4 - 1 + math.log(4))
    assert gaussian_kl(np.zeros(1), np.eye(1), np.ones(1), 4 * np.eye(1)) == pytest.approx(expected)
    with pytest.raises(NumericError):
        gaussian_kl(np.zeros(2), eye, np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_evidence_and_kl_choices_agree(rng):
    for _ in range(20):
        family = random_family(rng, 10, [1, 2, 3])
        report = verify_eb_vb_equivalence(family, sample_observation(family, rng))
        assert report.agree
        assert report.identity_residual <= 1e-8
        assert suboptimal_kl_margin(family, sample_observation(family, rng)) >= -1e-9


def test_sieve_family_choices_agree(rng):
    design = rng.standard_normal((10, 3))
    family = make_sieve_family(design, 1.0, [0.5, 0.3, 0.2])
    assert [m.dim for m in family.models] == [1, 2, 3]
    report = verify_eb_vb_equivalence(family, sample_observation(family, rng))
    assert report.agree
    assert report.kl_values[report.k_hat_kl] == min(report.kl_values.values())
    assert report.log_evidence_bar > -math.inf


def test_zero_probability_models_are_never_chosen(rng):
    family = make_sieve_family(rng.standard_normal((10, 3)), 1.0, [0.0, 1.0, 0.0])
    Y = sample_observation(family, rng)
    report = verify_eb_vb_equivalence(family, Y)
    assert report.k_hat_mmle == report.k_hat_kl == 2
    assert report.kl_values[1] == math.inf
    assert report.kl_direct[3] == math.inf
    # the hierarchical posterior is the model posterior itself
    assert report.kl_values[2] == pytest.approx(0.0, abs=1e-10)
    assert kl_to_hierarchical(family, Y, 1, [0.0], [[1.0]]) == math.inf
    with pytest.raises(DomainError):
        suboptimal_kl_margin(family, Y)


def test_the_model_posterior_minimizes_the_kl(rng):
    family = random_family(rng, 8, [2, 2])
    Y = sample_observation(family, rng)
    mean, cov = posterior(family, 1, Y)
    best = kl_to_hierarchical(family, Y, 1, mean, cov)
    assert kl_to_hierarchical(family, Y, 1, mean + 0.3, cov) > best
    assert kl_to_hierarchical(family, Y, 1, mean, 2.0 * cov) > best


def test_family_limits(rng):
    family = random_family(rng, 5, [1] * 6)
    with pytest.raises(CapabilityError):
        verify_eb_vb_equivalence(family, np.zeros(5))
    with pytest.raises(DomainError):
        verify_eb_vb_equivalence(random_family(rng, 5, [1, 2]), np.zeros(4))


def test_model_validation():
    with pytest.raises(DomainError):
        ConjugateModel(1, [0.0, 0.0], [[1.0, 0.5], [0.0, 1.0]], np.ones((3, 2)))
    with pytest.raises(DomainError):
        ConjugateModel(1, [0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]], np.ones((3, 2)))
    with pytest.raises(DomainError):
        ConjugateModel(1, [0.0], [[1.0]], np.ones((3, 2)))

    a = ConjugateModel(1, [0.0], [[1.0]], np.ones((3, 1)))
    b = ConjugateModel(2, [0.0], [[1.0]], np.ones((4, 1)))
    with pytest.raises(DomainError):
        ConjugateModelFamily([a, b], [0.5, 0.5])
    with pytest.raises(DomainError):
        ConjugateModelFamily([a], [0.9])
    with pytest.raises(DomainError):
        ConjugateModelFamily([], [])
    with pytest.raises(DomainError):
        ConjugateModelFamily([a], [1.0]).index(7)


def test_sieve_family_arguments(rng):
    with pytest.raises(DomainError):
        make_sieve_family(rng.standard_normal((5, 2)), 1.0, [0.25] * 4)
    with pytest.raises(DomainError):
        make_sieve_family(rng.standard_normal((5, 2)), 0.0, [1.0])
