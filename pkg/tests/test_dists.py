import math

import numpy as np
import pytest
from scipy import integrate, stats

from ebayes import dists
from ebayes.errors import DomainError, StructureError


def _marginal_by_quadrature(y: float, tau: float) -> float:
    def integrand(theta: float) -> float:
        return stats.norm.pdf(y - theta) * 0.5 * tau * math.exp(-tau * abs(theta))

    left, _ = integrate.quad(integrand, -np.inf, 0.0, epsabs=1e-13, epsrel=1e-11, limit=200)
    right, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-11, limit=200)
    return left + right


@pytest.mark.parametrize("tau", [0.5, 1.0, 2.0, 20.0])
def test_gauss_laplace_marginal_matches_quadrature(tau):
    for y in (-10.0, -3.2, -0.5, 0.0, 0.7, 2.5, 6.0, 10.0):
        assert abs(dists.gauss_laplace_marginal(y, tau) - _marginal_by_quadrature(y, tau)) <= 1e-8


def test_gauss_laplace_marginal_is_a_density():
    total, _ = integrate.quad(lambda y: dists.gauss_laplace_marginal(y, 1.0), -np.inf, np.inf, limit=200)
    assert abs(total - 1.0) <= 1e-6


def test_gauss_laplace_marginal_is_symmetric_and_vectorized():
    y = np.linspace(-5.0, 5.0, 11)
    values = dists.log_gauss_laplace_marginal(y, 1.5)
    assert values.shape == y.shape
    np.testing.assert_allclose(values, values[::-1], rtol=0, atol=1e-12)


def test_gauss_laplace_marginal_rejects_bad_arguments():
    with pytest.raises(DomainError):
        dists.log_gauss_laplace_marginal(np.nan, 1.0)
    with pytest.raises(DomainError):
        dists.log_gauss_laplace_marginal(0.0, 0.0)


def test_laplace_gauss_moments_match_quadrature():
    c, g, tau = 1.5, 2.0, 1.0

    def kernel(v: float) -> float:
        return math.exp(-0.5 * g * (v - c) ** 2 - tau * abs(v))

    mass = sum(integrate.quad(kernel, a, b)[0] for a, b in ((-np.inf, 0.0), (0.0, np.inf)))
    first = sum(integrate.quad(lambda v: v * kernel(v), a, b)[0] for a, b in ((-np.inf, 0.0), (0.0, np.inf)))
    second = sum(integrate.quad(lambda v: v * v * kernel(v), a, b)[0] for a, b in ((-np.inf, 0.0), (0.0, np.inf)))

    log_norm, mean, second_moment = dists.laplace_gauss_moments(c, g, tau)
    assert float(log_norm) == pytest.approx(math.log(mass), abs=1e-9)
    assert float(mean) == pytest.approx(first / mass, abs=1e-9)
    assert float(second_moment) == pytest.approx(second / mass, abs=1e-9)


def test_chi2_tail_bound_dominates_the_tail():
    for d in (1, 3, 10):
        for t in np.linspace(0.0, 20.0 * d, 41):
            assert stats.chi2.sf(t, d) <= dists.chi2_tail_bound(d, float(t))
    assert dists.chi2_tail_bound(2, 0.0) == 1.0
    with pytest.raises(DomainError):
        dists.chi2_tail_bound(0, 1.0)


def test_laplace_slab(rng):
    slab = dists.LaplaceSlab(2.0)
    assert 2 * integrate.quad(lambda x: math.exp(slab.log_pdf(x)), 0.0, np.inf)[0] == pytest.approx(1.0, abs=1e-8)
    draws = slab.sample(rng, size=20_000)
    assert stats.kstest(draws, stats.laplace(scale=0.5).cdf).statistic < 0.02
    with pytest.raises(DomainError):
        dists.LaplaceSlab(0.0)


def test_elliptical_laplace_reduces_to_laplace_in_one_dimension():
    prior = dists.EllipticalLaplace(np.eye(1), 1.0)
    assert dists.log_density_elliptical_laplace(prior, [0.0]) == pytest.approx(math.log(0.5), abs=1e-12)
    assert dists.log_density_elliptical_laplace(prior, [2.0]) == pytest.approx(math.log(0.5) - 2.0, abs=1e-12)


def test_elliptical_laplace_normalizer_in_two_dimensions():
    operator = np.array([[1.0, 0.3], [0.0, 1.2], [0.5, -0.4]])
    tau = 1.3
    prior = dists.EllipticalLaplace(operator, tau)
    # polar integral of exp(-tau |v|) over the plane is 2 pi / tau^2
    log_integral = math.log(2.0 * math.pi / tau**2) - 0.5 * math.log(np.linalg.det(operator.T @ operator))
    assert prior.log_normalizer() + log_integral == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("ell,tau", [(1, 1.0), (2, 1.0), (4, 2.0)])
def test_elliptical_laplace_radius_is_gamma(rng, ell, tau):
    operator = rng.standard_normal((ell + 3, ell))
    prior = dists.EllipticalLaplace(operator, tau)
    draws = dists.sample_elliptical_laplace(prior, rng, 20_000)
    radius = np.linalg.norm(draws @ operator.T, axis=1)
    statistic = stats.kstest(radius, stats.gamma(a=ell, scale=1.0 / tau).cdf).statistic
    assert statistic <= 0.02


def test_elliptical_laplace_single_draw_is_a_vector(rng):
    prior = dists.EllipticalLaplace(np.eye(3), 1.0)
    assert dists.sample_elliptical_laplace(prior, rng).shape == (3,)


def test_elliptical_laplace_rejects_rank_deficient_operators(rng):
    operator = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
    prior = dists.EllipticalLaplace(operator, 1.0)
    with pytest.raises(StructureError):
        dists.sample_elliptical_laplace(prior, rng, 10)
    with pytest.raises(StructureError):
        prior.log_normalizer()
