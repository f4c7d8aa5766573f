"""
Monte Carlo prior masses of the slab components Γ_S and the mass-ratio check of the sparse priors.
"""

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np

from ebayes.decomp.models import SpikeSlabRateMap, Support
from ebayes.dists import LaplaceSlab
from ebayes.errors import DomainError

MIN_DRAWS = 1000


@dataclass(slots=True)
class MassEstimate:
    """
    Monte Carlo estimate of Γ_S(ball).

    Attributes:
        mass: Fraction of draws inside the ball.
        se: Binomial standard error.
        n_mc: Number of draws.
    """

    mass: float
    se: float
    n_mc: int


def estimate_slab_ball_mass(
    S: Support,
    theta_star,
    eps_sq: float,
    tau: float,
    n_mc: int,
    rng: np.random.Generator,
    design: Optional[np.ndarray] = None,
) -> MassEstimate:
    """
    Estimates Γ_S({θ ∈ Θ_S : ‖θ − θ*‖² ≤ ε²}) for the product Laplace measure Γ_S.

    With a design matrix the ball is measured in prediction norm, ‖X(θ − θ*)‖² ≤ ε².

    Args:
        S: Support of the slab component.
        theta_star: Centre of the ball.
        eps_sq: Squared radius.
        tau: Slab rate.
        n_mc: Number of draws, at least 1000.
        rng: Random stream.
        design: Optional n×p design.

    Returns:
        The estimated mass with its standard error.

    Raises:
        DomainError: If ``n_mc`` is below 1000 or the dimensions disagree.
    """
    if n_mc < MIN_DRAWS:
        raise DomainError(f"n_mc must be at least {MIN_DRAWS}, got {n_mc}.")
    theta_star = np.asarray(theta_star, dtype=float)
    if theta_star.shape != (S.p,):
        raise DomainError("theta_star must have length p.")

    def distances(diff: np.ndarray) -> np.ndarray:
        if design is None:
            return np.sum(diff**2, axis=-1)
        return np.sum((diff @ np.asarray(design, dtype=float).T) ** 2, axis=-1)

    if S.size == 0:
        inside = float(distances(-theta_star) <= eps_sq)
        return MassEstimate(mass=inside, se=0.0, n_mc=n_mc)

    diff = np.tile(-theta_star, (n_mc, 1))
    diff[:, list(S.indices)] += LaplaceSlab(tau).sample(rng, size=(n_mc, S.size))
    mass = float(np.mean(distances(diff) <= eps_sq))
    return MassEstimate(mass=mass, se=math.sqrt(mass * (1.0 - mass) / n_mc), n_mc=n_mc)


@dataclass(slots=True)
class MassRatioRecord:
    """
    One point of the prior-mass ratio check.

    Attributes:
        eps_sq: Squared radius of the numerator ball.
        ratio: Γ_S(ball ε²) / Γ_{S*}(ball |S*|·log p).
        ratio_se: Delta-method standard error of the ratio.
        log_bound: ε²/6 + C2(|S|+|S*|)·log p.
        holds: Whether the ratio is below exp(log_bound).
    """

    eps_sq: float
    ratio: float
    ratio_se: float
    log_bound: float
    holds: bool


def mass_ratio_check(
    S: Support,
    S_star: Support,
    theta_star,
    eps_sq_grid: Iterable[float],
    tau: float,
    C2: float,
    n_mc: int,
    rng: np.random.Generator,
    design: Optional[np.ndarray] = None,
) -> List[MassRatioRecord]:
    """
    Checks Γ_S(ball ε²)/Γ_{S*}(ball |S*|·log p) ≤ exp(ε²/6 + C2(|S|+|S*|)·log p) over a grid of ε².

    The constant of the prior-mass lemma is not explicit, so ``C2`` is a loose caller-chosen value and violations are
    reported rather than raised.
    """
    rates = SpikeSlabRateMap(S.p)
    base = estimate_slab_ball_mass(S_star, theta_star, rates.rate_sq(S_star.size), tau, n_mc, rng, design)
    records = []
    for eps_sq in eps_sq_grid:
        top = estimate_slab_ball_mass(S, theta_star, eps_sq, tau, n_mc, rng, design)
        log_bound = eps_sq / 6.0 + math.log(rates.delta(S)) - math.log(rates.delta(S_star)) + C2 * (rates.rate_sq(S.size) + rates.rate_sq(S_star.size))
        if base.mass == 0.0:
            ratio, ratio_se = math.inf, math.inf
        else:
            ratio = top.mass / base.mass
            rel_top = top.se / top.mass if top.mass > 0 else 0.0
            ratio_se = ratio * math.hypot(rel_top, base.se / base.mass)
        records.append(
            MassRatioRecord(
                eps_sq=float(eps_sq),
                ratio=ratio,
                ratio_se=ratio_se,
                log_bound=log_bound,
                holds=bool(ratio <= math.exp(log_bound)),
            )
        )
    return records
