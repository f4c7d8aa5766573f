import itertools
import math

import numpy as np

from ebayes.decomp.models import Support
from ebayes.errors import CapabilityError, DomainError
from ebayes.reg_eb.models import RegressionData

MAX_SIGN_SUPPORT = 8
CONE_RADIUS = 3.0


def prediction_loss(data: RegressionData, theta, theta_star) -> float:
    """
    Prediction loss ‖X(θ − θ*)‖².
    """
    theta = np.asarray(theta, dtype=float)
    theta_star = np.asarray(theta_star, dtype=float)
    if theta.shape != (data.p,) or theta_star.shape != (data.p,):
        raise DomainError("theta and theta_star must have length p.")
    residual = data.X @ (theta - theta_star)
    return float(residual @ residual)


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """
    Euclidean projection onto {w ≥ 0, Σw = 1}.
    """
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - cumulative / k > 0)[0][-1]
    return np.maximum(v - cumulative[rho] / (rho + 1.0), 0.0)


def _project_l1_ball(v: np.ndarray, radius: float) -> np.ndarray:
    if v.size == 0 or np.sum(np.abs(v)) <= radius:
        return v
    w = _project_simplex(np.abs(v) / radius) * radius
    return np.sign(v) * w


def _orthant_minimum(XtX: np.ndarray, signs: np.ndarray, inside: np.ndarray, step: float, tol: float, max_iter: int) -> float:
    """
    min ‖Xu‖² over sign(u_S) = signs, ‖u_S‖₁ = 1, ‖u_{S^c}‖₁ ≤ 3, by accelerated projected gradient with restarts.
    """

    def project(u: np.ndarray) -> np.ndarray:
        out = u.copy()
        out[inside] = signs * _project_simplex(signs * u[inside])
        out[~inside] = _project_l1_ball(u[~inside], CONE_RADIUS)
        return out

    u = np.zeros(XtX.shape[0])
    u[inside] = signs / signs.size
    y, t = u.copy(), 1.0
    for _ in range(max_iter):
        new = project(y - step * 2.0 * (XtX @ y))
        if np.dot(y - new, new - u) > 0:
            y, t = u.copy(), 1.0
            continue
        t_next = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
        y = new + ((t - 1.0) / t_next) * (new - u)
        moved = np.max(np.abs(new - u))
        u, t = new, t_next
        if moved <= tol:
            break
    return float(max(u @ XtX @ u, 0.0))


def compatibility_number(X, S: Support, tol: float = 1e-10, max_iter: int = 50_000) -> float:
    """
    Compatibility number κ(S) = inf ‖Xu‖·|S|^{1/2} / (‖X‖·‖u_S‖₁) over the cone ‖u_{S^c}‖₁ ≤ 3‖u_S‖₁, u_S ≠ 0.

    The ratio is scale free, so ‖u_S‖₁ is fixed to 1. Inside each of the 2^{|S|} orthants of u_S the problem is a
    convex quadratic program over a simplex times an ℓ1 ball, solved by projected gradient; κ(S) is the smallest of
    the orthant minima. ‖X‖ is the largest column norm.

    Args:
        X: The n×p design.
        S: A nonempty support with at most 8 coordinates.
        tol: Iterate change at which a solve stops.
        max_iter: Iteration cap per orthant.

    Returns:
        κ(S) ≥ 0.

    Raises:
        CapabilityError: If |S| > 8.
        DomainError: If S is empty.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if S.p != X.shape[1]:
        raise DomainError("support dimension does not match the design.")
    if S.size == 0:
        raise DomainError("the compatibility number needs a nonempty support.")
    if S.size > MAX_SIGN_SUPPORT:
        raise CapabilityError(f"sign-pattern enumeration supports |S| <= {MAX_SIGN_SUPPORT}, got {S.size}.")

    XtX = X.T @ X
    step = 1.0 / (2.0 * max(np.linalg.eigvalsh(XtX)[-1], np.finfo(float).tiny))
    inside = S.mask()
    best = math.inf
    for pattern in itertools.product((1.0, -1.0), repeat=S.size):
        best = min(best, _orthant_minimum(XtX, np.array(pattern), inside, step, tol, max_iter))
    return math.sqrt(best) * math.sqrt(S.size) / float(np.max(np.linalg.norm(X, axis=0)))
