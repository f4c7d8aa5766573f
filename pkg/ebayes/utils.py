import hashlib
import math
from contextlib import contextmanager
from typing import Callable, Iterable, Iterator, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from ebayes.errors import NumericError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def stable_seed(*parts: object) -> int:
    """
    Derives a deterministic 64-bit seed from arbitrary printable parts.

    Python's ``hash`` is salted per process, so structure and support keys are hashed with SHA-1 instead.

    Args:
        parts: Values whose ``repr`` identifies the stream (e.g. a support's indices).

    Returns:
        A non-negative integer below 2**64.
    """
    digest = hashlib.sha1(":".join(repr(p) for p in parts).encode("utf-8")).hexdigest()
    return int(digest[:16], 16)


def derive_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """
    Builds an independent random stream for ``(master_seed, *keys)``.

    Args:
        master_seed: The experiment seed.
        keys: Non-negative integers locating the stream (replicate index, support hash, ...).

    Returns:
        A numpy Generator that depends only on its arguments.
    """
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *(int(k) for k in keys)]))


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-8) -> Tuple[float, float]:
    """
    Maximizes a unimodal function on [a, b] until the bracket is narrower than ``tol``.

    Returns:
        The best abscissa visited and its value.
    """
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def maximize_unit_interval(f: Callable[[float], float], n_grid: int = 512, tol: float = 1e-8) -> Tuple[float, float]:
    """
    Maximizes ``f`` over the closed interval [0, 1].

    A coarse grid of ``n_grid`` points locates the best cell, golden-section search then refines inside the two
    neighbouring cells. Ties go to the smaller abscissa: ``argmax`` keeps the first maximum and the refined point
    only replaces the grid point when it is strictly better.

    Args:
        f: Objective; may return ``-inf`` (NaN is treated as ``-inf``).
        n_grid: Number of grid points, endpoints included.
        tol: Final bracket width.

    Returns:
        ``(x_hat, f(x_hat))``.
    """
    grid = np.linspace(0.0, 1.0, n_grid)
    values = np.array([f(float(x)) for x in grid], dtype=float)
    values[np.isnan(values)] = -np.inf
    best = int(np.argmax(values))
    x_best, f_best = float(grid[best]), float(values[best])
    if not np.isfinite(f_best):
        return x_best, f_best

    lo = float(grid[max(best - 1, 0)])
    hi = float(grid[min(best + 1, n_grid - 1)])

    def guarded(x: float) -> float:
        value = f(x)
        return -np.inf if np.isnan(value) else value

    x_ref, f_ref = golden_section_max(guarded, lo, hi, tol)
    if f_ref > f_best:
        return x_ref, f_ref
    return x_best, f_best


def log_importance_estimate(log_weights: np.ndarray) -> Tuple[float, float, float]:
    """
    Summarizes unnormalized log importance weights.

    Returns:
        ``(log of the mean weight, delta-method standard error of that log, effective sample size)``.
    """
    log_weights = np.asarray(log_weights, dtype=float)
    n = log_weights.size
    log_mean = float(logsumexp(log_weights) - math.log(n))
    scaled = np.exp(log_weights - np.max(log_weights))
    mean = scaled.mean()
    se = float(scaled.std(ddof=1) / (math.sqrt(n) * mean)) if n > 1 else float("inf")
    ess = float(scaled.sum() ** 2 / np.sum(scaled**2))
    return log_mean, se, ess


def log_binomial(n: int, k: Iterable[int] | int) -> np.ndarray:
    """
    Computes log C(n, k) through log-gamma.
    """
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


@contextmanager
def linalg_guard(what: str) -> Iterator[None]:
    """
    Re-raises numpy and scipy LinAlgError inside the block as NumericError.

    Args:
        what: The computation, for the error message.
    """
    try:
        yield
    except np.linalg.LinAlgError as e:
        raise NumericError(f"{what} failed: {e}") from e
