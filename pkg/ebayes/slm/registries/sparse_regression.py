import itertools
import logging
from typing import Iterator, Optional

import numpy as np

from ebayes.errors import DomainError
from ebayes.slm.models import Structure, StructureRegistry, StructureSpec, Truth, is_full_rank
from ebayes.utils import log_binomial

logger = logging.getLogger(__name__)


class SparseRegressionRegistry(StructureRegistry):
    """
    Supports of a fixed n×p design: class s holds the full-rank supports of size s, with ℓ = s and
    log|Z̄_s| = log C(p, s).
    """

    registry_name = "sparse-regression"

    def __init__(self, X: np.ndarray, s_max: int):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if not np.all(np.isfinite(X)):
            raise DomainError("X must be finite.")
        if s_max < 1:
            raise DomainError(f"s_max must be positive, got {s_max}.")
        self.X = X
        self.p = X.shape[1]
        self.specs = [StructureSpec(s, s, float(log_binomial(self.p, s))) for s in range(1, min(s_max, self.p) + 1)]

    def operator(self, support) -> np.ndarray:
        return self.X[:, list(support)]

    def structures(self, lambda_id) -> Iterator[Structure]:
        s = self.spec(lambda_id).lambda_id
        skipped = 0
        for support in itertools.combinations(range(self.p), s):
            operator = self.operator(support)
            if is_full_rank(operator):
                yield Structure(s, support, operator)
            else:
                skipped += 1
        if skipped:
            logger.warning("excluded %d rank-deficient supports of size %d", skipped, s)

    def owner(self, structure: Structure) -> Optional[int]:
        support = tuple(structure.key)
        s = len(support)
        if len(set(support)) != s or not all(0 <= j < self.p for j in support):
            return None
        return s if s in self.specs_by_id() else None

    def sample_structure(self, lambda_id, rng: np.random.Generator) -> Structure:
        s = self.spec(lambda_id).lambda_id
        while True:
            support = tuple(sorted(int(j) for j in rng.choice(self.p, size=s, replace=False)))
            operator = self.operator(support)
            if is_full_rank(operator):
                return Structure(s, support, operator)

    def sample_truth(self, lambda_id, rng: np.random.Generator, signal: float = 4.0) -> Truth:
        """
        A uniform support of size s with coefficients ±signal (random signs).
        """
        structure = self.sample_structure(lambda_id, rng)
        B = signal * rng.choice([-1.0, 1.0], size=len(structure.key))
        return Truth(structure=structure, B=B, mean=structure.operator @ B)


def make_sparse_regression_registry(X: np.ndarray, s_max: int) -> SparseRegressionRegistry:
    return SparseRegressionRegistry(X, s_max)
