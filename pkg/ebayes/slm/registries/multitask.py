import itertools
from typing import Iterator, Optional

import numpy as np

from ebayes.errors import DomainError
from ebayes.slm.models import Structure, StructureRegistry, StructureSpec, Truth, is_full_rank
from ebayes.utils import log_binomial


class MultitaskRegistry(StructureRegistry):
    """
    m regression tasks sharing one design and one sparsity pattern.

    The coefficient matrix A ∈ ℝ^{p×m} is zero outside the rows of a support S. Y is the row-major vectorization of
    the n×m response X_S A_S, so the operator of S is X_S ⊗ I_m, ℓ(Z_s) = m·s and log|Z̄_s| = log C(p, s).
    """

    registry_name = "multitask"

    def __init__(self, X: np.ndarray, m: int, s_max: int):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if not np.all(np.isfinite(X)):
            raise DomainError("X must be finite.")
        if m < 1 or s_max < 1:
            raise DomainError("m and s_max must be positive.")
        self.X = X
        self.m = m
        self.p = X.shape[1]
        self.specs = [StructureSpec(s, m * s, float(log_binomial(self.p, s))) for s in range(1, min(s_max, self.p) + 1)]

    def operator(self, support) -> np.ndarray:
        return np.kron(self.X[:, list(support)], np.eye(self.m))

    def structures(self, lambda_id) -> Iterator[Structure]:
        s = self.spec(lambda_id).lambda_id
        for support in itertools.combinations(range(self.p), s):
            if is_full_rank(self.X[:, list(support)]):
                yield Structure(s, support, self.operator(support))

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
            if is_full_rank(self.X[:, list(support)]):
                return Structure(s, support, self.operator(support))

    def sample_truth(self, lambda_id, rng: np.random.Generator, signal: float = 4.0) -> Truth:
        """
        A uniform support with every active row of A equal to ±signal entrywise (random signs).
        """
        structure = self.sample_structure(lambda_id, rng)
        B = signal * rng.choice([-1.0, 1.0], size=structure.operator.shape[1])
        return Truth(structure=structure, B=B, mean=structure.operator @ B)


def make_multitask_registry(X: np.ndarray, m: int, s_max: int) -> MultitaskRegistry:
    return MultitaskRegistry(X, m, s_max)
