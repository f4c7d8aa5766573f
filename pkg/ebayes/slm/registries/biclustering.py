import itertools
import math
from typing import Iterator, Optional, Tuple

import numpy as np

from ebayes.errors import DomainError
from ebayes.slm.models import Structure, StructureRegistry, StructureSpec, Truth


Labels = Tuple[int, ...]


def _one_hot(labels: Labels, k: int) -> np.ndarray:
    out = np.zeros((len(labels), k))
    out[np.arange(len(labels)), labels] = 1.0
    return out


class BiclusteringRegistry(StructureRegistry):
    """
    Checkerboard means of an n×m matrix.

    Class (k, l) holds the labelings z₁ ∈ [k]^n, z₂ ∈ [l]^m that use every row and column cluster; Y is the row-major
    vectorization of the matrix and B ∈ ℝ^{k×l} is vectorized the same way, so the operator is the Kronecker
    product of the two one-hot label matrices. log|Z̄_{k,l}| is the nominal n·log k + m·log l.
    """

    registry_name = "biclustering"

    def __init__(self, n: int, m: int, k_max: int, l_max: int):
        if min(n, m, k_max, l_max) < 1:
            raise DomainError("n, m, k_max and l_max must be positive.")
        self.n, self.m = n, m
        self.specs = [
            StructureSpec((k, l), k * l, n * math.log(k) + m * math.log(l))
            for k in range(1, min(k_max, n) + 1)
            for l in range(1, min(l_max, m) + 1)
        ]

    def operator(self, rows: Labels, cols: Labels, k: int, l: int) -> np.ndarray:
        return np.kron(_one_hot(rows, k), _one_hot(cols, l))

    def _make(self, rows: Labels, cols: Labels, k: int, l: int) -> Structure:
        return Structure((k, l), (rows, cols), self.operator(rows, cols, k, l))

    def candidate_count(self, lambda_id) -> int:
        k, l = self.spec(lambda_id).lambda_id
        return k**self.n * l**self.m

    def structures(self, lambda_id) -> Iterator[Structure]:
        k, l = self.spec(lambda_id).lambda_id
        full_rows = [z for z in itertools.product(range(k), repeat=self.n) if len(set(z)) == k]
        full_cols = [z for z in itertools.product(range(l), repeat=self.m) if len(set(z)) == l]
        for rows in full_rows:
            for cols in full_cols:
                yield self._make(rows, cols, k, l)

    def owner(self, structure: Structure) -> Optional[Tuple[int, int]]:
        rows, cols = structure.key
        k, l = max(rows) + 1, max(cols) + 1
        if len(set(rows)) != k or len(set(cols)) != l:
            return None
        if (k, l) not in self.specs_by_id():
            return None
        return k, l

    def _uniform_labels(self, size: int, k: int, rng: np.random.Generator) -> Labels:
        while True:
            z = rng.integers(0, k, size=size)
            if np.unique(z).size == k:
                return tuple(int(a) for a in z)

    def sample_structure(self, lambda_id, rng: np.random.Generator) -> Structure:
        k, l = self.spec(lambda_id).lambda_id
        return self._make(self._uniform_labels(self.n, k, rng), self._uniform_labels(self.m, l, rng), k, l)

    def sample_truth(self, lambda_id, rng: np.random.Generator, separation: float = 4.0) -> Truth:
        """
        Balanced random labelings with checkerboard block means: B[a, b] = separation·((a + b) mod 2).
        """
        k, l = self.spec(lambda_id).lambda_id
        rows = tuple(int(a) for a in rng.permutation(np.arange(self.n) % k))
        cols = tuple(int(b) for b in rng.permutation(np.arange(self.m) % l))
        structure = self._make(rows, cols, k, l)
        B = separation * (np.add.outer(np.arange(k), np.arange(l)) % 2).astype(float).ravel()
        return Truth(structure=structure, B=B, mean=structure.operator @ B)


def make_biclustering_registry(n: int, m: int, k_max: int, l_max: int) -> BiclusteringRegistry:
    return BiclusteringRegistry(n, m, k_max, l_max)
