import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence, Tuple

import numpy as np

from ebayes.errors import DomainError


@dataclass(frozen=True, slots=True)
class Support:
    """
    A subset S of the p coordinates (0-based), the structure Z = S of the sparse models.

    Attributes:
        indices: Strictly increasing coordinate indices.
        p: Ambient dimension.
    """

    indices: Tuple[int, ...]
    p: int

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if self.p < 1:
            raise DomainError(f"p must be positive, got {self.p}.")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise DomainError(f"support indices must be strictly increasing, got {indices}.")
        if indices and (indices[0] < 0 or indices[-1] >= self.p):
            raise DomainError(f"support indices must lie in [0, {self.p}), got {indices}.")
        object.__setattr__(self, "indices", indices)

    @classmethod
    def of(cls, indices: Sequence[int], p: int) -> "Support":
        return cls(tuple(sorted(set(int(i) for i in indices))), p)

    @classmethod
    def from_mask(cls, mask) -> "Support":
        mask = np.asarray(mask, dtype=bool)
        return cls(tuple(np.flatnonzero(mask).tolist()), mask.size)

    @property
    def size(self) -> int:
        return len(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def mask(self) -> np.ndarray:
        out = np.zeros(self.p, dtype=bool)
        out[list(self.indices)] = True
        return out

    def union(self, other: "Support") -> "Support":
        if other.p != self.p:
            raise DomainError("supports live in different dimensions.")
        return Support.of(self.indices + other.indices, self.p)


def iter_supports(p: int, max_size: int | None = None) -> Iterator[Support]:
    """
    Enumerates all supports of [p] by increasing size, up to ``max_size``.
    """
    top = p if max_size is None else min(p, max_size)
    for s in range(top + 1):
        for combo in combinations(range(p), s):
            yield Support(combo, p)


@dataclass(slots=True)
class SpikeSlabRateMap:
    """
    Rates of the spike-and-slab decomposition: ε(S)² = |S|·log p and δ(S) = 1.

    Attributes:
        p: Ambient dimension.
    """

    p: int
    log_p: float = field(init=False)

    def __post_init__(self):
        if self.p < 1:
            raise DomainError(f"p must be positive, got {self.p}.")
        self.log_p = math.log(self.p)

    def rate_sq(self, s: int) -> float:
        if s < 0:
            raise DomainError(f"support size must be nonnegative, got {s}.")
        return s * self.log_p

    def delta(self, support: Support) -> float:
        return 1.0
