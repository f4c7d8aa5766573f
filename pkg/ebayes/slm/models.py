import abc
import math
from abc import abstractmethod
from dataclasses import dataclass
from typing import Dict, Hashable, Iterator, List, Optional, Tuple

import numpy as np

from ebayes.dists import EIGEN_FLOOR
from ebayes.errors import DomainError, StructureError

LARGE_CLASS_MODES = ("error", "subsample")


@dataclass(frozen=True, slots=True)
class StructureSpec:
    """
    One structure class Z̄_λ of a structured linear model.

    Attributes:
        lambda_id: Hyperparameter label of the class.
        ell: Intrinsic dimension ℓ(Z_λ).
        log_count: log|Z̄_λ| (nominal count of the class).
    """

    lambda_id: Hashable
    ell: int
    log_count: float

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell < 1:
            raise DomainError(f"ell must be a positive integer, got {self.ell!r}.")
        if not (math.isfinite(self.log_count) and self.log_count >= 0):
            raise DomainError(f"log_count must be finite and nonnegative, got {self.log_count!r}.")


@dataclass(slots=True, eq=False)
class Structure:
    """
    A concrete structure Z ∈ Z̄_λ.

    Attributes:
        lambda_id: Label of the class the structure was generated for.
        key: Hashable description (labels, support indices, ...).
        operator: The N×ℓ design X_Z.
    """

    lambda_id: Hashable
    key: Tuple
    operator: np.ndarray


@dataclass(slots=True, eq=False)
class Truth:
    """
    A ground-truth draw of a structured linear model.

    Attributes:
        structure: The true structure Z*.
        B: Its parameter.
        mean: The signal X_{Z*}B.
    """

    structure: Structure
    B: np.ndarray
    mean: np.ndarray


@dataclass(slots=True)
class SLMConfig:
    """
    Prior and estimator settings of the structured linear model.

    Attributes:
        D: Exponent of the weight w(λ) ∝ exp(−D·ε(Z_λ)²).
        tau: Rate of the elliptical Laplace prior.
        n_is: Importance sample size per structure.
        max_structures: Largest class enumerated exactly.
        large_class: What to do with larger classes: "error" or "subsample".
        n_subsample: Structures drawn per class in "subsample" mode.
    """

    D: float = 4.0
    tau: float = 1.0
    n_is: int = 2000
    max_structures: int = 100_000
    large_class: str = "error"
    n_subsample: int = 2000

    def __post_init__(self):
        if not (self.D > 0 and self.tau > 0):
            raise DomainError("D and tau must be positive.")
        if self.n_is < 20 or self.max_structures < 1 or self.n_subsample < 1:
            raise DomainError("n_is must be at least 20; max_structures and n_subsample must be positive.")
        if self.large_class not in LARGE_CLASS_MODES:
            raise DomainError(f"large_class must be one of {LARGE_CLASS_MODES}, got {self.large_class!r}.")


def is_full_rank(operator: np.ndarray) -> bool:
    """
    det(X_ZᵀX_Z) > 0 up to the eigenvalue floor used by the elliptical Laplace prior.
    """
    return bool(np.linalg.eigvalsh(operator.T @ operator)[0] >= EIGEN_FLOOR)


class StructureRegistry(abc.ABC):
    """
    Abstract base class for families of structure classes {Z̄_λ}.

    Subclasses enumerate the full-rank structures of each class; the classes are mutually disjoint.

    Attributes:
        registry_name: Short name of the instantiation.
        specs: One StructureSpec per λ.
    """

    registry_name: str
    specs: List[StructureSpec]

    def spec(self, lambda_id: Hashable) -> StructureSpec:
        for spec in self.specs:
            if spec.lambda_id == lambda_id:
                return spec
        raise StructureError(f"{self.registry_name} has no structure class {lambda_id!r}.")

    def specs_by_id(self) -> Dict[Hashable, StructureSpec]:
        return {spec.lambda_id: spec for spec in self.specs}

    def candidate_count(self, lambda_id: Hashable) -> int:
        """
        Number of candidates :meth:`structures` walks through for λ, degenerate ones included.
        """
        return int(round(math.exp(self.spec(lambda_id).log_count)))

    @abstractmethod
    def structures(self, lambda_id: Hashable) -> Iterator[Structure]:
        """
        Iterates the full-rank structures of Z̄_λ.
        """
        raise NotImplementedError

    @abstractmethod
    def owner(self, structure: Structure) -> Optional[Hashable]:
        """
        The λ whose class contains ``structure``, or None for an orphan.
        """
        raise NotImplementedError

    def sample_structure(self, lambda_id: Hashable, rng: np.random.Generator) -> Structure:
        """
        A uniform draw from Z̄_λ.
        """
        raise NotImplementedError(f"{self.registry_name} cannot subsample structures.")

    def sample_truth(self, lambda_id: Hashable, rng: np.random.Generator, **params) -> Truth:
        raise NotImplementedError(f"{self.registry_name} has no ground-truth sampler.")
