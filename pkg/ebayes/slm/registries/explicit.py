from typing import Dict, Hashable, Iterator, List, Optional, Sequence

import numpy as np

from ebayes.errors import StructureError
from ebayes.slm.models import Structure, StructureRegistry, StructureSpec, is_full_rank


class ExplicitRegistry(StructureRegistry):
    """
    A registry given literally: specs plus, per class, a list of operators.

    Structure keys are ``(lambda_id, position)``. Classes may be left without operators when only the weight
    bookkeeping is needed.
    """

    registry_name = "explicit"

    def __init__(self, specs: Sequence[StructureSpec], structures: Optional[Dict[Hashable, List[np.ndarray]]] = None):
        self.specs = list(specs)
        ids = [spec.lambda_id for spec in self.specs]
        if len(set(ids)) != len(ids):
            raise StructureError("explicit registry has duplicated lambda ids.")
        self._operators: Dict[Hashable, List[np.ndarray]] = {}
        for lambda_id, operators in (structures or {}).items():
            spec = self.spec(lambda_id)
            checked = []
            for operator in operators:
                operator = np.atleast_2d(np.asarray(operator, dtype=float))
                if operator.shape[1] != spec.ell:
                    raise StructureError(f"operator of class {lambda_id!r} has {operator.shape[1]} columns, expected {spec.ell}.")
                if not is_full_rank(operator):
                    raise StructureError(f"operator of class {lambda_id!r} is rank deficient.")
                checked.append(operator)
            self._operators[lambda_id] = checked

    def candidate_count(self, lambda_id) -> int:
        self.spec(lambda_id)
        return len(self._operators.get(lambda_id, []))

    def structures(self, lambda_id) -> Iterator[Structure]:
        self.spec(lambda_id)
        for position, operator in enumerate(self._operators.get(lambda_id, [])):
            yield Structure(lambda_id, (lambda_id, position), operator)

    def owner(self, structure: Structure) -> Optional[Hashable]:
        if not (isinstance(structure.key, tuple) and len(structure.key) == 2):
            return None
        lambda_id, position = structure.key
        if lambda_id in self._operators and isinstance(position, int) and 0 <= position < len(self._operators.get(lambda_id, [])):
            return lambda_id
        return None


def make_explicit_registry(specs: Sequence[StructureSpec], structures: Optional[Dict[Hashable, List[np.ndarray]]] = None) -> ExplicitRegistry:
    return ExplicitRegistry(specs, structures)
