import math
from typing import Any, Dict, List

import numpy as np

from ebayes.harness.models import Check, CheckResult
from ebayes.slm import StructureSpec, check_complexity_condition, make_biclustering_registry


class _ComplexityConditionCheck(Check):
    def __init__(self):
        self.check_name = "complexity-condition"

    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        bicluster = check_complexity_condition(make_biclustering_registry(24, 24, 4, 4))
        crowded = check_complexity_condition([StructureSpec(j, 1, log_count) for j, log_count in enumerate((0.2, 0.5, 0.9))])
        return [
            CheckResult(self.check_name, "biclustering n=m=24,k,l<=4", bicluster.log_tail_sum, 1.0, bicluster.holds),
            CheckResult(self.check_name, "three classes in (1,2]", float(len(crowded.offending)), 1.0, crowded.offending == [2]),
        ]


ComplexityConditionCheck = _ComplexityConditionCheck()
