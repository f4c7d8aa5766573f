from typing import Any, Dict, List

import numpy as np

from ebayes.decomp import estimate_test_errors
from ebayes.harness.models import Check, CheckResult


class _SequenceTestCheck(Check):
    def __init__(self):
        self.check_name = "sequence-test"

    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        est = estimate_test_errors(8, 2, int(params["n_mc"]), rng)
        type_one_limit = est.type_one_bound + 3.0 * est.type_one_se
        power_limit = est.power_bound - 3.0 * est.power_se
        return [
            CheckResult(self.check_name, "p=8,s*=2,type-one", est.type_one, type_one_limit, est.type_one <= type_one_limit),
            CheckResult(self.check_name, "p=8,s*=2,power", est.power, power_limit, est.power >= power_limit),
        ]


SequenceTestCheck = _SequenceTestCheck()
