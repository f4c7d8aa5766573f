from typing import Any, Dict, List

import numpy as np

from ebayes.decomp import estimate_test_errors
from ebayes.harness.models import Check, CheckResult


class _RegressionTestCheck(Check):
    def __init__(self):
        self.check_name = "regression-test"

    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        X = rng.standard_normal((20, 6))
        est = estimate_test_errors(6, 1, int(params["n_mc"]), rng, separation=30.0, design=X, s_max=3)
        type_one_limit = est.type_one_bound + 3.0 * est.type_one_se
        power_limit = est.power_bound - 3.0 * est.power_se
        return [
            CheckResult(self.check_name, "n=20,p=6,s*=1,type-one", est.type_one, type_one_limit, est.type_one <= type_one_limit),
            CheckResult(self.check_name, "n=20,p=6,s*=1,power", est.power, power_limit, est.power >= power_limit),
        ]


RegressionTestCheck = _RegressionTestCheck()
