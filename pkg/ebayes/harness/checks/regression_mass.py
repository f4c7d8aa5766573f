import math
from typing import Any, Dict, List

import numpy as np

from ebayes.decomp import Support, mass_ratio_check
from ebayes.harness.models import Check, CheckResult
from ebayes.reg_eb import regression_tau


class _RegressionMassCheck(Check):
    def __init__(self):
        self.check_name = "regression-mass-ratio"

    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        n, p = 30, 6
        X = rng.standard_normal((n, p))
        tau = regression_tau(X, 1.0)
        S_star = Support((0,), p)
        theta_star = S_star.mask().astype(float)
        grid = [k * math.log(p) for k in (1, 2, 4, 8)]
        results = []
        for S in (Support((0,), p), Support((0, 1), p), Support((2, 3), p)):
            records = mass_ratio_check(S, S_star, theta_star, grid, tau, params["mass_C2"], int(params["n_mc"]), rng, design=X)
            for record in records:
                results.append(
                    CheckResult(self.check_name, f"S={S.indices},eps_sq={record.eps_sq:.6g}", record.ratio, math.exp(record.log_bound), record.holds)
                )
        return results


RegressionMassCheck = _RegressionMassCheck()
