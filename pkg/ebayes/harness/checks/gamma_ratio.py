import math
from typing import Any, Dict, List

import numpy as np

from ebayes.decomp import effective_weight, gamma_ratio_bounds
from ebayes.harness.models import Check, CheckResult


class _GammaRatioCheck(Check):
    def __init__(self):
        self.check_name = "gamma-ratio"

    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        results = []
        for p in (8, 12):
            beta = float(p) ** 4
            lower, upper = gamma_ratio_bounds(p, 1.0, beta)
            log_gamma = [effective_weight(s, p, 1.0, beta) for s in range(p + 1)]
            for s in range(p):
                log_ratio = log_gamma[s + 1] - log_gamma[s]
                passed = math.log(lower) - 1e-12 <= log_ratio <= math.log(upper) + 1e-12
                results.append(CheckResult(self.check_name, f"p={p},s={s}", math.exp(log_ratio), upper, passed))
        return results


GammaRatioCheck = _GammaRatioCheck()
