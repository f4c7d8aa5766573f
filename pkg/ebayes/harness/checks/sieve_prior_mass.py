from typing import Any, Dict, List

import numpy as np

from ebayes.harness.models import Check, CheckResult
from ebayes.sieve_density import SievePriorConfig, prior_mass_split, sobolev_truth

MODEL_BOUND = 1.0
PARAMETER_BOUND = 2.0


class _SievePriorMassCheck(Check):
    def __init__(self):
        self.check_name = "sieve-prior-mass"

    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        theta_star = sobolev_truth()
        cfg = SievePriorConfig()
        results = []
        for n in (200, 1000):
            split = prior_mass_split(theta_star, n, cfg, 1.0, int(params["n_mc"]), rng)
            results.append(CheckResult(self.check_name, f"n={n},k*={split.k_star},model", split.model_part, MODEL_BOUND, split.model_part <= MODEL_BOUND))
            results.append(
                CheckResult(self.check_name, f"n={n},k*={split.k_star},parameter", split.parameter_part, PARAMETER_BOUND, split.parameter_part <= PARAMETER_BOUND)
            )
        return results


SievePriorMassCheck = _SievePriorMassCheck()
