from typing import Any, Dict, List

import numpy as np

from ebayes.harness.models import Check, CheckResult
from ebayes.slm import SLMConfig, make_sparse_regression_registry, slm_mass_ratio


class _SLMMassCheck(Check):
    def __init__(self):
        self.check_name = "slm-mass-ratio"

    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        X = rng.standard_normal((20, 5))
        X /= np.linalg.norm(X, axis=0)
        registry = make_sparse_regression_registry(X, 2)
        cfg = SLMConfig()
        singles = list(registry.structures(1))
        Z_star, B_star = singles[0], np.array([0.5])
        alternatives = singles[:2] + [next(iter(registry.structures(2)))]

        results = []
        for Z in alternatives:
            for eps_sq in (2.0, 4.0, 8.0):
                ratio = slm_mass_ratio(registry, Z, Z_star, B_star, eps_sq, cfg, int(params["n_mc"]), rng, C2=params["mass_C2"])
                case = f"Z={Z.key},eps_sq={eps_sq:g}"
                results.append(CheckResult(self.check_name, case, ratio.log_ratio, ratio.log_bound, ratio.holds))
        return results


SLMMassCheck = _SLMMassCheck()
