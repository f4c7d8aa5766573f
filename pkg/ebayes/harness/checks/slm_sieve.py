from typing import Any, Dict, List

import numpy as np

from ebayes.harness.models import Check, CheckResult
from ebayes.slm import SLMConfig, make_biclustering_registry, make_multitask_registry, make_sparse_regression_registry, verify_slm_sieve

C2 = 1.0


class _SLMSieveCheck(Check):
    def __init__(self):
        self.check_name = "slm-sieve"

    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        cfg = SLMConfig(D=2.0 * C2 + 1.0)
        X = rng.standard_normal((20, 10))
        registries = [
            make_biclustering_registry(12, 12, 3, 3),
            make_sparse_regression_registry(X, 4),
            make_multitask_registry(X, 3, 3),
        ]
        results = []
        for registry in registries:
            for spec in registry.specs:
                sieve = verify_slm_sieve(registry, cfg, spec.lambda_id, C2)
                agree = abs(sieve.log_sum_direct - sieve.log_sum_cancelled) <= 1e-8 * max(1.0, abs(sieve.log_sum_cancelled))
                case = f"{registry.registry_name},lambda*={spec.lambda_id}"
                results.append(CheckResult(self.check_name, case, sieve.log_sum_direct, sieve.log_bound, sieve.holds and agree))
        return results


SLMSieveCheck = _SLMSieveCheck()
