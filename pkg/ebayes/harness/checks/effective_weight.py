from typing import Any, Dict, List

import numpy as np

from ebayes import utils
from ebayes.decomp import effective_weight, log_nu_lambda
from ebayes.harness.models import Check, CheckResult
from ebayes.seq_eb import SpikeSlabConfig

TOLERANCE = 1e-8


class _EffectiveWeightCheck(Check):
    def __init__(self):
        self.check_name = "effective-weight"

    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        results = []
        for p, alpha, beta in ((6, 1.0, 1.0), (10, 1.0, 10.0), (15, 2.0, 15.0**2)):
            cfg = SpikeSlabConfig(alpha=alpha, beta=beta)
            for s in range(p + 1):

                def objective(lam: float) -> float:
                    log_w = cfg.log_weight(lam)
                    return -np.inf if log_w == -np.inf else log_w + log_nu_lambda(s, p, lam)

                _, numeric = utils.maximize_unit_interval(objective, n_grid=2048, tol=1e-12)
                gap = abs(effective_weight(s, p, alpha, beta) - numeric)
                results.append(CheckResult(self.check_name, f"p={p},alpha={alpha:g},beta={beta:g},s={s}", gap, TOLERANCE, gap <= TOLERANCE))
        return results


EffectiveWeightCheck = _EffectiveWeightCheck()
