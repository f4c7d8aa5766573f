from typing import Any, Dict, List

import numpy as np
from scipy.stats import chi2

from ebayes.dists import chi2_tail_bound
from ebayes.harness.models import Check, CheckResult


class _ChiSquareTailCheck(Check):
    def __init__(self):
        self.check_name = "chi-square-tail"

    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        results = []
        for d in (1, 2, 5, 10, 20):
            for t in (0.5 * d, d, 2.0 * d, 5.0 * d, 10.0 * d):
                tail = float(chi2.sf(t, d))
                bound = chi2_tail_bound(d, t)
                results.append(CheckResult(self.check_name, f"d={d},t={t:g}", tail, bound, tail <= bound))
        return results


ChiSquareTailCheck = _ChiSquareTailCheck()
