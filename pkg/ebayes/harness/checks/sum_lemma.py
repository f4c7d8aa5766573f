import math
from typing import Any, Dict, List

import numpy as np

from ebayes.decomp import sum_lemma_by_enumeration, verify_sum_lemma
from ebayes.harness.models import Check, CheckResult

C4 = 12.0
EMPTY_BOUND = 2.0


class _SumLemmaCheck(Check):
    def __init__(self):
        self.check_name = "sum-lemma"

    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        results = []
        for p in (8, 12, 16):
            beta = float(p) ** 4
            for s_star in range(p + 1):
                value = verify_sum_lemma(p, 1.0, beta, 1.0, s_star).log_sum
                bound = C4 * s_star * math.log(p) if s_star else EMPTY_BOUND
                results.append(CheckResult(self.check_name, f"p={p},s*={s_star}", value, bound, value <= bound))

        grouped = verify_sum_lemma(8, 1.0, 8.0**4, 1.0, 2).log_sum
        enumerated = sum_lemma_by_enumeration(8, 1.0, 8.0**4, 1.0, 2)
        gap = abs(grouped - enumerated)
        results.append(CheckResult(self.check_name, "p=8,s*=2,enumeration", gap, 1e-9, gap <= 1e-9))
        return results


SumLemmaCheck = _SumLemmaCheck()
