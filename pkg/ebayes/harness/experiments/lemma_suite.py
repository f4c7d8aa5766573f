import collections
from typing import Any, Dict, List

import numpy as np

from ebayes.harness.checks import all_checks
from ebayes.harness.models import Experiment
from ebayes.utils import derive_rng, stable_seed


class _LemmaSuite(Experiment):
    def __init__(self):
        self.experiment_name = "lemma-suite"
        self.description = "numeric checks of the decomposition, testing and prior-mass lemmas"
        self.columns = ["check", "case", "value", "bound", "passed"]
        self.defaults = {
            "n_mc": 10_000,
            "mass_C2": 5.0,
        }

    def run_replicate(self, params: Dict[str, Any], rng: np.random.Generator, replicate: int) -> List[Dict[str, Any]]:
        seed = int(rng.integers(2**62))
        rows = []
        for check in all_checks:
            for result in check.evaluate(params, derive_rng(seed, stable_seed(check.check_name))):
                rows.append(
                    {
                        "check": result.check,
                        "case": result.case,
                        "value": result.value,
                        "bound": result.bound,
                        "passed": bool(result.passed),
                    }
                )
        return rows

    def summarize(self, rows: List[Dict[str, Any]], params: Dict[str, Any]) -> Dict[str, Any]:
        passed = collections.Counter(r["check"] for r in rows if r["passed"])
        total = collections.Counter(r["check"] for r in rows)
        return {
            "pass_counts": {check: [passed[check], total[check]] for check in sorted(total)},
            "failed_cases": [f"{r['check']}:{r['case']}" for r in rows if not r["passed"]],
            "all_passed": all(r["passed"] for r in rows),
        }


LemmaSuite = _LemmaSuite()
