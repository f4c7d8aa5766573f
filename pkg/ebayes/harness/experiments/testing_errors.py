import math
from typing import Any, Dict, List

import numpy as np

from ebayes.decomp import estimate_test_errors
from ebayes.harness.models import Experiment


class _ChiSquareErrors(Experiment):
    def __init__(self):
        self.experiment_name = "test-errors"
        self.description = "Monte Carlo type-1 error and power of the combined chi-square tests"
        self.columns = ["type_one", "type_one_se", "type_one_bound", "power", "power_se", "power_bound", "type_one_ok", "power_ok"]
        self.defaults = {
            "p": 8,
            "s_star": 2,
            "n_mc": 10_000,
            "separation": 20.0,
            "n": 0,
            "s_max": 0,
        }

    def run_replicate(self, params: Dict[str, Any], rng: np.random.Generator, replicate: int) -> List[Dict[str, Any]]:
        p, n = int(params["p"]), int(params["n"])
        design = rng.standard_normal((n, p)) if n > 0 else None
        s_max = int(params["s_max"]) or None
        est = estimate_test_errors(p, int(params["s_star"]), int(params["n_mc"]), rng, separation=params["separation"], design=design, s_max=s_max)
        return [
            {
                "type_one": est.type_one,
                "type_one_se": est.type_one_se,
                "type_one_bound": est.type_one_bound,
                "power": est.power,
                "power_se": est.power_se,
                "power_bound": est.power_bound,
                "type_one_ok": est.type_one <= est.type_one_bound + 3.0 * est.type_one_se,
                "power_ok": est.power >= est.power_bound - 3.0 * est.power_se,
            }
        ]

    def summarize(self, rows: List[Dict[str, Any]], params: Dict[str, Any]) -> Dict[str, Any]:
        return {
            "min_power": min((r["power"] for r in rows), default=math.nan),
            "max_type_one": max((r["type_one"] for r in rows), default=math.nan),
            "pass_counts": {
                "type_one": [int(sum(r["type_one_ok"] for r in rows)), len(rows)],
                "power": [int(sum(r["power_ok"] for r in rows)), len(rows)],
            },
            "all_passed": all(r["type_one_ok"] and r["power_ok"] for r in rows),
        }


ChiSquareErrors = _ChiSquareErrors()
