import math
from typing import Any, Dict, List

import numpy as np

from ebayes.bridge import make_sieve_family, random_family, sample_observation, suboptimal_kl_margin, verify_eb_vb_equivalence
from ebayes.errors import UsageError
from ebayes.harness.config import as_list
from ebayes.harness.models import Experiment

RESIDUAL_TOLERANCE = 1e-8
FAMILIES = ("random", "sieve")


class _BridgeSuite(Experiment):
    def __init__(self):
        self.experiment_name = "bridge-suite"
        self.description = "evidence maximization versus KL minimization on conjugate model families"
        self.columns = ["instance", "k_hat_mmle", "k_hat_kl", "agree", "identity_residual", "margin", "passed"]
        self.defaults = {
            "n_instances": 100,
            "n_obs": 10,
            "dims": [1, 2, 3],
            "family": "random",
            "sigma2": 1.0,
        }

    def _family(self, params: Dict[str, Any], rng: np.random.Generator):
        dims = [int(d) for d in as_list(params["dims"])]
        n_obs = int(params["n_obs"])
        if params["family"] == "random":
            return random_family(rng, n_obs, dims)
        if params["family"] == "sieve":
            design = rng.standard_normal((n_obs, len(dims)))
            return make_sieve_family(design, params["sigma2"], rng.dirichlet(np.ones(len(dims))))
        raise UsageError(f"family must be one of {', '.join(FAMILIES)}, got {params['family']!r}.")

    def run_replicate(self, params: Dict[str, Any], rng: np.random.Generator, replicate: int) -> List[Dict[str, Any]]:
        rows = []
        for instance in range(int(params["n_instances"])):
            family = self._family(params, rng)
            Y = sample_observation(family, rng)
            report = verify_eb_vb_equivalence(family, Y)
            finite = sum(math.isfinite(v) for v in report.kl_values.values())
            margin = suboptimal_kl_margin(family, Y) if finite > 1 else math.nan
            rows.append(
                {
                    "instance": instance,
                    "k_hat_mmle": report.k_hat_mmle,
                    "k_hat_kl": report.k_hat_kl,
                    "agree": report.agree,
                    "identity_residual": report.identity_residual,
                    "margin": margin,
                    "passed": report.agree and report.identity_residual <= RESIDUAL_TOLERANCE and not margin < 0,
                }
            )
        return rows

    def summarize(self, rows: List[Dict[str, Any]], params: Dict[str, Any]) -> Dict[str, Any]:
        return {
            "agree_count": int(sum(r["agree"] for r in rows)),
            "max_residual": max((r["identity_residual"] for r in rows), default=0.0),
            "pass_counts": {"bridge": [int(sum(r["passed"] for r in rows)), len(rows)]},
            "all_passed": all(r["passed"] for r in rows),
        }


BridgeSuite = _BridgeSuite()
