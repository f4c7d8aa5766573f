import collections
import math
from typing import Any, Dict, List

import numpy as np

from ebayes.harness.models import Experiment
from ebayes.harness.report import quantile_summary
from ebayes.slm import SLMConfig, check_complexity_condition, eb_select_lambda, epsilon_sq, make_biclustering_registry


class _SLMBicluster(Experiment):
    def __init__(self):
        self.experiment_name = "slm-bicluster"
        self.description = "structured-linear-model selection of the biclustering class"
        self.columns = ["k_hat", "l_hat", "correct", "unstable", "approximate", "score_gap", "loss", "loss_ratio"]
        self.defaults = {
            "n": 8,
            "m": 8,
            "k_star": 2,
            "l_star": 2,
            "separation": 4.0,
            "k_max": 3,
            "l_max": 3,
            "D": 4.0,
            "tau": 1.0,
            "n_is": 2000,
            "max_structures": 100_000,
            "large_class": "subsample",
            "n_subsample": 2000,
        }

    @staticmethod
    def _registry(params: Dict[str, Any]):
        return make_biclustering_registry(int(params["n"]), int(params["m"]), int(params["k_max"]), int(params["l_max"]))

    def run_replicate(self, params: Dict[str, Any], rng: np.random.Generator, replicate: int) -> List[Dict[str, Any]]:
        registry = self._registry(params)
        cfg = SLMConfig(
            D=params["D"],
            tau=params["tau"],
            n_is=int(params["n_is"]),
            max_structures=int(params["max_structures"]),
            large_class=str(params["large_class"]),
            n_subsample=int(params["n_subsample"]),
        )
        star = (int(params["k_star"]), int(params["l_star"]))
        truth = registry.sample_truth(star, rng, separation=params["separation"])
        Y = truth.mean + rng.standard_normal(truth.mean.size)

        result = eb_select_lambda(Y, registry, cfg, rng)
        ranked = sorted((s.score for s in result.scores.values()), reverse=True)
        loss = float(np.sum((result.post_mean - truth.mean) ** 2))
        k_hat, l_hat = result.lambda_hat
        return [
            {
                "k_hat": k_hat,
                "l_hat": l_hat,
                "correct": result.lambda_hat == star,
                "unstable": result.unstable,
                "approximate": result.approximate,
                "score_gap": ranked[0] - ranked[1] if len(ranked) > 1 else math.inf,
                "loss": loss,
                "loss_ratio": loss / epsilon_sq(registry.spec(star)),
            }
        ]

    def summarize(self, rows: List[Dict[str, Any]], params: Dict[str, Any]) -> Dict[str, Any]:
        counts = collections.Counter(f"{r['k_hat']},{r['l_hat']}" for r in rows)
        modal, modal_count = min(counts.items(), key=lambda item: (-item[1], item[0])) if counts else ("", 0)
        summary = quantile_summary((r["loss_ratio"] for r in rows), "loss_ratio")
        summary.update(
            {
                "median_loss_ratio": summary["loss_ratio_median"],
                "selection_counts": dict(sorted(counts.items())),
                "modal_selection": modal,
                "modal_count": modal_count,
                "correct_count": int(sum(r["correct"] for r in rows)),
                "complexity_condition": check_complexity_condition(self._registry(params)).holds,
            }
        )
        return summary


SLMBicluster = _SLMBicluster()
