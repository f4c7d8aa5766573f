import math
from typing import Any, Dict, List

import numpy as np

from ebayes.decomp import Support
from ebayes.harness.experiments.seq_contraction import beta_of, signal_of, sparse_truth
from ebayes.harness.models import Experiment
from ebayes.harness.report import quantile_summary
from ebayes.reg_eb import RegressionData, mmle_regression, prediction_loss, regression_tau
from ebayes.seq_eb import SpikeSlabConfig


class _RegContraction(Experiment):
    def __init__(self):
        self.experiment_name = "reg-contraction"
        self.description = "sparse-regression MMLE over enumerated supports"
        self.columns = ["lambda_hat", "loss", "loss_ratio", "top_is_true", "top_prob", "truncation_mass", "n_skipped"]
        self.defaults = {
            "n": 100,
            "p": 12,
            "s_star": 2,
            "signal": 0.0,
            "signal_scale": 6.0,
            "s_max": 4,
            "zeta": 1.0,
            "alpha": 1.0,
            "beta": 0.0,
            "beta_exponent": 1.0,
            "n_is": 10_000,
        }

    def run_replicate(self, params: Dict[str, Any], rng: np.random.Generator, replicate: int) -> List[Dict[str, Any]]:
        n, p, s_star = int(params["n"]), int(params["p"]), int(params["s_star"])
        X = rng.standard_normal((n, p))
        theta_star = sparse_truth(p, s_star, signal_of(params, p), rng)
        data = RegressionData(X @ theta_star + rng.standard_normal(n), X)
        cfg = SpikeSlabConfig(alpha=params["alpha"], beta=beta_of(params, p), tau=regression_tau(X, params["zeta"]))

        fit = mmle_regression(data, cfg, int(params["s_max"]), seed=int(rng.integers(2**62)), n_is=int(params["n_is"]))
        loss = prediction_loss(data, fit.post_mean, theta_star)
        top, top_prob = fit.support_posterior[0]
        return [
            {
                "lambda_hat": fit.lambda_hat,
                "loss": loss,
                "loss_ratio": loss / (max(s_star, 1) * math.log(p)),
                "top_is_true": top == Support.from_mask(theta_star != 0),
                "top_prob": top_prob,
                "truncation_mass": fit.truncation_mass,
                "n_skipped": fit.n_skipped,
            }
        ]

    def summarize(self, rows: List[Dict[str, Any]], params: Dict[str, Any]) -> Dict[str, Any]:
        summary = quantile_summary((r["loss_ratio"] for r in rows), "loss_ratio")
        summary["median_loss_ratio"] = summary["loss_ratio_median"]
        summary["top_rank_frequency"] = float(np.mean([r["top_is_true"] for r in rows])) if rows else math.nan
        return summary


RegContraction = _RegContraction()
