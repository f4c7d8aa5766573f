import math
from typing import Any, Dict, List

import numpy as np

from ebayes.decomp import lambda_star
from ebayes.harness.models import Experiment
from ebayes.harness.report import quantile_summary
from ebayes.seq_eb import SequenceData, SpikeSlabConfig, mmle, posterior_risk


def sparse_truth(p: int, s_star: int, signal: float, rng: np.random.Generator) -> np.ndarray:
    """
    θ* with ``signal`` on a uniformly drawn support of size s* and zeros elsewhere.
    """
    theta = np.zeros(p)
    theta[rng.choice(p, size=s_star, replace=False)] = signal
    return theta


def signal_of(params: Dict[str, Any], p: int) -> float:
    return params["signal"] if params["signal"] > 0 else params["signal_scale"] * math.sqrt(math.log(p))


def beta_of(params: Dict[str, Any], p: int) -> float:
    return params["beta"] if params["beta"] > 0 else float(p) ** params["beta_exponent"]


class _SeqContraction(Experiment):
    def __init__(self):
        self.experiment_name = "seq-contraction"
        self.description = "sequence-model MMLE contraction around a sparse truth"
        self.columns = ["lambda_hat", "lambda_ratio", "loss", "loss_ratio", "posterior_risk_ratio", "n_included"]
        self.defaults = {
            "p": 500,
            "s_star": 10,
            "signal": 0.0,
            "signal_scale": 6.0,
            "alpha": 1.0,
            "beta": 0.0,
            "beta_exponent": 3.0,
            "tau": 1.0,
        }

    def run_replicate(self, params: Dict[str, Any], rng: np.random.Generator, replicate: int) -> List[Dict[str, Any]]:
        p, s_star = int(params["p"]), int(params["s_star"])
        cfg = SpikeSlabConfig(alpha=params["alpha"], beta=beta_of(params, p), tau=params["tau"])
        theta_star = sparse_truth(p, s_star, signal_of(params, p), rng)
        data = SequenceData(theta_star + rng.standard_normal(p))

        fit = mmle(data, cfg)
        oracle = lambda_star(s_star, p, cfg.alpha, cfg.beta)
        scale = max(s_star, 1) * math.log(p)
        loss = float(np.sum((fit.post_mean - theta_star) ** 2))
        return [
            {
                "lambda_hat": fit.lambda_hat,
                "lambda_ratio": fit.lambda_hat / oracle if oracle > 0 else math.nan,
                "loss": loss,
                "loss_ratio": loss / scale,
                "posterior_risk_ratio": posterior_risk(data, fit.lambda_hat, cfg.tau, theta_star) / scale,
                "n_included": int(np.sum(fit.inclusion_prob > 0.5)),
            }
        ]

    def summarize(self, rows: List[Dict[str, Any]], params: Dict[str, Any]) -> Dict[str, Any]:
        summary = {}
        summary.update(quantile_summary((r["loss_ratio"] for r in rows), "loss_ratio"))
        summary.update(quantile_summary((r["lambda_ratio"] for r in rows), "lambda_ratio"))
        summary.update(quantile_summary((r["posterior_risk_ratio"] for r in rows), "posterior_risk_ratio"))
        summary["median_loss_ratio"] = summary["loss_ratio_median"]
        return summary


SeqContraction = _SeqContraction()
