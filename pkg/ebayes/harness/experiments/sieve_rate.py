import math
from typing import Any, Dict, List, Tuple

import numpy as np

from ebayes.harness.config import as_list
from ebayes.harness.models import Experiment
from ebayes.sieve_density import DensityData, SievePriorConfig, fourier_basis, log_normalizer, sample_from_density, select_k_and_fit, sobolev_truth


class _SieveRate(Experiment):
    def __init__(self):
        self.experiment_name = "sieve-rate"
        self.description = "sieve-prior density estimation: Hellinger risk and selected level against n"
        self.columns = ["n", "k_hat", "hellinger_sq", "plugin_hellinger_sq", "rate", "risk_ratio"]
        self.defaults = {
            "n_values": [500, 1000, 2000, 4000],
            "truth_length": 20,
            "decay": 1.5,
            "alpha": 1.0,
            "sigma2": 1.0,
            "tau_pois": 1.0,
            "k_max": 50,
            "n_is": 2000,
            "n_draws": 200,
        }

    def run_replicate(self, params: Dict[str, Any], rng: np.random.Generator, replicate: int) -> List[Dict[str, Any]]:
        theta_star = sobolev_truth(int(params["truth_length"]), params["decay"])
        c_star = log_normalizer(theta_star, 1024)

        def truth(x: np.ndarray) -> np.ndarray:
            return np.exp(fourier_basis(x, theta_star.size) @ theta_star - c_star)

        cfg = SievePriorConfig(sigma2=params["sigma2"], tau_pois=params["tau_pois"], k_max=int(params["k_max"]), n_is=int(params["n_is"]))
        n_values = sorted(int(n) for n in as_list(params["n_values"]))
        sample = sample_from_density(theta_star, n_values[-1], rng)
        a = params["alpha"]

        rows = []
        for n in n_values:
            fit = select_k_and_fit(DensityData(sample[:n]), cfg, rng, n_draws=int(params["n_draws"]))
            risk = fit.posterior_hellinger_sq(truth)
            rate = n ** (-2.0 * a / (2.0 * a + 1.0)) * math.log(n) ** (2.0 * a / (2.0 * a + 1.0))
            rows.append(
                {
                    "n": n,
                    "k_hat": fit.k_hat,
                    "hellinger_sq": risk,
                    "plugin_hellinger_sq": fit.hellinger_sq_to(truth),
                    "rate": rate,
                    "risk_ratio": risk / rate,
                }
            )
        return rows

    @staticmethod
    def _medians(rows: List[Dict[str, Any]]) -> Dict[int, float]:
        by_n: Dict[int, List[float]] = {}
        for row in rows:
            by_n.setdefault(row["n"], []).append(row["hellinger_sq"])
        return {n: float(np.median(values)) for n, values in sorted(by_n.items())}

    def summarize(self, rows: List[Dict[str, Any]], params: Dict[str, Any]) -> Dict[str, Any]:
        medians = self._medians(rows)
        values = list(medians.values())
        replicates: Dict[int, List[Tuple[int, int]]] = {}
        for row in rows:
            replicates.setdefault(row["_replicate"], []).append((row["n"], row["k_hat"]))
        monotone = [all(a[1] <= b[1] for a, b in zip(seq, seq[1:])) for seq in (sorted(v) for v in replicates.values())]
        return {
            "median_hellinger_sq": medians,
            "hellinger_decreasing": all(a > b for a, b in zip(values, values[1:])),
            "k_monotone_count": int(sum(monotone)),
            "k_monotone_frequency": float(np.mean(monotone)) if monotone else math.nan,
        }

    def plot_series(self, rows: List[Dict[str, Any]], params: Dict[str, Any]) -> List[Tuple[str, float, float]]:
        return [("median_hellinger_sq", float(n), value) for n, value in self._medians(rows).items()]


SieveRate = _SieveRate()
