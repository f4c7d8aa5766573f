import time
from pprint import pprint

import numpy as np

import ebayes

if __name__ == "__main__":
    rng = np.random.default_rng(7)
    p, s_star = 200, 5
    theta_star = np.zeros(p)
    theta_star[:s_star] = 6.0 * np.sqrt(np.log(p))
    y = theta_star + rng.standard_normal(p)

    print("## SEQUENCE MMLE")
    start = time.time()
    fit = ebayes.fit_sequence(y, alpha=1.0, beta=float(p), tau=1.0)
    end = time.time()
    print(f"Time taken: {end - start} seconds")
    print(f"lambda_hat = {fit.lambda_hat:.6g} (s*/p = {s_star / p:.6g})")
    print(f"loss / (s* log p) = {np.sum((fit.post_mean - theta_star) ** 2) / (s_star * np.log(p)):.4g}")
    print("-" * 100)
    print("## TOP INCLUSION PROBABILITIES")
    top = np.argsort(fit.inclusion_prob)[::-1][:8]
    pprint({int(j): round(float(fit.inclusion_prob[j]), 4) for j in top})
