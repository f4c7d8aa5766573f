from ebayes.decomp import chisq, mass, models, weights
from ebayes.decomp.chisq import (
    TestErrorEstimate,
    estimate_test_errors,
    max_test_regression,
    max_test_sequence,
    test_reject_regression,
    test_reject_sequence,
)
from ebayes.decomp.mass import MassEstimate, MassRatioRecord, estimate_slab_ball_mass, mass_ratio_check
from ebayes.decomp.models import SpikeSlabRateMap, Support, iter_supports
from ebayes.decomp.weights import (
    SumLemmaResult,
    effective_weight,
    gamma_ratio_bounds,
    lambda_star,
    log_nu_lambda,
    nu_lambda,
    sum_lemma_by_enumeration,
    verify_sum_lemma,
)

