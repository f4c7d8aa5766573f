from ebayes.bridge import equivalence, evidence, models
from ebayes.bridge.equivalence import (
    kl_to_hierarchical,
    make_sieve_family,
    random_family,
    sample_observation,
    suboptimal_kl_margin,
    verify_eb_vb_equivalence,
)
from ebayes.bridge.evidence import chib_log_evidence, exact_log_evidence, gaussian_kl, posterior, posterior_gain
from ebayes.bridge.models import ConjugateModel, ConjugateModelFamily, EquivalenceReport
