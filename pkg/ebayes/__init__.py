__version__ = "0.1.0"

from ebayes.bridge import verify_eb_vb_equivalence
from ebayes.decomp import Support, estimate_test_errors, verify_sum_lemma
from ebayes.dists import gauss_laplace_marginal, log_gauss_laplace_marginal
from ebayes.errors import CapabilityError, DomainError, EBayesError, NumericError, PrecisionError, StructureError, UsageError
from ebayes.reg_eb import RegressionData, mmle_regression
from ebayes.seq_eb import SequenceData, SpikeSlabConfig, mmle
from ebayes.sieve_density import DensityData, SievePriorConfig, select_k_and_fit
from ebayes.slm import SLMConfig, eb_select_lambda

from ebayes import bridge, decomp, dists, errors, harness, reg_eb, seq_eb, sieve_density, slm, utils


def fit_sequence(y, alpha: float = 1.0, beta: float = 1.0, tau: float = 1.0):
    """
    Fits the spike-and-slab sequence model by marginal maximum likelihood.

    Equivalent to: mmle(SequenceData(y), SpikeSlabConfig(alpha, beta, tau))

    Args:
        y: The observation vector.
        alpha: First exponent of the beta hyperprior weight.
        beta: Second exponent of the beta hyperprior weight.
        tau: Laplace slab rate.

    Returns:
        The EBFit.
    """
    return mmle(SequenceData(y), SpikeSlabConfig(alpha=alpha, beta=beta, tau=tau))
