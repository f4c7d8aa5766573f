from ebayes.sieve_density import basis, marginal, models, prior_mass, selection
from ebayes.sieve_density.basis import fourier_basis, hellinger_sq, hellinger_sq_to, log_normalizer, sample_from_density, sobolev_truth
from ebayes.sieve_density.marginal import log_likelihood, log_likelihood_grad, log_marginal_k, map_estimate
from ebayes.sieve_density.models import DensityData, ExpFamilyModel, KMarginal, SieveFit, SievePriorConfig
from ebayes.sieve_density.prior_mass import PriorMassSplit, oracle_level, oracle_rate, prior_mass_split, renyi2
from ebayes.sieve_density.selection import poisson_log_weight, select_k_and_fit
