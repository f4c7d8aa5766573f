from ebayes.slm import checks, marginal, models, registries, selection, weights
from ebayes.slm.checks import SLMMassRatio, StructureTestEstimate, estimate_slm_type_one, slm_mass_ratio
from ebayes.slm.marginal import StructureMarginal, log_marginal_structure
from ebayes.slm.models import SLMConfig, Structure, StructureRegistry, StructureSpec, Truth, is_full_rank
from ebayes.slm.registries import (
    make_biclustering_registry,
    make_explicit_registry,
    make_multitask_registry,
    make_sparse_regression_registry,
    name_to_factory,
)
from ebayes.slm.selection import LambdaScore, SelectionResult, eb_select_lambda
from ebayes.slm.weights import (
    ComplexityCheck,
    SieveSumResult,
    check_complexity_condition,
    effective_weight_slm,
    epsilon_sq,
    log_delta,
    log_weight_slm,
    verify_slm_sieve,
)
