from . import (
    chi_square_tail,
    complexity_condition,
    effective_weight,
    gamma_ratio,
    regression_mass,
    regression_test,
    sequence_mass,
    sequence_test,
    sieve_prior_mass,
    slm_mass,
    slm_sieve,
    slm_test,
    sum_lemma,
)

all_checks = [
    sum_lemma.SumLemmaCheck,
    effective_weight.EffectiveWeightCheck,
    gamma_ratio.GammaRatioCheck,
    chi_square_tail.ChiSquareTailCheck,
    sequence_test.SequenceTestCheck,
    regression_test.RegressionTestCheck,
    sequence_mass.SequenceMassCheck,
    regression_mass.RegressionMassCheck,
    complexity_condition.ComplexityConditionCheck,
    slm_sieve.SLMSieveCheck,
    slm_test.SLMTestCheck,
    slm_mass.SLMMassCheck,
    sieve_prior_mass.SievePriorMassCheck,
]
