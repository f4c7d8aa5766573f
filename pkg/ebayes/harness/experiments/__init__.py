from . import bridge_suite, lemma_suite, reg_contraction, seq_contraction, sieve_rate, slm_bicluster, testing_errors
