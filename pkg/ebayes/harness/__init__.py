import logging
import time
from typing import Any, Dict, List

from joblib import Parallel, delayed

from ebayes import __version__
from ebayes.errors import EBayesError, UsageError
from ebayes.harness import checks, config, experiments, models, report
from ebayes.harness.models import Experiment, ExperimentConfig, ExperimentReport, ReplicateRecord
from ebayes.utils import derive_rng

logger = logging.getLogger(__name__)

# Map experiment names to their plugin singletons.
name_to_experiment: Dict[str, Experiment] = {
    experiments.seq_contraction.SeqContraction.experiment_name: experiments.seq_contraction.SeqContraction,
    experiments.reg_contraction.RegContraction.experiment_name: experiments.reg_contraction.RegContraction,
    experiments.slm_bicluster.SLMBicluster.experiment_name: experiments.slm_bicluster.SLMBicluster,
    experiments.sieve_rate.SieveRate.experiment_name: experiments.sieve_rate.SieveRate,
    experiments.lemma_suite.LemmaSuite.experiment_name: experiments.lemma_suite.LemmaSuite,
    experiments.bridge_suite.BridgeSuite.experiment_name: experiments.bridge_suite.BridgeSuite,
    experiments.testing_errors.ChiSquareErrors.experiment_name: experiments.testing_errors.ChiSquareErrors,
}


def get_experiment(name: str) -> Experiment:
    """
    Raises:
        UsageError: If no experiment is registered under ``name``.
    """
    experiment = name_to_experiment.get(name)
    if experiment is None:
        raise UsageError(f"unknown experiment {name!r}; choose one of {', '.join(name_to_experiment)}.")
    return experiment


def run_replicate(experiment: Experiment, params: Dict[str, Any], seed: int, replicate: int) -> ReplicateRecord:
    """
    Runs one replicate on the stream derived from ``(seed, replicate)``.

    Library and arithmetic failures are recorded on the returned record instead of propagating.
    """
    start = time.perf_counter()
    try:
        rows = experiment.run_replicate(params, derive_rng(seed, replicate), replicate)
    except (EBayesError, ArithmeticError) as exc:
        logger.warning("replicate %d of %s failed: %s", replicate, experiment.experiment_name, exc)
        return ReplicateRecord(replicate, [], time.perf_counter() - start, error=f"{type(exc).__name__}: {exc}")
    return ReplicateRecord(replicate, rows, time.perf_counter() - start)


def run(cfg: ExperimentConfig) -> ExperimentReport:
    """
    Runs every replicate of an experiment and summarizes the successful ones.

    Replicate r draws from a stream derived from (seed, r) only, and records are sorted by r, so the report does not
    depend on the number of workers.

    Args:
        cfg: The resolved configuration.

    Returns:
        The ExperimentReport.

    Raises:
        UsageError: If the experiment is unknown or the parameters do not belong to it.
    """
    experiment = get_experiment(cfg.experiment)
    params = experiment.resolve_params(cfg.params)
    logger.info("running %s: %d replicates, seed %d, %d workers", cfg.experiment, cfg.replicates, cfg.seed, cfg.workers)

    records: List[ReplicateRecord] = Parallel(n_jobs=cfg.workers)(
        delayed(run_replicate)(experiment, params, cfg.seed, r) for r in range(cfg.replicates)
    )
    records.sort(key=lambda record: record.replicate)

    rows = [{**row, "_replicate": record.replicate} for record in records if record.error is None for row in record.rows]
    result = ExperimentReport(
        config=ExperimentConfig(cfg.experiment, cfg.seed, cfg.replicates, params, cfg.workers, cfg.out_dir),
        columns=list(experiment.columns),
        records=records,
        summary=experiment.summarize(rows, params),
        plot_series=experiment.plot_series(rows, params),
        version=__version__,
    )
    if result.failures:
        logger.warning("%s: %d of %d replicates failed", cfg.experiment, len(result.failures), cfg.replicates)
    return result
