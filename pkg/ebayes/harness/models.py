import abc
from abc import abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ebayes.errors import UsageError

MAX_SEED = 2**64


@dataclass(slots=True)
class ExperimentConfig:
    """
    A fully resolved experiment configuration.

    Attributes:
        experiment: Name of the experiment.
        seed: Master seed, a 64-bit unsigned integer.
        replicates: Number of replicates.
        params: Model parameters as named keys.
        workers: joblib workers over replicates.
        out_dir: Directory receiving the output files.
    """

    experiment: str
    seed: int = 0
    replicates: int = 1
    params: Dict[str, Any] = field(default_factory=dict)
    workers: int = 1
    out_dir: str = "results"

    def __post_init__(self):
        if not (isinstance(self.seed, int) and 0 <= self.seed < MAX_SEED):
            raise UsageError(f"seed must be an integer in [0, 2^64), got {self.seed!r}.")
        if not (isinstance(self.replicates, int) and self.replicates >= 1):
            raise UsageError(f"replicates must be a positive integer, got {self.replicates!r}.")
        if not (isinstance(self.workers, int) and self.workers >= 1):
            raise UsageError(f"workers must be a positive integer, got {self.workers!r}.")


@dataclass(slots=True)
class ReplicateRecord:
    """
    Outcome of one replicate.

    Attributes:
        replicate: Replicate index r.
        rows: CSV rows produced by the replicate.
        wall_time: Seconds spent on it.
        error: "<ExceptionType>: message" if the replicate failed.
    """

    replicate: int
    rows: List[Dict[str, Any]]
    wall_time: float
    error: Optional[str] = None


@dataclass(slots=True)
class ExperimentReport:
    """
    Attributes:
        config: The configuration that produced the report.
        columns: CSV columns after the replicate index.
        records: One ReplicateRecord per replicate, sorted by index.
        summary: Experiment-specific summary fields.
        plot_series: (series, x, y) points for rate curves.
        version: Library version.
    """

    config: ExperimentConfig
    columns: List[str]
    records: List[ReplicateRecord]
    summary: Dict[str, Any]
    plot_series: List[Tuple[str, float, float]]
    version: str

    @property
    def failures(self) -> List[int]:
        return [r.replicate for r in self.records if r.error is not None]

    @property
    def passed(self) -> bool:
        return not self.failures and self.summary.get("all_passed", True) is not False


class Experiment(abc.ABC):
    """
    Abstract base class for replicated experiments.

    Attributes:
        experiment_name: The name used on the command line and in the config file.
        columns: CSV columns written for every row.
        defaults: Every accepted parameter with its default value.
        description: One-line summary for the help text.
    """

    experiment_name: str
    columns: List[str]
    defaults: Dict[str, Any]
    description: str = ""

    def resolve_params(self, params: Dict[str, Any]) -> Dict[str, Any]:
        """
        Merges ``params`` over the defaults.

        Raises:
            UsageError: If a key is not a parameter of the experiment.
        """
        unknown = sorted(set(params) - set(self.defaults))
        if unknown:
            raise UsageError(f"{self.experiment_name} does not accept {', '.join(unknown)}; known keys: {', '.join(sorted(self.defaults))}.")
        resolved = dict(self.defaults)
        resolved.update(params)
        return resolved

    @abstractmethod
    def run_replicate(self, params: Dict[str, Any], rng: np.random.Generator, replicate: int) -> List[Dict[str, Any]]:
        """
        Runs replicate ``replicate`` with its own random stream.

        Returns:
            One or more rows keyed by :attr:`columns`.
        """

    @abstractmethod
    def summarize(self, rows: List[Dict[str, Any]], params: Dict[str, Any]) -> Dict[str, Any]:
        """
        Summary fields computed from the rows of the successful replicates.

        Every row carries its replicate index under ``_replicate`` in addition to :attr:`columns`.
        """

    def plot_series(self, rows: List[Dict[str, Any]], params: Dict[str, Any]) -> List[Tuple[str, float, float]]:
        return []


@dataclass(slots=True)
class CheckResult:
    """
    One numeric check of a lemma.

    Attributes:
        check: Name of the check.
        case: Parameter set, e.g. "p=8,s*=2".
        value: The computed quantity.
        bound: The bound it is compared with.
        passed: Whether the comparison holds.
    """

    check: str
    case: str
    value: float
    bound: float
    passed: bool


class Check(abc.ABC):
    """
    Abstract base class for the lemma checks of the lemma suite.

    Attributes:
        check_name: The name written to the CSV.
    """

    check_name: str

    @abstractmethod
    def evaluate(self, params: Dict[str, Any], rng: np.random.Generator) -> List[CheckResult]:
        """
        Evaluates the check on its built-in parameter sets.

        Args:
            params: The lemma-suite parameters (Monte Carlo sizes, constants).
            rng: Random stream of the check.
        """
