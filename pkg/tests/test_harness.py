import json
import logging
import math
from pathlib import Path

import pytest

import ebayes
from ebayes import harness
from ebayes.errors import NumericError, UsageError
from ebayes.harness import cli, config, report
from ebayes.harness.models import Experiment, ExperimentConfig

DATA_DIR = Path(__file__).parent / ".data"


class _Explodes(Experiment):
    def __init__(self):
        self.experiment_name = "explodes"
        self.description = "fails on replicate 1"
        self.columns = ["value"]
        self.defaults = {"value": 1.0}

    def run_replicate(self, params, rng, replicate):
        if replicate == 1:
            raise NumericError("boom")
        return [{"value": params["value"]}]

    def summarize(self, rows, params):
        return {"n_rows": len(rows)}


@pytest.fixture()
def explodes(monkeypatch):
    experiment = _Explodes()
    monkeypatch.setitem(harness.name_to_experiment, experiment.experiment_name, experiment)
    return experiment


def test_coerce():
    assert config.coerce(" 3 ") == 3
    assert config.coerce("2.5") == 2.5
    assert config.coerce("1e-3") == 0.001
    assert config.coerce("500, 1000,2000") == [500, 1000, 2000]
    assert config.coerce("search") == "search"
    assert config.coerce("'12'") == "12"


def test_parse_config_text():
    values = config.parse_config_text("# header\nexperiment = lemma-suite\n\nn_mc = 200  # small\nmass_C2 = 4.5\nD = 4\n")
    assert values == {"experiment": "lemma-suite", "n_mc": 200, "mass_C2": 4.5, "D": 4}

    for text in ("experiment lemma-suite", "1bad = 3", "bad-key = 3", "seed = 1\nseed = 2", "D = 1\nD = 2"):
        with pytest.raises(UsageError):
            config.parse_config_text(text)


def test_load_config(load_config):
    cfg = load_config("seq_small.cfg")
    assert cfg.experiment == "seq-contraction"
    assert (cfg.seed, cfg.replicates, cfg.workers, cfg.out_dir) == (7, 3, 1, "results")
    assert cfg.params == {"p": 50, "s_star": 2, "beta_exponent": 2.0}

    cfg = load_config("quoted.cfg", seed=5, workers=None)
    assert cfg.seed == 5
    assert cfg.params == {"n_instances": 5, "dims": [1, 2], "family": "sieve", "label": "a # not a comment"}

    with pytest.raises(FileNotFoundError):
        load_config("missing.cfg")


def test_build_config_rejects_bad_reserved_fields():
    with pytest.raises(UsageError):
        config.build_config({"seed": 3})
    with pytest.raises(UsageError):
        config.build_config({"experiment": "seq-contraction", "seed": "abc"})
    with pytest.raises(UsageError):
        config.build_config({"experiment": "seq-contraction"}, replicates=0)
    with pytest.raises(UsageError):
        ExperimentConfig("seq-contraction", seed=-1)


def test_params_are_checked_against_the_experiment():
    experiment = harness.get_experiment("seq-contraction")
    assert experiment.resolve_params({"p": 20})["p"] == 20
    assert experiment.resolve_params({})["s_star"] == 10
    with pytest.raises(UsageError):
        experiment.resolve_params({"lambda": 0.5})
    with pytest.raises(UsageError):
        harness.get_experiment("nope")


def test_format_value():
    assert report.format_value(True) == "true"
    assert report.format_value(None) == ""
    assert report.format_value(3) == "3"
    assert report.format_value(0.1) == "0.10000000000000001"
    assert report.format_value("a,b") == '"a,b"'


def test_quantile_summary():
    summary = report.quantile_summary([1.0, float("nan"), 3.0, 2.0], "x")
    assert summary["x_median"] == 2.0
    assert math.isnan(report.quantile_summary([], "x")["x_median"])


def test_reports_do_not_depend_on_workers(load_config):
    serial = harness.run(load_config("seq_small.cfg", workers=1))
    parallel = harness.run(load_config("seq_small.cfg", workers=2))
    assert report.csv_text(serial) == report.csv_text(parallel)
    assert serial.summary == parallel.summary
    assert [r.replicate for r in serial.records] == [0, 1, 2]


def test_failed_replicates_are_recorded(explodes):
    result = harness.run(ExperimentConfig("explodes", seed=3, replicates=3))
    assert result.failures == [1]
    assert not result.passed
    assert result.summary == {"n_rows": 2}
    assert report.csv_text(result).splitlines() == ["replicate,value,error", "0,1,", "1,,NumericError: boom", "2,1,"]


def test_write_report(tmp_path, load_config):
    result = harness.run(load_config("seq_small.cfg", replicates=1))
    paths = report.write_report(result, tmp_path)
    assert [p.name for p in paths] == ["seq-contraction.csv", "seq-contraction.summary.json", "seq-contraction.plotdata.csv"]
    header = paths[0].read_text().splitlines()[0]
    assert header == "replicate," + ",".join(result.columns) + ",error"
    summary = json.loads(paths[1].read_text())
    assert summary["version"] == ebayes.__version__
    assert summary["failures"] == []
    assert summary["params"]["p"] == 50
    assert paths[2].read_text() == "series,x,y\n"


def test_cli_runs_a_config(tmp_path):
    code = cli.main(["seq-contraction", "--config", str(DATA_DIR / "seq_small.cfg"), "--out-dir", str(tmp_path), "--replicates", "1", "--quiet"])
    assert code == cli.EXIT_OK
    assert (tmp_path / "seq-contraction.csv").exists()
    assert (tmp_path / "seq-contraction.summary.json").exists()


def test_cli_reports_failures(tmp_path, explodes):
    code = cli.main(["explodes", "--out-dir", str(tmp_path), "--replicates", "2", "--quiet"])
    assert code == cli.EXIT_FAILURES
    assert json.loads((tmp_path / "explodes.summary.json").read_text())["failures"] == [1]


@pytest.mark.parametrize(
    "argv",
    [
        ["seq-contraction", "--config", str(DATA_DIR / "wrong_experiment.cfg")],
        ["seq-contraction", "--config", str(DATA_DIR / "unknown_key.cfg")],
        ["seq-contraction", "--config", str(DATA_DIR / "missing.cfg")],
        ["seq-contraction", "--seed", "-1"],
        ["verify-all", "--config", str(DATA_DIR / "seq_small.cfg")],
    ],
)
def test_cli_usage_errors(tmp_path, argv):
    assert cli.main([*argv, "--out-dir", str(tmp_path), "--quiet"]) == cli.EXIT_USAGE


def test_cli_rejects_unknown_experiments():
    with pytest.raises(SystemExit) as excinfo:
        cli.parse_args(["nope"])
    assert excinfo.value.code == 2


@pytest.fixture()
def root_logger():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield root
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.mark.parametrize("flags, level", [([], logging.INFO), (["--quiet"], logging.WARNING), (["--verbose"], logging.DEBUG)])
def test_cli_log_levels(root_logger, flags, level):
    cli.configure_logging(cli.parse_args(["seq-contraction", *flags]))
    assert root_logger.level == level


def test_quiet_keeps_warnings(root_logger, capsys):
    cli.configure_logging(cli.parse_args(["slm-bicluster", "--quiet"]))
    logging.getLogger("ebayes.slm.selection").info("scored class (1, 1)")
    logging.getLogger("ebayes.slm.selection").warning("score of class (2, 2) is approximate")
    err = capsys.readouterr().err
    assert "score of class (2, 2) is approximate" in err
    assert "scored class (1, 1)" not in err
