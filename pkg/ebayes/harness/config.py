"""
Flat ``key = value`` experiment configuration files.
"""

import re
from pathlib import Path
from typing import Any, Dict, List, Union

from ebayes.errors import UsageError
from ebayes.harness.models import ExperimentConfig

KEY_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
RESERVED = ("experiment", "seed", "replicates", "workers", "out_dir")


def _number(text: str) -> Union[int, float]:
    try:
        return int(text)
    except ValueError:
        return float(text)


def coerce(raw: str) -> Any:
    """
    Coerces a value: int, then float, then a comma-separated numeric list, then a string.

    Quoted values are always strings.
    """
    text = raw.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    try:
        return _number(text)
    except ValueError:
        pass
    if "," in text:
        try:
            return [_number(part.strip()) for part in text.split(",")]
        except ValueError:
            pass
    return text


def _strip_comment(line: str) -> str:
    quote = None
    for i, char in enumerate(line):
        if quote is None and char in "\"'":
            quote = char
        elif char == quote:
            quote = None
        elif char == "#" and quote is None and (i == 0 or line[i - 1].isspace()):
            return line[:i]
    return line


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, Any]:
    """
    Parses the text of a configuration file into a dict of coerced values.

    Raises:
        UsageError: On a malformed line, an invalid key or a duplicated key.
    """
    values: Dict[str, Any] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(line).strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise UsageError(f"{source}:{number}: expected 'key = value', got {line.strip()!r}.")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not KEY_PATTERN.fullmatch(key):
            raise UsageError(f"{source}:{number}: invalid key {key!r}.")
        if key in values:
            raise UsageError(f"{source}:{number}: duplicated key {key!r}.")
        values[key] = coerce(value)
    return values


def _integer(values: Dict[str, Any], key: str, default: int) -> int:
    value = values.pop(key, default)
    if not isinstance(value, int):
        raise UsageError(f"{key} must be an integer, got {value!r}.")
    return value


def build_config(values: Dict[str, Any], **overrides: Any) -> ExperimentConfig:
    """
    Splits parsed values into the reserved fields and the model parameters; non-None ``overrides`` win.

    Raises:
        UsageError: If the experiment is missing or a reserved field has the wrong type.
    """
    values = dict(values)
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    experiment = values.pop("experiment", None)
    if not isinstance(experiment, str) or not experiment:
        raise UsageError("the configuration must name an experiment.")
    return ExperimentConfig(
        experiment=experiment,
        seed=_integer(values, "seed", 0),
        replicates=_integer(values, "replicates", 1),
        workers=_integer(values, "workers", 1),
        out_dir=str(values.pop("out_dir", "results")),
        params=values,
    )


def load_config(path: Union[str, Path], **overrides: Any) -> ExperimentConfig:
    """
    Reads a configuration file.

    Raises:
        FileNotFoundError: If the file does not exist.
        UsageError: If the file is malformed.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Missing config file: {path}")
    return build_config(parse_config_text(path.read_text(encoding="utf-8"), str(path)), **overrides)


def as_list(value: Any) -> List[Any]:
    """
    A scalar parameter as a one-element list, a list as itself.
    """
    return list(value) if isinstance(value, (list, tuple)) else [value]
