"""Experiment configuration: parameter schemas, config files and validation."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from ..errors import ThickpointsError

FORMATS = ("csv", "json", "svg")
MASK64 = (1 << 64) - 1


class ConfigError(ThickpointsError, ValueError):
    """Invalid configuration; reported before any work starts."""

    code = "invalid-config"
    exit_status = 2


class UnknownExperimentError(ConfigError):
    code = "unknown-experiment"


class InvalidParameterError(ConfigError):
    code = "invalid-parameter"


class OutputError(ThickpointsError, OSError):
    """The output directory or a report file cannot be written."""

    code = "output-unwritable"
    exit_status = 4


# ---------------------------------------------------------------------------
# parameter schema


@dataclass(frozen=True)
class Param:
    """One experiment parameter.

    ``kind`` is ``int``, ``float``, ``str`` or ``floats`` (a comma list).  A
    ``sweep`` parameter is a ``floats`` list whose entries become the leading
    CSV columns.
    """

    kind: str
    default: Any
    doc: str = ""
    sweep: bool = False


def _number(text: str) -> float:
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        # fractions such as 1/64 are convenient for grid pitches
        return float(Fraction(text))


def coerce(name: str, spec: Param, value: Any) -> Any:
    try:
        if spec.kind == "int":
            if isinstance(value, str):
                value = value.strip()
                v = int(value, 0) if not any(c in value for c in ".eE") else _number(value)
            else:
                v = value
            if float(v) != int(v):
                raise ValueError("not an integer")
            return int(v)
        if spec.kind == "float":
            return _number(value) if isinstance(value, str) else float(value)
        if spec.kind == "floats":
            items = value.split(",") if isinstance(value, str) else list(value if hasattr(value, "__iter__") else [value])
            out = tuple(_number(s) if isinstance(s, str) else float(s) for s in items if str(s).strip())
            if not out:
                raise ValueError("empty list")
            return out
        if spec.kind == "str":
            return str(value).strip()
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidParameterError(f"parameter {name!r}: cannot read {value!r} as {spec.kind} ({exc})") from None
    raise InvalidParameterError(f"parameter {name!r}: unknown kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# config


@dataclass
class ExperimentConfig:
    experiment: str
    master_seed: int = 0
    replicas: int = 1
    threads: int | str = 1
    parameters: dict = field(default_factory=dict)
    output: str = "."
    formats: tuple = ("json",)

    def validated(self) -> "ExperimentConfig":
        """A copy with the experiment name, counts and parameters checked and defaults filled."""
        from .experiments import EXPERIMENTS

        if self.experiment not in EXPERIMENTS:
            raise UnknownExperimentError(
                f"unknown experiment {self.experiment!r}; registered: {', '.join(sorted(EXPERIMENTS))}"
            )
        exp = EXPERIMENTS[self.experiment]
        try:
            seed = int(self.master_seed)
        except (TypeError, ValueError):
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.master_seed!r}") from None
        if not 0 <= seed <= MASK64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
        try:
            replicas = int(self.replicas)
        except (TypeError, ValueError):
            raise ConfigError(f"replicas must be an integer, got {self.replicas!r}") from None
        if replicas < 1:
            raise ConfigError("replicas must be >= 1")
        threads = self.threads
        if threads != "auto":
            try:
                threads = int(threads)
            except (TypeError, ValueError):
                raise ConfigError(f"threads must be a positive integer or 'auto', got {self.threads!r}") from None
            if threads < 1:
                raise ConfigError("threads must be >= 1")
        formats = tuple(dict.fromkeys(f.strip().lower() for f in self.formats if f.strip()))
        bad = [f for f in formats if f not in FORMATS]
        if bad or not formats:
            raise ConfigError(f"formats must be a non-empty subset of {FORMATS}, got {self.formats!r}")
        params = exp.validate(self.parameters)
        return ExperimentConfig(self.experiment, seed, replicas, threads, params, str(self.output), formats)

    def echo(self) -> dict:
        """Deterministic part of the config for the report (threads live under timing)."""
        return {
            "experiment": self.experiment,
            "master_seed": self.master_seed,
            "replicas": self.replicas,
            "parameters": {k: list(v) if isinstance(v, tuple) else v for k, v in self.parameters.items()},
            "formats": list(self.formats),
        }


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines with dotted keys; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value
    return out


_TOP = {
    "experiment.name": "experiment",
    "experiment.seed": "master_seed",
    "experiment.master_seed": "master_seed",
    "experiment.replicas": "replicas",
    "experiment.threads": "threads",
    "output.dir": "output",
    "output.formats": "formats",
}


def config_from_mapping(entries: dict[str, str]) -> dict:
    """Translate dotted keys into :class:`ExperimentConfig` keyword arguments."""
    kw: dict[str, Any] = {"parameters": {}}
    for key, value in entries.items():
        if key in _TOP:
            kw[_TOP[key]] = value
        elif key.startswith(("param.", "sweep.")):
            kw["parameters"][key.split(".", 1)[1]] = value
        else:
            raise ConfigError(f"unknown config key {key!r}")
    if "formats" in kw:
        kw["formats"] = tuple(kw["formats"].split(","))
    return kw


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {os.fspath(path)!r}: {exc.strerror or exc}") from None
    return config_from_mapping(parse_config_text(text))
