"""Sectioned key-value run configuration (INI syntax).

Floats are written with 17 significant digits so a saved config reproduces a
deterministic run bit for bit.
"""

from __future__ import annotations

import configparser
import dataclasses
import re
from dataclasses import dataclass, field
from pathlib import Path

from .control import FeedbackConfig
from .integrate import IntegratorConfig
from .model import SystemParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    format: str = "csv"

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")


@dataclass(frozen=True)
class SweepConfig:
    f_min: float = 60.0
    f_max: float = 130.0
    n_points: int = 71
    classify: bool = True


@dataclass(frozen=True)
class StudyConfig:
    variable: str = "tau"
    values: tuple[float, ...] = ()
    gains: tuple[float, ...] = ()

    def __post_init__(self):
        if self.variable not in ("tau", "kd"):
            raise ValueError(f"variable must be tau or kd, got {self.variable!r}")


@dataclass(frozen=True)
class DensityConfig:
    n_periods: int = 3
    points_per_period: int = 256


@dataclass(frozen=True)
class RunConfig:
    system: SystemParams
    feedback: FeedbackConfig
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    study: StudyConfig = field(default_factory=StudyConfig)
    density: DensityConfig = field(default_factory=DensityConfig)


SECTIONS = {
    "system": SystemParams,
    "feedback": FeedbackConfig,
    "integrator": IntegratorConfig,
    "output": OutputConfig,
    "sweep": SweepConfig,
    "study": StudyConfig,
    "density": DensityConfig,
}
REQUIRED = {"system": ("kappa", "u0", "eta", "n_atoms"), "feedback": ("gain", "tau")}


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ", ".join(_fmt(float(v)) for v in value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def to_ini(cfg: RunConfig) -> str:
    lines = []
    for name in SECTIONS:
        section = getattr(cfg, name)
        lines.append(f"[{name}]")
        for f in dataclasses.fields(section):
            lines.append(f"{f.name} = {_fmt(getattr(section, f.name))}")
        lines.append("")
    return "\n".join(lines)


def save_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(to_ini(cfg), encoding="utf-8")


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for i, line in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
        elif current == section and re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
            return i
    return None


def _convert(raw: str, annotation: str, where: str):
    raw = raw.strip()
    try:
        if annotation == "bool":
            low = raw.lower()
            if low not in ("true", "false", "yes", "no", "1", "0", "on", "off"):
                raise ValueError
            return low in ("true", "yes", "1", "on")
        if annotation == "int":
            return int(raw)
        if annotation == "float":
            return float(raw)
        if annotation.startswith("tuple"):
            return tuple(float(v) for v in raw.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {annotation}") from None
    return raw


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    unknown = [s for s in parser.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigError(f"{source}: unknown section [{unknown[0]}] "
                          f"(line {_line_of_section(text, unknown[0])})")

    for section, keys in REQUIRED.items():
        for key in keys:
            if not parser.has_option(section, key):
                raise ConfigError(f"{source}: missing required field [{section}] {key}")

    built = {}
    for name, cls in SECTIONS.items():
        kwargs = {}
        if parser.has_section(name):
            known = {f.name: f for f in dataclasses.fields(cls)}
            for key, raw in parser.items(name):
                line = _line_of(text, name, key)
                where = f"{source}:{line} [{name}] {key}" if line else f"{source} [{name}] {key}"
                if key not in known:
                    raise ConfigError(f"{where}: unknown field")
                annotation = known[key].type
                if key == "mode":
                    annotation = "str"
                kwargs[key] = _convert(raw, str(annotation), where)
        try:
            built[name] = cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source} [{name}]: {exc}") from None
    return RunConfig(**built)


def _line_of_section(text: str, section: str) -> int | None:
    for i, line in enumerate(text.splitlines(), start=1):
        if line.strip() == f"[{section}]":
            return i
    return None


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))
