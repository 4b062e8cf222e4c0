"""Run configuration: a TOML file with [grid], [agent], [memory], [analysis]."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridConfig:
    rows: int = 3
    cols: int = 3
    arrival_rate: float = 0.3
    discharge: int = 2
    bins: tuple = (2, 5)
    phases: tuple = ("N", "E", "S", "W")
    steps: int = 5000
    seed: int = 0


@dataclass(frozen=True)
class AgentConfig:
    kind: str = "dual"
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon: float = 0.1
    symmetry: str = "dihedral"


@dataclass(frozen=True)
class MemoryConfig:
    kappa: str = "1/2"
    t_stage: int = 10


@dataclass(frozen=True)
class AnalysisConfig:
    svg: bool = False
    check_m_bound: bool = True


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    memory: MemoryConfig = field(default_factory=MemoryConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)

    @property
    def kappa(self) -> Fraction:
        return Fraction(self.memory.kappa)


_SECTION_TYPES = {
    "grid": GridConfig,
    "agent": AgentConfig,
    "memory": MemoryConfig,
    "analysis": AnalysisConfig,
}


def _coerce(section: str, key: str, value, default):
    where = f"[{section}].{key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be a boolean")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number")
        return float(value)
    if isinstance(default, tuple):
        if not isinstance(value, list):
            raise ConfigError(f"{where} must be an array")
        kind = type(default[0])
        if not all(isinstance(v, kind) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"{where} must hold {kind.__name__} values")
        return tuple(value)
    if key == "kappa":
        try:
            k = Fraction(str(value))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{where} must be a rational like '1/2'") from None
        return str(k)
    if not isinstance(value, str):
        raise ConfigError(f"{where} must be a string")
    return value


def from_dict(data: dict) -> RunConfig:
    sections = {}
    for name, body in data.items():
        if name not in _SECTION_TYPES:
            raise ConfigError(f"unknown section [{name}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{name}] must be a table")
        cls = _SECTION_TYPES[name]
        defaults = cls()
        known = {f.name for f in fields(cls)}
        values = {}
        for key, value in body.items():
            if key not in known:
                raise ConfigError(f"unknown key [{name}].{key}")
            values[key] = _coerce(name, key, value, getattr(defaults, key))
        sections[name] = replace(defaults, **values)
    cfg = RunConfig(**sections)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.agent.kind not in ("dual", "sarsa"):
        raise ConfigError(f"[agent].kind must be 'dual' or 'sarsa', got {cfg.agent.kind!r}")
    if cfg.agent.symmetry not in ("dihedral", "identity"):
        raise ConfigError(f"[agent].symmetry must be 'dihedral' or 'identity', got {cfg.agent.symmetry!r}")
    if cfg.grid.rows < 1 or cfg.grid.cols < 1:
        raise ConfigError(f"grid dimensions must be positive, got {cfg.grid.rows}x{cfg.grid.cols}")
    if cfg.grid.steps < 0:
        raise ConfigError("[grid].steps must be >= 0")
    from .equivalence import SymmetryGroup
    from .gridsim import ActionSpace, GridNetwork
    from .memory import HyperParams

    g = cfg.grid
    try:
        actions = ActionSpace.from_names(g.phases)
        GridNetwork(g.rows, g.cols, actions, g.arrival_rate, g.discharge, g.bins)
        SymmetryGroup.by_name(cfg.agent.symmetry, actions.served)
        HyperParams(
            actions.count, cfg.kappa, cfg.memory.t_stage, cfg.agent.alpha, cfg.agent.gamma, cfg.agent.epsilon
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def loads(text: str) -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from None
    return from_dict(data)


def load(path) -> RunConfig:
    return loads(Path(path).read_text(encoding="utf-8"))


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    return "[" + ", ".join(_toml_value(x) for x in v) + "]"


def dumps(cfg: RunConfig) -> str:
    """Canonical TOML text; ``dumps(loads(dumps(c))) == dumps(c)``."""
    chunks = []
    for name in _SECTION_TYPES:
        section = getattr(cfg, name)
        lines = [f"[{name}]"]
        lines += [f"{f.name} = {_toml_value(getattr(section, f.name))}" for f in fields(section)]
        chunks.append("\n".join(lines) + "\n")
    return "\n".join(chunks)
