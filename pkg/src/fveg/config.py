"""Run configuration: a flat YAML mapping validated into :class:`RunConfig`."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import yaml

from . import __version__
from .errors import ConfigurationError
from .flux import FLUX_MODES
from .problems import PROBLEM_NAMES, make_problem
from .systems import SUPERSONIC_POLICIES


@dataclass(frozen=True)
class RunConfig:
    problem: str = "wave-sine"
    nx: int = 64
    cfl: Optional[float] = None  # problem default when unset
    t_final: Optional[float] = None  # problem default when unset
    flux_mode: str = "eg-with-fallback"
    supersonic: str = "fallback"
    out: str = "output"
    output_every: int = 0  # write a snapshot every n steps; 0 writes only the final state
    output_format: str = "csv"
    ladder: tuple[int, ...] = (32, 64, 128)
    ref_nx: int = 256
    seed: int = 0
    samples: int = 10_000

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.problem not in PROBLEM_NAMES:
            raise ConfigurationError(f"unknown problem {self.problem!r}; valid names: {', '.join(PROBLEM_NAMES)}")
        for name in ("nx", "ref_nx", "output_every", "seed", "samples"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigurationError(f"{name} must be an integer, got {v!r}")
        if self.nx < 1 or self.ref_nx < 1:
            raise ConfigurationError("grid sizes must be positive")
        if self.output_every < 0 or self.samples < 1:
            raise ConfigurationError("output_every must be >= 0 and samples >= 1")
        if self.cfl is not None and not 0 < self.cfl < 1:
            raise ConfigurationError(f"cfl must lie in (0, 1), got {self.cfl!r}")
        if self.t_final is not None and not self.t_final >= 0:
            raise ConfigurationError(f"t_final must be non-negative, got {self.t_final!r}")
        if self.flux_mode not in FLUX_MODES:
            raise ConfigurationError(f"flux_mode must be one of {FLUX_MODES}, got {self.flux_mode!r}")
        if self.supersonic not in SUPERSONIC_POLICIES:
            raise ConfigurationError(f"supersonic must be one of {SUPERSONIC_POLICIES}, got {self.supersonic!r}")
        if self.output_format not in ("csv", "vtk"):
            raise ConfigurationError(f"output_format must be 'csv' or 'vtk', got {self.output_format!r}")
        if not self.ladder or any((not isinstance(n, int)) or n < 1 for n in self.ladder):
            raise ConfigurationError(f"ladder must be a non-empty list of positive integers, got {self.ladder!r}")

    @property
    def spec(self):
        return make_problem(self.problem)

    @property
    def effective_cfl(self) -> float:
        return self.cfl if self.cfl is not None else self.spec.cfl

    @property
    def effective_t_final(self) -> float:
        return self.t_final if self.t_final is not None else self.spec.t_final

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ladder"] = list(self.ladder)
        return d

    def provenance(self) -> str:
        """One-line description embedded in every output file."""
        return f"fveg {__version__} config {json.dumps(self.to_dict(), sort_keys=True)}"

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_KEYS = {f.name for f in fields(RunConfig)}


def from_mapping(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a key-value mapping")
    unknown = sorted(set(data) - _KEYS)
    if unknown:
        raise ConfigurationError(f"unknown configuration keys: {', '.join(unknown)}")
    data = dict(data)
    if "ladder" in data:
        if not isinstance(data["ladder"], (list, tuple)):
            raise ConfigurationError("ladder must be a list of grid sizes")
        data["ladder"] = tuple(data["ladder"])
    try:
        return RunConfig(**data)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read configuration {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"malformed configuration {path}: {exc}") from exc
    return from_mapping(data)
