# This library is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This library is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this library; if not, see <http://www.gnu.org/licenses/>.

"""
preoccupied.bioblend.config
Run configuration files.

A configuration is a YAML mapping of keys to values, and a key set
twice is an error. Input paths that are relative are read from the
configuration file's directory; the output directory is relative to
the working directory.

Environment overrides, applied after the file:

``BIOBLEND_BACKEND``
  solver backend name

``BIOBLEND_SOLVER_PATH``
  executable of the ``lpfile`` backend

``BIOBLEND_POOL_SIZE``
  worker pool size

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import yaml
from pydantic import (
    BaseModel, ConfigDict, Field, ValidationError, field_validator,
    model_validator)

from .casedata import CasePaths
from .errors import ConfigError
from .model import BaleGeometry, ReliabilitySpec
from .saa import PenaltyOptions
from .solver import BackendConfig


__all__ = (
    "ENV_BACKEND",
    "ENV_POOL_SIZE",
    "ENV_SOLVER_PATH",
    "RULES",
    "RunConfig",
    "load_config",
    "parse_config_text",
    "profile_path",
)


ENV_BACKEND = "BIOBLEND_BACKEND"
ENV_SOLVER_PATH = "BIOBLEND_SOLVER_PATH"
ENV_POOL_SIZE = "BIOBLEND_POOL_SIZE"

RULES: Tuple[str, ...] = ("rule1", "rule2", "rule3", "rule4", "random")

_PATH_KEYS = ("network", "equipment", "inventory", "distributions")

# scalars YAML may read as numbers but the configuration keeps as text
_TEXT_KEYS = ("problem", "sequence", "moisture", "backend", "solver_path")


class RunConfig(BaseModel):
    """
    Every parameter of one experiment. ``sequence`` is a sequence file
    or the name of an ordering rule; ``moisture`` overrides the moisture
    pattern of a sequence file or of ``random``. Replications and the
    upper bound solve at risk ``gamma_hat``, the lower bound at
    ``lower_gamma_hat``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    problem: str = "run"
    network: Path
    equipment: Path
    inventory: Path
    distributions: Tuple[Path, ...] = Field(min_length=1)
    sequence: str
    moisture: Optional[str] = None

    variant: str = Field("chance_saa", pattern=r"^(deterministic|chance_saa|all_samples)$")
    horizon: int = Field(gt=0)
    period_minutes: float = Field(1.0, gt=0)
    window_minutes: float = Field(0.0, ge=0)
    threshold: float = Field(0.591, gt=0, lt=1)
    gamma: float = Field(0.10, gt=0, lt=1)
    gamma_hat: float = Field(0.05, ge=0, lt=1)
    lower_gamma_hat: float = Field(0.15, gt=0, lt=1)
    lower_sample_size: Optional[int] = Field(None, ge=1)
    delta: float = Field(0.01, gt=0, lt=1)
    sample_size: int = Field(400, ge=1)
    posterior_size: int = Field(0, ge=0)
    replications: int = Field(10, ge=1)
    step: int = Field(50, ge=1)
    max_rounds: int = Field(10, ge=1)
    bounds: str = Field("none", pattern=r"^(none|lower|upper|both)$")

    min_utilization: float = Field(0.90, ge=0, lt=1)
    avg_utilization: float = Field(0.95, gt=0, le=1)
    feed_rate_lower: float = Field(0.0, ge=0)
    feed_rate_upper: Optional[float] = Field(None, gt=0)

    bale_width: float = Field(1.2, gt=0)
    bale_height: float = Field(1.2, gt=0)
    bale_length: float = Field(2.4, gt=0)
    big_m: Optional[float] = Field(None, gt=0)
    verbatim_big_m: bool = False

    alpha_lower: float = Field(1e-3, gt=0)
    alpha_upper: float = Field(1e3, gt=0)
    epsilon: float = Field(1e-4, ge=0)
    phi: float = Field(1e-4, gt=0)

    seed: int = Field(0, ge=0)
    pool_size: int = Field(1, ge=1)
    backend: str = "highs"
    solver_path: Optional[str] = None
    time_limit: float = Field(600.0, gt=0)
    mip_gap: float = Field(1e-4, ge=0)
    threads: int = Field(1, ge=1)
    verify: bool = False
    output: Path = Path("bioblend-out")


    @field_validator("distributions", mode="before")
    @classmethod
    def _split_paths(cls, value: Any) -> Any:
        if isinstance(value, str):
            return tuple(value.split())
        return value


    @field_validator("backend")
    @classmethod
    def _known_backend(cls, value: str) -> str:
        if value not in BackendConfig.kinds():
            raise ValueError(
                f"unknown backend {value!r}, expected one of"
                f" {', '.join(BackendConfig.kinds())}")
        return value


    @model_validator(mode="after")
    def _files_exist(self) -> "RunConfig":
        for key in _PATH_KEYS:
            value = getattr(self, key)
            for path in (value if isinstance(value, tuple) else (value,)):
                if not path.is_file():
                    raise ValueError(f"{key} file {path} does not exist")
        if self.sequence not in RULES and not Path(self.sequence).is_file():
            raise ValueError(
                f"sequence {self.sequence!r} is neither a rule nor an existing file")
        if self.bounds in ("lower", "both") and not self.lower_gamma_hat > self.gamma:
            raise ValueError("a lower bound needs lower_gamma_hat above gamma")
        if self.bounds in ("upper", "both") and not self.gamma_hat < self.gamma:
            raise ValueError("an upper bound needs gamma_hat below gamma")
        return self


    def case_paths(self) -> CasePaths:
        return CasePaths(
            network=self.network, equipment=self.equipment,
            inventory=self.inventory, distributions=self.distributions)


    def geometry(self) -> BaleGeometry:
        return BaleGeometry(
            width=self.bale_width, height=self.bale_height,
            length=self.bale_length, period_minutes=self.period_minutes)


    def reliability(self) -> ReliabilitySpec:
        return ReliabilitySpec(
            min_utilization=self.min_utilization,
            avg_utilization=self.avg_utilization,
            feed_rate_lower=self.feed_rate_lower,
            feed_rate_upper=self.feed_rate_upper)


    def penalty_options(self) -> PenaltyOptions:
        return PenaltyOptions(
            alpha_lower=self.alpha_lower, alpha_upper=self.alpha_upper,
            epsilon=self.epsilon, phi=self.phi)


    def backend_config(self) -> BackendConfig:
        if self.backend == "lpfile" and self.solver_path:
            return BackendConfig(name="lpfile", executable=self.solver_path)
        return BackendConfig(name=self.backend)


    def sequence_path(self) -> Optional[Path]:
        return None if self.sequence in RULES else Path(self.sequence)


class _ConfigLoader(yaml.SafeLoader):
    """
    Safe YAML loading that refuses a key set twice in one mapping.
    """


    def construct_mapping(self, node, deep=False):
        seen = set()
        for key_node, _value in node.value:
            key = self.construct_object(key_node, deep=deep)
            if key in seen:
                raise ConfigError(
                    f"{self.name}, line {key_node.start_mark.line + 1}:"
                    f" {key} is set twice")
            seen.add(key)
        return super().construct_mapping(node, deep=deep)


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, Any]:
    """
    Read a YAML mapping of configuration keys. An empty document is an
    empty mapping.
    """

    loader = _ConfigLoader(text)
    loader.name = source
    try:
        found = loader.get_single_data()
    except yaml.MarkedYAMLError as err:
        mark = err.problem_mark or err.context_mark
        where = f", line {mark.line + 1}" if mark else ""
        raise ConfigError(f"{source}{where}: {err.problem or err.context}") from None
    except yaml.YAMLError as err:
        raise ConfigError(f"{source}: {err}") from None
    finally:
        loader.dispose()

    if found is None:
        return {}
    if not isinstance(found, dict):
        raise ConfigError(f"{source}: expected a mapping of keys to values")
    return {str(k): v for k, v in found.items()}


def _resolve(values: Dict[str, Any], base: Path) -> None:
    def absolute(text: Any) -> str:
        path = Path(str(text)).expanduser()
        return str(path if path.is_absolute() else base / path)

    for key in ("network", "equipment", "inventory"):
        if values.get(key):
            values[key] = absolute(values[key])
    dists = values.get("distributions")
    if isinstance(dists, str):
        dists = dists.split()
    if dists:
        values["distributions"] = [absolute(p) for p in dists]
    sequence = values.get("sequence")
    if sequence and sequence not in RULES:
        values["sequence"] = absolute(sequence)


def _environment(values: Dict[str, Any], environ: Mapping[str, str]) -> None:
    if environ.get(ENV_BACKEND):
        values["backend"] = environ[ENV_BACKEND]
    if environ.get(ENV_SOLVER_PATH):
        values["solver_path"] = environ[ENV_SOLVER_PATH]
    if environ.get(ENV_POOL_SIZE):
        values["pool_size"] = environ[ENV_POOL_SIZE]


def load_config(
        path: Path,
        overrides: Optional[Mapping[str, str]] = None,
        environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Load a configuration file. ``overrides`` replace keys of the file,
    an empty override unsets its key, and the environment is applied on
    top.
    """

    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"cannot read configuration {path}: {err.strerror}") from None

    values = parse_config_text(text, str(path))
    if overrides:
        values.update(overrides)
    values = {
        k: (str(v) if k in _TEXT_KEYS else v)
        for k, v in values.items() if v is not None and v != ""}
    _resolve(values, path.parent)
    _environment(values, os.environ if environ is None else environ)

    try:
        return RunConfig.model_validate(values)
    except ValidationError as err:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in e['loc']) or 'config'}: {e['msg']}"
            for e in err.errors())
        raise ConfigError(f"{path}: {problems}") from None


def profile_path(name: str) -> Path:
    """
    Location of a configuration profile shipped with the package, such
    as ``desk`` or ``full``.
    """

    found = Path(__file__).parent / "data" / f"{name}.yaml"
    if not found.is_file():
        raise ConfigError(f"no shipped profile named {name!r}")
    return found


# The end.
