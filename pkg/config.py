"""
Run configuration: named presets, flat key=value config files and the
resolved snapshot written next to every run.

Grammar: one `key=value` per line, `#` starts a comment, blank lines are
ignored, values may be quoted. Keys are TrainConfig / MceConfig field names,
plus SyntheticSpec field names prefixed with `data_`.
"""

import enum
import os
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Mapping, Optional

from dotenv import dotenv_values

from datagen import SyntheticSpec
from divergence import LogBackend, MceConfig
from errors import ConfigError, SpecError
from trainer import TrainConfig

DATA_PREFIX = "data_"
SNAPSHOT_NAME = "config.env"

PRESETS: Dict[str, Dict[str, str]] = {
    "default": {},
    "paper-literal": {"mu_u": "3e-3", "gamma_u": "1"},
    "pseudo-label": {"gamma_u": "0"},
    "supervised-mce": {"mode": "supervised", "gamma_s": "0.1"},
    "ce-baseline": {"mode": "supervised", "gamma_s": "0"},
    "ce-label-smoothing": {"mode": "supervised", "gamma_s": "0", "label_smoothing": "0.1"},
    "cpl": {"cpl_enabled": "true"},
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}

MCE_KEYS = ("log_backend", "taylor_order", "elementwise_eps", "ridge_lambda")
TRAIN_KEYS = tuple(f.name for f in fields(TrainConfig) if f.name != "mce")
DATA_KEYS = tuple(DATA_PREFIX + f.name for f in fields(SyntheticSpec))


@dataclass(frozen=True)
class RunConfig:
    train: TrainConfig = field(default_factory=TrainConfig)
    data: SyntheticSpec = field(default_factory=SyntheticSpec)

    @property
    def seed(self) -> int:
        return self.train.seed

    def with_seed(self, seed: int) -> "RunConfig":
        """Same run on another seed: both the training streams and the dataset draw change."""
        return RunConfig(replace(self.train, seed=seed), replace(self.data, seed=seed))


def _coerce(key: str, raw: str, current):
    raw = raw.strip()
    try:
        if isinstance(current, bool):
            lowered = raw.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(raw)
        if isinstance(current, enum.Enum):
            return type(current)(raw.lower())
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
        if isinstance(current, tuple):
            return tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None
    return raw


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def build(values: Mapping[str, str]) -> RunConfig:
    """RunConfig from flat string values laid over the defaults."""
    unknown = sorted(set(values) - set(TRAIN_KEYS) - set(MCE_KEYS) - set(DATA_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    mce = MceConfig()
    if "log_backend" in values:
        mce = MceConfig.parse(values["log_backend"])
    mce_keys = MCE_KEYS[1:]
    if mce.log_backend is LogBackend.TAYLOR and "log_backend" in values:
        # a taylorK spelling carries its own order
        mce_keys = tuple(key for key in mce_keys if key != "taylor_order")
    mce_changes = {key: _coerce(key, values[key], getattr(mce, key)) for key in mce_keys if key in values}
    mce = replace(mce, **mce_changes)

    defaults = TrainConfig()
    train_changes = {key: _coerce(key, values[key], getattr(defaults, key)) for key in TRAIN_KEYS if key in values}
    train = replace(defaults, mce=mce, **train_changes)

    data_defaults = SyntheticSpec()
    data_changes = {}
    for key in DATA_KEYS:
        if key in values:
            name = key[len(DATA_PREFIX):]
            data_changes[name] = _coerce(key, values[key], getattr(data_defaults, name))
    try:
        data = replace(data_defaults, **data_changes)
    except SpecError as e:
        raise ConfigError(f"dataset: {e}") from e
    return RunConfig(train, data)


def read_config_file(path: str) -> Dict[str, str]:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    values = dotenv_values(path, interpolate=False)
    missing = [key for key, value in values.items() if value is None]
    if missing:
        raise ConfigError(f"{path}: keys without a value: {', '.join(missing)}")
    return dict(values)


def _lay(values: Dict[str, str], layer: Mapping[str, str]) -> None:
    """Merge one layer over the lower ones.

    A Taylor order set through log_backend in one layer and through
    taylor_order in another resolves to whichever layer is higher.
    """
    if "log_backend" in layer and "taylor_order" not in layer:
        values.pop("taylor_order", None)
    values.update(layer)
    if "taylor_order" in layer and "log_backend" not in layer:
        if values.get("log_backend", "").strip().lower().startswith(LogBackend.TAYLOR.value):
            values["log_backend"] = LogBackend.TAYLOR.value + layer["taylor_order"].strip()


def resolve(preset: str = "default", path: Optional[str] = None,
            overrides: Optional[Mapping[str, str]] = None) -> RunConfig:
    """flags > file > preset."""
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r} (choose from {', '.join(PRESETS)})")
    values: Dict[str, str] = {}
    _lay(values, PRESETS[preset])
    if path:
        _lay(values, read_config_file(path))
    if overrides:
        _lay(values, {k: str(v) for k, v in overrides.items() if v is not None})
    return build(values)


def to_flat(run: RunConfig) -> Dict[str, str]:
    flat = {key: _format(getattr(run.train, key)) for key in TRAIN_KEYS}
    flat["log_backend"] = run.train.mce.spelling
    flat["taylor_order"] = _format(run.train.mce.taylor_order)
    flat["elementwise_eps"] = _format(run.train.mce.elementwise_eps)
    flat["ridge_lambda"] = _format(run.train.mce.ridge_lambda)
    for key in DATA_KEYS:
        flat[key] = _format(getattr(run.data, key[len(DATA_PREFIX):]))
    return flat


def write_snapshot(run: RunConfig, path: str, preset: str = "default") -> None:
    with open(path, "w") as f:
        f.write(f"# resolved run configuration (preset: {preset})\n")
        for key, value in to_flat(run).items():
            f.write(f"{key}={value}\n")
