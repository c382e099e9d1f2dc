"""
JSON configuration for scenario runs.

Unknown keys and wrong types raise ParseError naming the field; values that
parse but break a domain invariant raise ValidationError. Missing keys take
the defaults held by the settings dataclasses.
"""
import json
import os
from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, Optional

from classes.errors import OrientationModelError, ParseError, ValidationError
from classes.mobility import MobilityMode
from classes.run_config import (
    ChannelSettings,
    GeometrySettings,
    ModelSettings,
    OrwpSettings,
    RunConfig,
    Scenario,
    TabulateSettings,
    ValidateTolerances,
)
from utils.general import config_hash

OUTPUT_DIR_ENV = "LIFI_ORIENT_OUTPUT_DIR"

_SECTIONS = {
    "channel": ChannelSettings,
    "sitting": ModelSettings,
    "walking": ModelSettings,
    "geometry": GeometrySettings,
    "orwp": OrwpSettings,
    "tabulate": TabulateSettings,
    "tolerances": ValidateTolerances,
}


def _coerce(value: Any, default: Any, field_name: str) -> Any:
    """Convert a JSON value to the type of the dataclass default."""
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ParseError(f"expected true/false, got {value!r}", field=field_name)
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"expected an integer, got {value!r}", field=field_name)
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"expected a number, got {value!r}", field=field_name)
        return float(value)
    if isinstance(default, str) or default is None:
        if value is not None and not isinstance(value, str):
            raise ParseError(f"expected a string, got {value!r}", field=field_name)
        return value
    if isinstance(default, tuple):
        if not isinstance(value, list):
            raise ParseError(f"expected a list, got {value!r}", field=field_name)
        sample = default[0] if default else 0.0
        return tuple(_coerce(v, sample, f"{field_name}[{i}]") for i, v in enumerate(value))
    return value


def _build_section(cls, data: Any, section: str):
    if not isinstance(data, dict):
        raise ParseError(f"section must be an object, got {type(data).__name__}", field=section)
    defaults = cls()
    known = {f.name for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ParseError("unknown key", field=f"{section}.{key}")
    kwargs = {
        name: _coerce(data[name], getattr(defaults, name), f"{section}.{name}")
        for name in known
        if name in data
    }
    return cls(**kwargs)


def _validate(cfg: RunConfig) -> None:
    """Build every domain object once so invariant violations surface at load time."""
    try:
        cfg.channel.to_params()
        cfg.sitting.to_model()
        walking = cfg.walking.to_model()
        cfg.geometry.links()
        cfg.orwp.base_config(walking, cfg.seed)
    except ValidationError:
        raise
    except OrientationModelError as e:
        raise ValidationError(str(e), type(e).__name__)
    for mode in cfg.orwp.modes:
        try:
            MobilityMode(mode)
        except ValueError:
            raise ValidationError(f"unknown mobility mode '{mode}'", "mode in {vertical_upward, orwp_gaussian}")
    if not cfg.orwp.room_lengths or not cfg.orwp.speeds:
        raise ValidationError("empty sweep", "orwp.room_lengths and orwp.speeds non-empty")
    if cfg.orwp.n_runs < 1:
        raise ValidationError(f"n_runs={cfg.orwp.n_runs}", "orwp.n_runs >= 1")
    if cfg.tabulate.n_tau < 2 or cfg.tabulate.n_gain < 2:
        raise ValidationError("tabulation grids need >= 2 points", "tabulate.n_tau, n_gain >= 2")
    if cfg.tolerances.n_samples < 1 or cfg.tolerances.n_geometries < 1:
        raise ValidationError("oracle sizes must be positive", "tolerances.n_samples, n_geometries >= 1")


def config_from_dict(data: Dict[str, Any]) -> RunConfig:
    if not isinstance(data, dict):
        raise ParseError(f"top level must be an object, got {type(data).__name__}")
    defaults = RunConfig()
    top_level = {"scenario", "seed", "output_dir", "dataset", *_SECTIONS}
    for key in data:
        if key not in top_level:
            raise ParseError("unknown key", field=key)

    kwargs: Dict[str, Any] = {}
    if "scenario" in data:
        try:
            kwargs["scenario"] = Scenario(data["scenario"])
        except ValueError:
            raise ParseError(f"unknown scenario {data['scenario']!r}", field="scenario")
    if "seed" in data:
        kwargs["seed"] = _coerce(data["seed"], defaults.seed, "seed")
    if "output_dir" in data:
        kwargs["output_dir"] = _coerce(data["output_dir"], defaults.output_dir, "output_dir")
    if "dataset" in data:
        kwargs["dataset"] = _coerce(data["dataset"], defaults.dataset, "dataset")
    for section, cls in _SECTIONS.items():
        if section in data:
            kwargs[section] = _build_section(cls, data[section], section)

    cfg = RunConfig(**kwargs)
    _validate(cfg)
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read config {path}: {e}")
    if not text.strip():
        raise ParseError(f"config {path} is empty", line=1)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON in {path}: {e.msg}", line=e.lineno)
    return config_from_dict(data)


def save_config(cfg: RunConfig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(cfg.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def resolve_output_dir(cfg: RunConfig, override: Optional[str] = None) -> Path:
    """CLI flag beats the environment variable, which beats the config file."""
    return Path(override or os.environ.get(OUTPUT_DIR_ENV) or cfg.output_dir)


def hash_config(cfg: RunConfig) -> str:
    return config_hash(cfg.to_dict())
