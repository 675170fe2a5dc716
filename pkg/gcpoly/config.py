"""Run configuration for gcpoly.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

Built-in defaults are overridden by a JSON config file, then by a preset,
then by explicit command-line flags. The effective configuration is echoed
into every file the CLI writes.
"""

import json
import logging
import os
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from gcpoly.errors import ConfigError
from gcpoly.metrics import EvalCanvas
from gcpoly.simplify import ALGORITHMS, SimplifyParams

logger = logging.getLogger(__name__)

THREADS_ENV = "GCPOLY_THREADS"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

PRESETS: dict[str, dict[str, Any]] = {
    "crowdai": {"lambda": 2.0},
    "whu-mix": {"lambda": 4.0},
}

# JSON key -> RunConfig attribute
_KEYS = {
    "lambda": "lam",
    "k_max": "k_max",
    "step": "step",
    "window": "window",
    "l_max": "l_max",
    "algorithm": "algorithm",
    "dp_tolerance": "dp_tolerance",
    "seed": "seed",
    "threads": "threads",
    "log_level": "log_level",
}
_CANVAS_KEYS = ("width", "height", "supersample")


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a CLI run."""

    lam: float = 2.0
    k_max: int = 64
    step: float = 4.0
    window: int = 64
    l_max: int = 512
    algorithm: str = "gcp"
    dp_tolerance: float = 1.0
    seed: int = 0
    canvas: EvalCanvas = field(default_factory=EvalCanvas)
    threads: int = 1
    log_level: str = "WARNING"

    def validate(self) -> list[str]:
        """Validate parameters and return list of errors.

        Returns:
            List of validation error messages (empty if valid)
        """
        errors = self.simplify_params().validate()
        if not self.step > 0:
            errors.append(f"step must be positive, got {self.step}")
        if self.window < 2:
            errors.append(f"window must be at least 2, got {self.window}")
        if self.l_max < 4:
            errors.append(f"l_max must be at least 4, got {self.l_max}")
        if self.algorithm not in ALGORITHMS:
            errors.append(f"Unknown algorithm: {self.algorithm}")
        if not self.dp_tolerance >= 0:
            errors.append(f"dp_tolerance must be non-negative, got {self.dp_tolerance}")
        if self.threads < 1:
            errors.append(f"threads must be at least 1, got {self.threads}")
        if self.log_level not in LOG_LEVELS:
            errors.append(f"Unknown log level: {self.log_level}")
        errors.extend(self.canvas.validate())
        return errors

    def simplify_params(self) -> SimplifyParams:
        return SimplifyParams(lam=self.lam, k_max=self.k_max)

    def to_dict(self) -> dict[str, Any]:
        """JSON form, the same shape a config file uses."""
        data: dict[str, Any] = {key: getattr(self, attr) for key, attr in _KEYS.items()}
        data["canvas"] = {key: getattr(self.canvas, key) for key in _CANVAS_KEYS}
        return data

    def with_overrides(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Apply JSON-keyed overrides; None values are ignored.

        Raises:
            ConfigError: On an unknown key or a value of the wrong type
        """
        changes: dict[str, Any] = {}
        canvas = self.canvas
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "canvas":
                if not isinstance(value, Mapping):
                    raise ConfigError("canvas must be an object")
                unknown = set(value) - set(_CANVAS_KEYS)
                if unknown:
                    raise ConfigError(f"Unknown canvas key(s): {', '.join(sorted(unknown))}")
                canvas = replace(canvas, **{k: _coerce(k, v, int) for k, v in value.items() if v is not None})
            elif key in _KEYS:
                attr = _KEYS[key]
                kind = type(getattr(self, attr))
                changes[attr] = _coerce(key, value, kind)
            else:
                raise ConfigError(f"Unknown config key: {key}")
        return replace(self, canvas=canvas, **changes)


def _coerce(key: str, value: Any, kind: type) -> Any:
    if isinstance(value, bool) or (kind is int and isinstance(value, float) and not value.is_integer()):
        raise ConfigError(f"{key} must be {kind.__name__}, got {value!r}")
    try:
        return kind(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key} must be {kind.__name__}, got {value!r}") from e


def load_config_file(path: Path) -> dict[str, Any]:
    """Read a JSON config file.

    Raises:
        ConfigError: If the file cannot be read or is not a JSON object
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read config file {path}: {e!s}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    return data


def resolve_config(
    config_file: Path | None = None,
    preset: str | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunConfig:
    """Build the effective configuration.

    Args:
        config_file: Optional JSON config file
        preset: Optional preset name (see PRESETS)
        overrides: JSON-keyed values from command-line flags

    Raises:
        ConfigError: On unknown keys, bad values or an invalid result
    """
    config = RunConfig()
    if config_file is not None:
        config = config.with_overrides(load_config_file(config_file))
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"Unknown preset: {preset} (expected one of {', '.join(PRESETS)})")
        config = config.with_overrides(PRESETS[preset])
    if overrides:
        config = config.with_overrides(overrides)
    errors = config.validate()
    if errors:
        raise ConfigError("; ".join(errors))
    return config


def effective_threads(config: RunConfig) -> int:
    """Worker count, capped by the GCPOLY_THREADS environment variable."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return config.threads
    try:
        cap = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer", THREADS_ENV, raw)
        return config.threads
    return max(1, min(config.threads, cap))
