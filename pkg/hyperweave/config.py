"""Generation configuration: defaults, file loading and validation."""

from __future__ import annotations

import dataclasses
import json
import logging
import os
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Union

from hyperweave.errors import ConfigError
from hyperweave.microdynamics import MicroParams, SizeSampler
from hyperweave.oracle import OracleSettings

logger = logging.getLogger(__name__)

BACKENDS = ("oracle", "remote")

SizeSpec = tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class GenerationConfig:
    """
    Every knob of generation, evolution and reporting.

    Attributes:
        num_nodes: Entities synthesized when no profiles are given.
        target_edges: Construction attempts M.
        attach_probability: Probability P of degree-preferential center selection.
        size_spec: Explicit (size, weight) distribution; a truncated power
            law over [min_edge_size, max_edge_size] when absent.
        optimizer_suggestion_count: Focus entities K kept from each directive.
        evolution_steps: Evolution rounds after construction.
        generation_attempts_per_step: Generator calls per evolution round.
        min_edge_size: Smallest hyperedge, >= 2.
        max_edge_size: Largest hyperedge.
        seed: Seed of every random stream.
        domain_label: Network domain named in generator prompts.
        backend: "oracle" or "remote".
    """

    num_nodes: int = 200
    target_edges: int = 1000
    attach_probability: float = 0.85
    size_spec: Optional[SizeSpec] = None
    optimizer_suggestion_count: int = 3
    evolution_steps: int = 5
    generation_attempts_per_step: int = 10
    min_edge_size: int = 2
    max_edge_size: int = 10
    seed: int = 0
    domain_label: str = "collaboration"
    backend: str = "oracle"

    alpha: float = 5.0
    exponent_gamma: float = 1.0
    q_threshold: float = 0.0

    diversity_target: float = 0.2
    remover_max_fraction: float = 0.05
    context_reuse: float = 1.0
    focus_bias: float = 0.5
    local_context_edges: int = 10
    recent_duplicate_window: int = 100
    size_exponent: float = 2.5

    base_url: str = "http://localhost:8000"
    model: str = "gpt-4o-mini"
    temperature: float = 0.0
    request_timeout: float = 60.0
    max_retries: int = 4
    backoff_base: float = 1.0
    backoff_cap: float = 30.0
    max_in_flight: int = 4

    locality_window: int = 10
    group_size: int = 2
    spectrum_k: int = 50
    doi_checkpoints: int = 10

    def validate(self) -> "GenerationConfig":
        """
        Check every bound.

        Returns:
            self, for chaining.

        Raises:
            ConfigError: On the first violated bound.
        """
        checks = [
            (self.num_nodes >= 1, "num_nodes must be >= 1"),
            (self.target_edges >= 0, "target_edges must be >= 0"),
            (0.0 <= self.attach_probability <= 1.0, "attach_probability must lie in [0, 1]"),
            (self.optimizer_suggestion_count >= 0, "optimizer_suggestion_count must be >= 0"),
            (self.evolution_steps >= 0, "evolution_steps must be >= 0"),
            (self.generation_attempts_per_step >= 0, "generation_attempts_per_step must be >= 0"),
            (self.min_edge_size >= 2, "min_edge_size must be >= 2"),
            (self.min_edge_size <= self.max_edge_size, "min_edge_size must not exceed max_edge_size"),
            (self.seed >= 0, "seed must be >= 0"),
            (self.backend in BACKENDS, f"backend must be one of {', '.join(BACKENDS)}"),
            (self.alpha >= 0, "alpha must be >= 0"),
            (self.exponent_gamma > 0, "exponent_gamma must be > 0"),
            (0.0 <= self.q_threshold < 1.0, "q_threshold must lie in [0, 1)"),
            (self.diversity_target >= 0, "diversity_target must be >= 0"),
            (0.0 <= self.remover_max_fraction <= 1.0, "remover_max_fraction must lie in [0, 1]"),
            (0.0 <= self.context_reuse <= 1.0, "context_reuse must lie in [0, 1]"),
            (0.0 <= self.focus_bias <= 1.0, "focus_bias must lie in [0, 1]"),
            (self.local_context_edges >= 0, "local_context_edges must be >= 0"),
            (self.recent_duplicate_window >= 0, "recent_duplicate_window must be >= 0"),
            (self.size_exponent > 0, "size_exponent must be > 0"),
            (self.temperature >= 0, "temperature must be >= 0"),
            (self.request_timeout > 0, "request_timeout must be > 0"),
            (self.max_retries >= 0, "max_retries must be >= 0"),
            (self.backoff_base >= 0 and self.backoff_cap >= 0, "backoff times must be >= 0"),
            (self.max_in_flight >= 1, "max_in_flight must be >= 1"),
            (self.locality_window >= 1, "locality_window must be >= 1"),
            (self.group_size >= 2, "group_size must be >= 2"),
            (self.spectrum_k >= 1, "spectrum_k must be >= 1"),
            (self.doi_checkpoints >= 1, "doi_checkpoints must be >= 1"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        if self.size_spec is not None:
            if not self.size_spec:
                raise ConfigError("size_spec must not be empty")
            for size, weight in self.size_spec:
                if not self.min_edge_size <= size <= self.max_edge_size:
                    raise ConfigError(
                        f"size_spec size {size} outside [{self.min_edge_size}, {self.max_edge_size}]"
                    )
                if weight <= 0:
                    raise ConfigError(f"size_spec weight for size {size} must be positive")
        return self

    def with_overrides(self, **overrides: Any) -> "GenerationConfig":
        """Copy with the non-None overrides applied."""
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def size_sampler(self) -> SizeSampler:
        if self.size_spec:
            return SizeSampler.from_mapping(dict(self.size_spec))
        return SizeSampler.truncated_power_law(
            self.min_edge_size, self.max_edge_size, self.size_exponent
        )

    def micro_params(self) -> MicroParams:
        return MicroParams(
            alpha=self.alpha,
            exponent_gamma=self.exponent_gamma,
            q_threshold=self.q_threshold,
            size_sampler=self.size_sampler(),
        )

    def oracle_settings(self) -> OracleSettings:
        return OracleSettings(
            diversity_target=self.diversity_target,
            remover_max_fraction=self.remover_max_fraction,
            context_reuse=self.context_reuse,
        )


_FIELDS = {f.name: f for f in dataclasses.fields(GenerationConfig)}


def parse_size_spec(value: Any) -> SizeSpec:
    """
    Read a size distribution from ``{"2": 0.6, "3": 0.4}`` or ``"2:0.6;3:0.4"``.

    Raises:
        ConfigError: On a malformed entry.
    """
    if isinstance(value, str):
        items = []
        for part in value.split(";"):
            part = part.strip()
            if not part:
                continue
            if ":" not in part:
                raise ConfigError(f"size_spec entry {part!r} is not size:weight")
            size, weight = part.split(":", 1)
            items.append((size, weight))
    elif isinstance(value, Mapping):
        items = list(value.items())
    else:
        raise ConfigError(f"size_spec must be a mapping or string, got {type(value).__name__}")
    try:
        return tuple(sorted((int(k), float(w)) for k, w in items))
    except ValueError as exc:
        raise ConfigError(f"invalid size_spec: {exc}") from exc


def _coerce(name: str, value: Any) -> Any:
    if name == "size_spec":
        return None if value in (None, "", "none") else parse_size_spec(value)
    default = _FIELDS[name].default
    kind = type(default)
    try:
        if kind is bool:
            return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
        if kind is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(f"{value} is not an integer")
            return int(value)
        if kind is float:
            return float(value)
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value for {name}: {value!r} ({exc})") from exc


def config_from_mapping(
    values: Mapping[str, Any], base: Optional[GenerationConfig] = None
) -> GenerationConfig:
    """
    Apply a mapping of field values on top of ``base`` (defaults when absent).

    Raises:
        ConfigError: On an unknown key or a value of the wrong type.
    """
    unknown = sorted(k for k in values if k not in _FIELDS)
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")
    coerced = {k: _coerce(k, v) for k, v in values.items()}
    return dataclasses.replace(base or GenerationConfig(), **coerced)


def _read_flat(text: str, path: str) -> dict[str, str]:
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def load_config(
    path: Union[str, os.PathLike], base: Optional[GenerationConfig] = None
) -> GenerationConfig:
    """
    Load a configuration file.

    JSON objects and flat ``key=value`` files are both accepted; the format
    is told apart by the first non-blank character.

    Args:
        path: Path to the config file.
        base: Values the file overrides, defaults when absent.

    Returns:
        Validated GenerationConfig.

    Raises:
        ConfigError: If the file cannot be read, has unknown keys or holds
            out-of-range values.
    """
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"Error reading config: {exc}") from exc

    if text.lstrip().startswith("{"):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Error reading config: {exc}") from exc
    else:
        values = _read_flat(text, str(path))
    config = config_from_mapping(values, base).validate()
    logger.info("Loaded config from %s", path)
    return config
