"""Entity profiles: node attributes and personas used in agent prompts."""

import logging
import os
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import pandas as pd

from hyperweave.errors import ConfigError

logger = logging.getLogger(__name__)

_SYNTHETIC_ATTRIBUTES: dict[str, tuple[str, ...]] = {
    "department": ("research", "engineering", "operations", "sales", "legal", "finance"),
    "seniority": ("junior", "mid", "senior", "principal"),
    "region": ("north", "south", "east", "west"),
    "focus": ("theory", "systems", "data", "product", "policy"),
}


@dataclass(frozen=True)
class EntityProfile:
    """
    Attributes and persona of one node.

    Attributes:
        id: Node id the profile describes.
        attributes: Ordered (key, value) pairs with unique keys.
        persona: Free-text description, may be empty.
    """

    id: int
    attributes: tuple[tuple[str, str], ...] = field(default_factory=tuple)
    persona: str = ""

    def __post_init__(self) -> None:
        keys = [k for k, _ in self.attributes]
        if len(keys) != len(set(keys)):
            raise ValueError(f"duplicate attribute keys in profile {self.id}")

    def describe(self) -> str:
        """Render attributes as ``key=value; key=value``."""
        return "; ".join(f"{k}={v}" for k, v in self.attributes) or "(no attributes)"


def _parse_attributes(cell: str, row: int) -> tuple[tuple[str, str], ...]:
    pairs = []
    for item in cell.split(";"):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"profiles row {row}: attribute {item!r} is not key=value")
        key, value = item.split("=", 1)
        pairs.append((key.strip(), value.strip()))
    return tuple(pairs)


def load_profiles(path: Union[str, os.PathLike]) -> list[EntityProfile]:
    """
    Load entity profiles from CSV.

    Rows are ``id,key=value;key=value,persona``; a persona containing a
    comma is double-quoted, as in ``3,dept=legal,"Counsel, part time"``.
    A first row whose id cell reads ``id`` is treated as a header.

    Args:
        path: Path to the profiles CSV.

    Returns:
        Profiles sorted by id.

    Raises:
        ConfigError: On a file without profiles, an unparsable file, a
            malformed row or a duplicate id.
    """
    try:
        frame = pd.read_csv(
            path,
            header=None,
            names=["id", "attributes", "persona"],
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
        )
    except pd.errors.EmptyDataError as exc:
        raise ConfigError(f"profiles file {path} is empty") from exc
    except pd.errors.ParserError as exc:
        raise ConfigError(f"profiles file {path}: {exc}; quote personas that contain commas") from exc
    if len(frame) and frame.iloc[0]["id"].strip().lower() == "id":
        frame = frame.iloc[1:]

    profiles: dict[int, EntityProfile] = {}
    for row, record in enumerate(frame.itertuples(index=False), start=1):
        raw_id = record.id.strip()
        if not raw_id.isdigit():
            raise ConfigError(f"profiles row {row}: invalid id {raw_id!r}")
        node = int(raw_id)
        if node in profiles:
            raise ConfigError(f"profiles row {row}: duplicate id {node}")
        try:
            profiles[node] = EntityProfile(
                node, _parse_attributes(record.attributes, row), record.persona.strip()
            )
        except ValueError as exc:
            raise ConfigError(f"profiles row {row}: {exc}") from exc

    if not profiles:
        raise ConfigError(f"profiles file {path} holds no profiles")
    logger.info("Loaded %d profiles from %s", len(profiles), path)
    return [profiles[k] for k in sorted(profiles)]


def synthesize_profiles(num_nodes: int, seed: int) -> list[EntityProfile]:
    """
    Build deterministic placeholder profiles for nodes 0..num_nodes-1.

    Args:
        num_nodes: Number of entities.
        seed: Random seed.

    Returns:
        Profiles with categorical attributes and a one-line persona.
    """
    rng = np.random.default_rng(seed)
    profiles = []
    for node in range(num_nodes):
        attrs = tuple(
            (key, values[int(rng.integers(len(values)))])
            for key, values in _SYNTHETIC_ATTRIBUTES.items()
        )
        lookup = dict(attrs)
        persona = (
            f"A {lookup['seniority']} member of {lookup['department']} "
            f"in the {lookup['region']} office working on {lookup['focus']}."
        )
        profiles.append(EntityProfile(node, attrs, persona))
    return profiles
