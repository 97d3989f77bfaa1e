"""Fit-score surface over attachment probability and optimizer suggestion count."""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Optional, Sequence, Union

import pandas as pd

from hyperweave.agents import Backends
from hyperweave.config import GenerationConfig
from hyperweave.engine import EvolutionState, construct, evolve_step
from hyperweave.errors import HyperweaveError
from hyperweave.hypergraph import TemporalHypergraph
from hyperweave.microdynamics import RankedPopulation, simulate
from hyperweave.oracle import OracleBackend
from hyperweave.profiles import EntityProfile
from hyperweave.report import GAMMA_PATTERNS, pattern_report

logger = logging.getLogger(__name__)

DEFAULT_ATTACH_PROBABILITIES = (0.55, 0.65, 0.75, 0.85)
DEFAULT_SUGGESTION_COUNTS = (1, 3, 5, 10)

COLUMNS = (
    ["attach_probability", "optimizer_suggestion_count", "seed", "status", "edges"]
    + [f"{key}_gamma" for key in GAMMA_PATTERNS]
    + ["P6_distance", "P8_distance", "average_gamma"]
)


def simulated_reference(config: GenerationConfig) -> TemporalHypergraph:
    """Reference hypergraph drawn from the attachment model with the configured population."""
    population = RankedPopulation.by_node_order(range(config.num_nodes))
    return simulate(population, config.micro_params(), config.target_edges, config.seed).hypergraph


def run_cell(
    reference: TemporalHypergraph,
    profiles: Sequence[EntityProfile],
    config: GenerationConfig,
) -> dict[str, Any]:
    """Construct, evolve and score one grid cell with the oracle backend."""
    row: dict[str, Any] = {
        "attach_probability": config.attach_probability,
        "optimizer_suggestion_count": config.optimizer_suggestion_count,
        "seed": config.seed,
    }
    try:
        population = RankedPopulation.by_node_order([p.id for p in profiles])
        backend = OracleBackend(population, config.micro_params(), config.seed,
                                config.oracle_settings())
        state = EvolutionState(construct(profiles, config, backend))
        backends = Backends.single(backend)
        for _ in range(config.evolution_steps):
            state = evolve_step(state, backends, config, profiles)
        report = pattern_report(reference, state.hypergraph, config)
    except HyperweaveError as exc:
        logger.warning("Sweep cell P=%s K=%s failed: %s",
                       config.attach_probability, config.optimizer_suggestion_count, exc)
        return {**row, "status": f"failed: {exc}"}

    row.update(status="ok", edges=state.hypergraph.m, average_gamma=report.average_gamma)
    for key in GAMMA_PATTERNS:
        row[f"{key}_gamma"] = report.entry(key).gamma
    row["P6_distance"] = report.entry("P6").distance
    row["P8_distance"] = report.entry("P8").distance
    return row


def _run_cell_args(args: tuple) -> dict[str, Any]:
    return run_cell(*args)


def run_sweep(
    reference: TemporalHypergraph,
    profiles: Sequence[EntityProfile],
    config: GenerationConfig,
    attach_probabilities: Sequence[float] = DEFAULT_ATTACH_PROBABILITIES,
    suggestion_counts: Sequence[int] = DEFAULT_SUGGESTION_COUNTS,
    workers: int = 1,
) -> pd.DataFrame:
    """
    Score every (attach probability, suggestion count) pair against a reference.

    Cell i of the row-major grid runs with seed ``config.seed + i``, so rows
    are reproducible however the cells are scheduled.

    Args:
        reference: Hypergraph every cell is compared with.
        profiles: Entities of the generated hypergraphs.
        config: Settings shared by every cell.
        attach_probabilities: Grid values of attach_probability.
        suggestion_counts: Grid values of optimizer_suggestion_count.
        workers: Worker processes; 1 runs cells in this process.

    Returns:
        One row per cell, sorted by grid coordinates.
    """
    jobs = []
    for i, (p, k) in enumerate(itertools.product(attach_probabilities, suggestion_counts)):
        cell = config.with_overrides(
            attach_probability=float(p), optimizer_suggestion_count=int(k), seed=config.seed + i
        ).validate()
        jobs.append((reference, tuple(profiles), cell))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell_args, jobs))
    else:
        rows = [run_cell(*job) for job in jobs]

    logger.info("Sweep finished: %d cells", len(rows))
    frame = pd.DataFrame(rows, columns=COLUMNS)
    return frame.sort_values(
        ["attach_probability", "optimizer_suggestion_count"], kind="stable"
    ).reset_index(drop=True)


def write_sweep(frame: pd.DataFrame, path: Union[str, os.PathLike]) -> None:
    frame.to_csv(path, index=False, lineterminator="\n", float_format="%.10g")


def failed_cells(frame: pd.DataFrame) -> int:
    return int((frame["status"] != "ok").sum())


def parse_grid(text: Optional[str], kind: type, default: Sequence) -> tuple:
    """Comma-separated grid values, or the default grid when text is empty."""
    if not text:
        return tuple(default)
    return tuple(kind(part) for part in text.split(",") if part.strip())
