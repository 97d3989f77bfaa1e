"""Construction and multi-agent evolution of a hypergraph."""

from __future__ import annotations

import dataclasses
import logging
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from hyperweave.agents import (AgentBackend, AgentRole, Backends, CandidateHyperedge,
                               GeneratorContext, OptimizerContext, RemoverContext,
                               ReviewDecision, ReviewerContext, StrategyDirective,
                               SPREADING_KINDS, SKIPPABLE_ERRORS)
from hyperweave.config import GenerationConfig
from hyperweave.errors import (BackendError, ConstructionAborted, EvolutionStepError,
                               HyperweaveError)
from hyperweave.hypergraph import Hyperedge, NodeId, TemporalHypergraph
from hyperweave.network_stats import compute_network_statistics
from hyperweave.oracle import removal_cap
from hyperweave.patterns import current_doi
from hyperweave.profiles import EntityProfile
from hyperweave.report import PatternReport, pattern_report

logger = logging.getLogger(__name__)

CONSTRUCT_STREAM = 1
EVOLVE_STREAM = 2


@dataclass(frozen=True)
class StepRecord:
    step: int
    edges_before: int
    removed: int
    generated: int
    approved: int
    rejected: int
    edges_after: int
    directive: str
    doi: Optional[float]


@dataclass(frozen=True)
class EvolutionState:
    """
    Hypergraph between evolution steps, with cumulative counters.

    Attributes:
        hypergraph: Current hypergraph.
        step: Number of completed steps.
        directive: Directive of the last completed step.
        accepted: Approved candidates merged so far.
        rejected: Candidates rejected by validation or review so far.
        removed: Edges pruned so far.
        history: One record per completed step.
    """

    hypergraph: TemporalHypergraph
    step: int = 0
    directive: Optional[StrategyDirective] = None
    accepted: int = 0
    rejected: int = 0
    removed: int = 0
    history: tuple[StepRecord, ...] = field(default_factory=tuple)


def _profile_index(profiles: Sequence[EntityProfile]) -> dict[NodeId, EntityProfile]:
    return {p.id: p for p in profiles}


def _profile_for(index: dict[NodeId, EntityProfile], node: NodeId) -> EntityProfile:
    return index.get(node) or EntityProfile(node)


def select_entity(
    graph: TemporalHypergraph,
    config: GenerationConfig,
    rng: np.random.Generator,
    directive: Optional[StrategyDirective] = None,
) -> NodeId:
    """
    Pick the central entity of the next hyperedge.

    With a directive that carries focus entities, one of them is taken with
    probability ``focus_bias``. Otherwise, with probability
    ``attach_probability`` a node is drawn proportional to degree + 1, and
    uniformly over V in the remaining cases. Diversity-seeking directives
    switch the degree preference off.

    Args:
        graph: Current hypergraph; V must be non-empty.
        config: Generation settings.
        rng: Random generator.
        directive: Current global strategy, if any.

    Returns:
        The selected node id.
    """
    nodes = graph.sorted_nodes()
    if directive is not None and directive.focus_entities:
        if rng.random() < config.focus_bias:
            focus = directive.focus_entities
            return focus[int(rng.integers(len(focus)))]
    preferential = directive is None or directive.kind not in SPREADING_KINDS
    if rng.random() < config.attach_probability and preferential:
        weights = graph.degree_array(nodes) + 1.0
        return nodes[int(rng.choice(len(nodes), p=weights / weights.sum()))]
    return nodes[int(rng.integers(len(nodes)))]


def determine_hyperedge_size(config: GenerationConfig, rng: np.random.Generator) -> int:
    """Draw a size from size_spec, or from the truncated power law over [min, max]."""
    return config.size_sampler().sample(rng)


def validate_candidate(
    candidate: CandidateHyperedge, graph: TemporalHypergraph, config: GenerationConfig
) -> tuple[bool, str]:
    """
    Check a candidate against the hypergraph.

    Returns:
        (True, "ok") or (False, reason) with reason one of "unknown node",
        "size", "center" or "duplicate".
    """
    if not candidate.nodes <= graph.nodes:
        return False, "unknown node"
    if not config.min_edge_size <= len(candidate.nodes) <= config.max_edge_size:
        return False, "size"
    if candidate.center not in candidate.nodes:
        return False, "center"
    key = candidate.key()
    window = config.recent_duplicate_window
    recent = graph.edges[-window:] if window else ()
    if any(edge.nodes == key for edge in recent):
        return False, "duplicate"
    return True, "ok"


def _generator_context(
    graph: TemporalHypergraph,
    config: GenerationConfig,
    profiles: dict[NodeId, EntityProfile],
    center: NodeId,
    size: int,
    directive: Optional[StrategyDirective],
) -> GeneratorContext:
    return GeneratorContext(
        center=_profile_for(profiles, center),
        local_context=graph.local_context(center, config.local_context_edges),
        size=size,
        domain_label=config.domain_label,
        directive=directive,
    )


def construct(
    profiles: Sequence[EntityProfile],
    config: GenerationConfig,
    backend: AgentBackend,
) -> TemporalHypergraph:
    """
    Build the initial hypergraph by iterative local generation.

    Each of the ``target_edges`` attempts selects a center, draws a size,
    asks the generator for a candidate and keeps it when it validates.
    Failed attempts are skipped, so the result has at most target_edges
    edges, timestamped in insertion order.

    Args:
        profiles: Entities; their ids form V.
        config: Generation settings.
        backend: Backend answering generator calls.

    Returns:
        The constructed hypergraph.

    Raises:
        ConstructionAborted: On a backend failure, carrying the partial result.
    """
    if not profiles:
        raise ValueError("construction needs at least one profile")
    index = _profile_index(profiles)
    graph = TemporalHypergraph(nodes=index)
    rng = np.random.default_rng([config.seed, CONSTRUCT_STREAM])
    skipped = 0

    for attempt in range(config.target_edges):
        center = select_entity(graph, config, rng)
        size = min(determine_hyperedge_size(config, rng), graph.n)
        if size < config.min_edge_size:
            skipped += 1
            continue
        ctx = _generator_context(graph, config, index, center, size, None)
        try:
            candidate = backend.decide(AgentRole.GENERATOR, ctx)
        except BackendError as exc:
            logger.warning("Construction aborted at attempt %d: %s", attempt, exc)
            raise ConstructionAborted(graph, attempt, exc) from exc
        except SKIPPABLE_ERRORS as exc:
            logger.debug("Attempt %d skipped: %s", attempt, exc)
            skipped += 1
            continue
        ok, reason = validate_candidate(candidate, graph, config)
        if not ok:
            logger.debug("Attempt %d rejected: %s", attempt, reason)
            skipped += 1
            continue
        graph.add_hyperedge(Hyperedge(candidate.key(), graph.m))

    logger.info("Constructed %d hyperedges over %d nodes (%d attempts skipped)",
                graph.m, graph.n, skipped)
    return graph


def evolve_step(
    state: EvolutionState,
    backends: Backends,
    config: GenerationConfig,
    profiles: Sequence[EntityProfile] = (),
) -> EvolutionState:
    """
    Run one round of optimize, prune, generate and review.

    The optimizer sets the directive, the remover prunes, the generator
    proposes one candidate per attempt, and the reviewer's approvals are
    merged in attempt order. The input state is never modified.

    Args:
        state: State before the step.
        backends: Backend per role.
        config: Generation settings.
        profiles: Entity profiles for prompts and statistics.

    Returns:
        The state after the step.

    Raises:
        EvolutionStepError: On any backend failure; the input state stays valid.
    """
    number = state.step + 1
    graph = state.hypergraph.copy()
    index = _profile_index(profiles)
    rng = np.random.default_rng([config.seed, EVOLVE_STREAM, number])
    edges_before = graph.m
    try:
        stats = compute_network_statistics(graph, profiles)
        directive = backends.optimizer.decide(
            AgentRole.OPTIMIZER, OptimizerContext(stats, config.optimizer_suggestion_count)
        ).restricted(graph.nodes, config.optimizer_suggestion_count)

        cap = removal_cap(config.remover_max_fraction, graph.m)
        doomed: list[int] = []
        if cap > 0:
            listing = tuple((i, e.nodes) for i, e in enumerate(graph.edges))
            proposed = backends.remover.decide(AgentRole.REMOVER,
                                               RemoverContext(listing, directive))
            doomed = sorted(i for i in proposed if 0 <= i < graph.m)[:cap]
            graph.remove_hyperedges(doomed)

        contexts = []
        for _ in range(config.generation_attempts_per_step):
            center = select_entity(graph, config, rng, directive)
            size = min(determine_hyperedge_size(config, rng), graph.n)
            contexts.append(_generator_context(graph, config, index, center, size, directive))
        outcomes = backends.generator.decide_many(AgentRole.GENERATOR, contexts)
        candidates = [c for c in outcomes if isinstance(c, CandidateHyperedge)]
        valid = [c for c in candidates if validate_candidate(c, graph, config)[0]]

        existing = frozenset(e.nodes for e in graph.edges)
        reviews = backends.reviewer.decide_many(AgentRole.REVIEWER, [
            ReviewerContext(c, tuple(_profile_for(index, v) for v in c.key()), directive, existing)
            for c in valid
        ])
    except HyperweaveError as exc:
        logger.warning("Evolution step %d failed, rolling back: %s", number, exc)
        raise EvolutionStepError(number, exc) from exc

    approved = 0
    for candidate, review in zip(valid, reviews):
        if not (isinstance(review, ReviewDecision) and review.approved):
            continue
        if not validate_candidate(candidate, graph, config)[0]:
            continue
        graph.add_hyperedge(Hyperedge(candidate.key(), graph.next_timestamp()))
        approved += 1

    record = StepRecord(
        step=number,
        edges_before=edges_before,
        removed=len(doomed),
        generated=len(candidates),
        approved=approved,
        rejected=len(candidates) - approved,
        edges_after=graph.m,
        directive=directive.kind.value,
        doi=current_doi(graph),
    )
    logger.info("Step %d: %s, removed %d, approved %d of %d candidates, m=%d",
                number, record.directive, record.removed, approved, record.generated, graph.m)
    return EvolutionState(
        hypergraph=graph,
        step=number,
        directive=directive,
        accepted=state.accepted + approved,
        rejected=state.rejected + record.rejected,
        removed=state.removed + record.removed,
        history=state.history + (record,),
    )


def evolve(
    initial: TemporalHypergraph,
    profiles: Sequence[EntityProfile],
    config: GenerationConfig,
    backends: Backends,
) -> tuple[EvolutionState, PatternReport]:
    """
    Apply ``evolution_steps`` evolution rounds and report on the result.

    Raises:
        EvolutionStepError: With the index of the failing step.
    """
    state = EvolutionState(initial.copy())
    for _ in range(config.evolution_steps):
        state = evolve_step(state, backends, config, profiles)
    return state, pattern_report(None, state.hypergraph, config)


def counters_frame(state: EvolutionState) -> pd.DataFrame:
    columns = [f.name for f in dataclasses.fields(StepRecord)]
    return pd.DataFrame([dataclasses.astuple(r) for r in state.history], columns=columns)


def write_counters(state: EvolutionState, path: Union[str, os.PathLike]) -> None:
    """Write one CSV row per evolution step."""
    counters_frame(state).to_csv(path, index=False, lineterminator="\n", float_format="%.10g")
