"""Deterministic agent decisions derived from the rank-attachment model.

Rank stands in for an entity's perceived influence and quality for the
judgement the reviewer and remover apply, so the whole agent pipeline can
run offline and replay bit for bit.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from hyperweave.agents import (AgentRole, CandidateHyperedge, GeneratorContext,
                               OptimizerContext, RemoverContext, ReviewDecision,
                               ReviewerContext, RoleContext, RoleResult, SPREADING_KINDS,
                               StrategyDirective, StrategyKind, Verdict, decide_each)
from hyperweave.errors import EligibleSetError
from hyperweave.microdynamics import (MicroParams, RankedPopulation, eligible_mask,
                                      sample_collaborators, selection_probabilities)

logger = logging.getLogger(__name__)

ORACLE_STREAM = 0

SeedLike = Union[int, np.random.SeedSequence]


@dataclass(frozen=True)
class OracleSettings:
    """
    Attributes:
        diversity_target: DoI above which the optimizer asks for diversity.
        remover_max_fraction: Largest share of edges removed per decision,
            rounded down, so a hypergraph with fewer than
            1 / remover_max_fraction edges loses none.
        context_reuse: Chance that each collaborator slot is filled from
            the center's recent co-members while unused ones remain;
            other slots fall back to rank attachment.
    """

    diversity_target: float = 0.2
    remover_max_fraction: float = 0.05
    context_reuse: float = 1.0


def removal_cap(max_fraction: float, m: int) -> int:
    """Most edges one removal pass may take out of m."""
    return math.floor(max_fraction * m)


def _known_collaborators(ctx: GeneratorContext, pop: RankedPopulation,
                         eligible: np.ndarray) -> dict[int, int]:
    """Co-occurrence counts of the center's recent co-members, by population slot."""
    center = ctx.center.id
    counts: dict[int, int] = {}
    for _, nodes in ctx.local_context.edges:
        for v in nodes:
            if v == center:
                continue
            try:
                slot = pop.index_of(v)
            except KeyError:
                continue
            if eligible[slot]:
                counts[slot] = counts.get(slot, 0) + 1
    return dict(sorted(counts.items()))


def _reuse_collaborators(known: dict[int, int], pop: RankedPopulation, params: MicroParams,
                         initiator: int, count: int, reuse: float,
                         rng: np.random.Generator) -> list[int]:
    weights = np.where(eligible_mask(pop, params), selection_probabilities(pop, params), 0.0)
    weights[initiator] = 0.0
    available = int(np.count_nonzero(weights))
    if available < count:
        raise EligibleSetError(f"need {count} eligible collaborators, only {available} available")
    chosen: list[int] = []
    for _ in range(count):
        pool = [slot for slot in known if slot not in chosen]
        if pool and rng.random() < reuse:
            counts = np.array([known[slot] for slot in pool], dtype=float)
            pick = pool[int(rng.choice(len(pool), p=counts / counts.sum()))]
        else:
            open_slots = np.flatnonzero(weights)
            probs = weights[open_slots] / weights[open_slots].sum()
            pick = int(open_slots[rng.choice(open_slots.size, p=probs)])
        chosen.append(pick)
        weights[pick] = 0.0
    return chosen


def _generate(ctx: GeneratorContext, pop: RankedPopulation, params: MicroParams,
              settings: OracleSettings, rng: np.random.Generator) -> CandidateHyperedge:
    center = ctx.center.id
    initiator = pop.index_of(center)
    spreading = ctx.directive is not None and ctx.directive.kind in SPREADING_KINDS
    known = {} if spreading else _known_collaborators(ctx, pop, eligible_mask(pop, params))
    if known and settings.context_reuse > 0:
        chosen = _reuse_collaborators(known, pop, params, initiator, ctx.size - 1,
                                      settings.context_reuse, rng)
        rationale = f"regrouping around the recent collaborators of {center}"
    else:
        chosen = sample_collaborators(pop, params, initiator, ctx.size - 1, rng)
        rationale = f"rank-weighted collaborators around {center}"
    members = frozenset([center, *(pop.node_ids[i] for i in chosen)])
    return CandidateHyperedge(members, center, rationale)


def _review(ctx: ReviewerContext, pop: RankedPopulation, params: MicroParams) -> ReviewDecision:
    candidate = ctx.candidate
    eligible = eligible_mask(pop, params)
    for v in sorted(candidate.nodes):
        try:
            index = pop.index_of(v)
        except KeyError:
            return ReviewDecision(Verdict.REJECT, f"unknown entity {v}")
        if not eligible[index]:
            return ReviewDecision(
                Verdict.REJECT, f"entity {v} has quality {pop.qualities[index]:.3f}"
            )
    if candidate.key() in ctx.existing_edges:
        return ReviewDecision(Verdict.REJECT, "duplicates an existing hyperedge")
    return ReviewDecision(Verdict.APPROVE, "all members pass the quality filter")


def _remove(ctx: RemoverContext, pop: RankedPopulation, params: MicroParams,
            settings: OracleSettings) -> frozenset:
    cap = removal_cap(settings.remover_max_fraction, len(ctx.edges))
    if cap == 0:
        return frozenset()
    low = []
    for index, nodes in ctx.edges:
        quality = float(np.mean([pop.qualities[pop.index_of(v)] for v in nodes]))
        if quality < params.q_threshold:
            low.append((quality, index))
    return frozenset(index for _, index in sorted(low)[:cap])


def _optimize(ctx: OptimizerContext, pop: RankedPopulation, params: MicroParams,
              settings: OracleSettings) -> StrategyDirective:
    doi = ctx.statistics.doi if ctx.statistics is not None else None
    if doi is not None and doi > settings.diversity_target:
        kind = StrategyKind.ENHANCE_DIVERSITY
        rationale = f"density of interactions {doi:.3f} above target {settings.diversity_target}"
    else:
        kind = StrategyKind.INCREASE_CONNECTIONS
        rationale = "density of interactions at or below target"
    probs = selection_probabilities(pop, params)
    order = np.argsort(-probs, kind="stable")[:max(0, ctx.suggestion_count)]
    focus = tuple(pop.node_ids[i] for i in order if probs[i] > 0)
    return StrategyDirective(kind, focus, rationale)


def oracle_decide(
    role: AgentRole,
    ctx: RoleContext,
    pop: RankedPopulation,
    params: MicroParams,
    seed: SeedLike,
    settings: OracleSettings = OracleSettings(),
) -> RoleResult:
    """
    Answer one agent call from the attachment model.

    GENERATOR regroups the center with co-members from its local context
    and fills the remaining slots by rank attachment; with no context, or
    under a spreading directive, every slot comes from rank attachment.
    REVIEWER approves when every member passes the quality filter and the
    candidate is not already an edge. REMOVER picks edges whose mean member
    quality is below the threshold, lowest first, up to the cap. OPTIMIZER
    asks for diversity when the current DoI exceeds the target and focuses
    on the entities most likely to be selected.

    Args:
        role: Agent role.
        ctx: The role's context.
        pop: Population covering every node of the hypergraph.
        params: Attachment parameters.
        seed: Seed of this decision's random stream.
        settings: Generator, remover and optimizer knobs.

    Raises:
        EligibleSetError: If a generator call cannot find enough collaborators.
    """
    if role is AgentRole.GENERATOR:
        return _generate(ctx, pop, params, settings, np.random.default_rng(seed))
    if role is AgentRole.REVIEWER:
        return _review(ctx, pop, params)
    if role is AgentRole.REMOVER:
        return _remove(ctx, pop, params, settings)
    return _optimize(ctx, pop, params, settings)


class OracleBackend:
    """
    Offline backend answering every role with oracle_decide.

    Each decision draws from its own stream seeded by (seed, decision
    counter), so a run replays exactly however the roles interleave.
    """

    def __init__(
        self,
        population: RankedPopulation,
        params: MicroParams,
        seed: int,
        settings: OracleSettings = OracleSettings(),
    ):
        self.population = population
        self.params = params
        self.seed = seed
        self.settings = settings
        self.decisions = 0

    def _next_seed(self) -> np.random.SeedSequence:
        seq = np.random.SeedSequence([self.seed, ORACLE_STREAM, self.decisions])
        self.decisions += 1
        return seq

    def decide(self, role: AgentRole, ctx: RoleContext) -> RoleResult:
        result = oracle_decide(
            role, ctx, self.population, self.params, self._next_seed(), self.settings
        )
        logger.debug("Oracle %s decision: %s", role.value, result)
        return result

    def decide_many(self, role: AgentRole, contexts: Sequence[RoleContext]) -> list:
        return decide_each(self, role, contexts)
