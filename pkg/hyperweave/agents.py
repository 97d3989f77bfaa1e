"""Agent roles, the contexts they read and the decisions they return."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Protocol, Sequence, Union

from hyperweave.errors import EligibleSetError, InvalidEdgeError, ResponseParseError
from hyperweave.hypergraph import LocalContext, NodeId
from hyperweave.network_stats import NetworkStatistics
from hyperweave.profiles import EntityProfile


class AgentRole(str, Enum):
    GENERATOR = "generator"
    REVIEWER = "reviewer"
    REMOVER = "remover"
    OPTIMIZER = "optimizer"


class StrategyKind(str, Enum):
    INCREASE_CONNECTIONS = "INCREASE_CONNECTIONS"
    ENHANCE_DIVERSITY = "ENHANCE_DIVERSITY"
    REDUCE_CLUSTERING = "REDUCE_CLUSTERING"
    MAINTAIN = "MAINTAIN"


# Directives under which growth spreads out instead of reinforcing hubs.
SPREADING_KINDS = frozenset({StrategyKind.ENHANCE_DIVERSITY, StrategyKind.REDUCE_CLUSTERING})


class Verdict(str, Enum):
    APPROVE = "APPROVE"
    REJECT = "REJECT"


@dataclass(frozen=True)
class StrategyDirective:
    """
    Global strategy for one evolution step.

    Attributes:
        kind: Directive from the closed set.
        focus_entities: Entities the optimizer suggests building around.
        rationale: Free text.
    """

    kind: StrategyKind = StrategyKind.MAINTAIN
    focus_entities: tuple[NodeId, ...] = ()
    rationale: str = ""

    def restricted(self, nodes: frozenset, limit: int) -> "StrategyDirective":
        """Drop focus entities outside ``nodes`` and keep at most ``limit``."""
        kept = tuple(v for v in dict.fromkeys(self.focus_entities) if v in nodes)[:max(0, limit)]
        return StrategyDirective(self.kind, kept, self.rationale)


@dataclass(frozen=True)
class CandidateHyperedge:
    nodes: frozenset[NodeId]
    center: NodeId
    justification: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", frozenset(int(v) for v in self.nodes))
        if self.center not in self.nodes:
            raise InvalidEdgeError(f"center {self.center} is not in the candidate")
        if len(self.nodes) < 2:
            raise InvalidEdgeError("a candidate hyperedge needs at least 2 nodes")

    def key(self) -> tuple[NodeId, ...]:
        return tuple(sorted(self.nodes))


@dataclass(frozen=True)
class ReviewDecision:
    verdict: Verdict
    reason: str = ""

    @property
    def approved(self) -> bool:
        return self.verdict is Verdict.APPROVE


@dataclass(frozen=True)
class GeneratorContext:
    center: EntityProfile
    local_context: LocalContext
    size: int
    domain_label: str
    directive: Optional[StrategyDirective] = None


@dataclass(frozen=True)
class ReviewerContext:
    """
    Input of one review.

    Attributes:
        candidate: Hyperedge under review.
        member_profiles: Profiles of the candidate's members.
        directive: Current global strategy.
        existing_edges: Node tuples of the current edges, for duplicate checks.
    """

    candidate: CandidateHyperedge
    member_profiles: tuple[EntityProfile, ...]
    directive: Optional[StrategyDirective] = None
    existing_edges: frozenset = frozenset()


@dataclass(frozen=True)
class RemoverContext:
    edges: tuple[tuple[int, tuple[NodeId, ...]], ...]
    directive: Optional[StrategyDirective]


@dataclass(frozen=True)
class OptimizerContext:
    statistics: Optional[NetworkStatistics]
    suggestion_count: int = 3


RoleContext = Union[GeneratorContext, ReviewerContext, RemoverContext, OptimizerContext]
RoleResult = Union[CandidateHyperedge, ReviewDecision, frozenset, StrategyDirective]

# Per-candidate failures that skip one attempt instead of failing the step.
SKIPPABLE_ERRORS = (EligibleSetError, ResponseParseError, InvalidEdgeError)


class AgentBackend(Protocol):
    def decide(self, role: AgentRole, ctx: RoleContext) -> RoleResult: ...

    def decide_many(
        self, role: AgentRole, contexts: Sequence[RoleContext]
    ) -> list[Union[RoleResult, Exception]]: ...


def decide_each(backend: AgentBackend, role: AgentRole, contexts: Sequence[RoleContext]) -> list:
    outcomes: list = []
    for ctx in contexts:
        try:
            outcomes.append(backend.decide(role, ctx))
        except SKIPPABLE_ERRORS as exc:
            outcomes.append(exc)
    return outcomes


@dataclass(frozen=True)
class Backends:
    """The backend answering each role."""

    optimizer: AgentBackend
    remover: AgentBackend
    generator: AgentBackend
    reviewer: AgentBackend

    @classmethod
    def single(cls, backend: AgentBackend) -> "Backends":
        return cls(backend, backend, backend, backend)
