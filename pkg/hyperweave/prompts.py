"""Prompt templates for the four agent roles and lenient parsing of their replies."""

from __future__ import annotations

import logging
import re
from collections.abc import Mapping
from typing import Any, Optional

from hyperweave.agents import (AgentRole, CandidateHyperedge, ReviewDecision, RoleResult,
                               StrategyDirective, StrategyKind, Verdict)
from hyperweave.errors import ResponseParseError, TemplateError
from hyperweave.hypergraph import LocalContext, NodeId

logger = logging.getLogger(__name__)

SYSTEM_PROMPTS: dict[AgentRole, str] = {
    AgentRole.GENERATOR: (
        "You are a hypergraph relationship generator. Your task is to form a new "
        "collaborative group around a central entity."
    ),
    AgentRole.REVIEWER: (
        "You are a hypergraph relationship reviewer. Your task is to validate a "
        "candidate hyperedge."
    ),
    AgentRole.REMOVER: (
        "You are a hypergraph network curator. Your task is to identify and remove "
        "redundant or low-quality hyperedges."
    ),
    AgentRole.OPTIMIZER: (
        "You are a network strategy analyst. Your task is to assess the entire "
        "hypergraph and provide a strategic directive for the next evolution step."
    ),
}

_ID_LIST = re.compile(r"[\[\{\(]\s*(\d+(?:\s*,\s*\d+)*)\s*,?\s*[\]\}\)]")
_ID_RUN = re.compile(r"\d+(?:\s*,\s*\d+)+")
_VERDICT = re.compile(r"\b(APPROVE|REJECT)(?:D|ED)?\b", re.IGNORECASE)
_NONE = re.compile(r"\bNONE\b", re.IGNORECASE)
_DIRECTIVES = {
    kind: re.compile(r"\b" + r"[\s_-]+".join(kind.value.split("_")) + r"\b", re.IGNORECASE)
    for kind in StrategyKind
}


def _field(ctx: Any, name: str) -> Any:
    value = ctx.get(name) if isinstance(ctx, Mapping) else getattr(ctx, name, None)
    if value is None:
        raise TemplateError(name)
    return value


def _ids(nodes) -> str:
    return "{" + ", ".join(str(v) for v in sorted(nodes)) + "}"


def _strategy_line(directive: Optional[StrategyDirective]) -> str:
    if directive is None:
        return "none"
    line = directive.kind.value
    if directive.focus_entities:
        line += "; focus entities: " + ", ".join(str(v) for v in directive.focus_entities)
    return line


def _local_context_summary(local: LocalContext) -> str:
    if not local.edges:
        return "No existing relationships."
    recent = "; ".join(f"#{i} {_ids(nodes)}" for i, nodes in local.edges)
    return f"Member of {local.degree} hyperedges. Most recent: {recent}"


def _generator_prompt(ctx: Any) -> str:
    center = _field(ctx, "center")
    local = _field(ctx, "local_context")
    size = _field(ctx, "size")
    domain = _field(ctx, "domain_label")
    directive = ctx.get("directive") if isinstance(ctx, Mapping) else getattr(ctx, "directive", None)
    lines = [
        f"A new collaboration is being formed in a {domain} network.",
        "",
        f"  Central Entity: {center.id}",
        f"  Attributes: {center.describe()}",
    ]
    if center.persona:
        lines.append(f"  Persona: {center.persona}")
    lines += [
        f"  Local Context: {_local_context_summary(local)}",
        f"  Global Strategy: {_strategy_line(directive)}",
        f"  Task: Propose a new hyperedge of size {size} that includes the central entity. "
        "The group should be semantically coherent and structurally sound based on the context.",
        f"  Output: the {size} entity IDs as a bracketed list, e.g. [{center.id}, ...].",
    ]
    return "\n".join(lines)


def _reviewer_prompt(ctx: Any) -> str:
    candidate = _field(ctx, "candidate")
    profiles = {p.id: p for p in _field(ctx, "member_profiles")}
    directive = ctx.get("directive") if isinstance(ctx, Mapping) else getattr(ctx, "directive", None)
    details = [
        f"    - {v}: {profiles[v].describe() if v in profiles else '(no profile)'}"
        for v in sorted(candidate.nodes)
    ]
    lines = [
        "Please review the following candidate hyperedge:",
        "",
        f"  Candidate Hyperedge: {_ids(candidate.nodes)}",
        "  Entity Details:",
        *details,
        "  Evaluation Criteria:",
        "    - Internal Cohesion: Are the members a good fit?",
        "    - Network Impact: How does this group affect the overall structure?",
        f"  Global Strategy: {_strategy_line(directive)}",
        '  Decision: Output "APPROVE" or "REJECT".',
    ]
    return "\n".join(lines)


def _remover_prompt(ctx: Any) -> str:
    edges = ctx.get("edges") if isinstance(ctx, Mapping) else getattr(ctx, "edges", None)
    if edges is None:
        raise TemplateError("edges")
    directive = _field(ctx, "directive")
    listing = [f"    {i}: {_ids(nodes)}" for i, nodes in edges] or ["    (none)"]
    lines = [
        "Analyze the provided list of hyperedges.",
        "",
        "  Hyperedges:",
        *listing,
        f"  Global Strategy: {_strategy_line(directive)}",
        "  Task: Identify indices of hyperedges that are redundant, internally incoherent, "
        'or conflict with the global strategy. Output indices or "NONE".',
    ]
    return "\n".join(lines)


def _optimizer_prompt(ctx: Any) -> str:
    statistics = _field(ctx, "statistics")
    items = list(statistics.items())
    if not items:
        raise TemplateError("statistics", "network statistics are empty")
    count = ctx.get("suggestion_count", 3) if isinstance(ctx, Mapping) else getattr(ctx, "suggestion_count", 3)
    choices = ", ".join(kind.value for kind in StrategyKind)
    lines = [
        "Analyze the current hypergraph state.",
        "",
        "  Network Statistics:",
        *(f"    {label}: {value}" for label, value in items),
        "  Task: Based on the analysis, choose one strategic directive that will most "
        "effectively improve the network's quality and realism.",
        "  Decision: Output corresponding optimization suggestions.",
        f"  Format: one of {choices}, then up to {count} entity IDs to focus on as a "
        "bracketed list.",
    ]
    return "\n".join(lines)


_BUILDERS = {
    AgentRole.GENERATOR: _generator_prompt,
    AgentRole.REVIEWER: _reviewer_prompt,
    AgentRole.REMOVER: _remover_prompt,
    AgentRole.OPTIMIZER: _optimizer_prompt,
}


def build_prompt(role: AgentRole, ctx: Any) -> tuple[str, str]:
    """
    Render the system and user text for one agent call.

    Args:
        role: Agent role.
        ctx: The role's context dataclass, or a mapping with the same fields.

    Returns:
        Tuple of (system text, user text). Equal contexts give identical text.

    Raises:
        TemplateError: If a field the template needs is missing or empty.
    """
    return SYSTEM_PROMPTS[role], _BUILDERS[role](ctx)


def _first_id_list(text: str) -> Optional[list[int]]:
    match = _ID_LIST.search(text) or _ID_RUN.search(text)
    if match is None:
        return None
    body = match.group(1) if match.re is _ID_LIST else match.group(0)
    return [int(tok) for tok in re.findall(r"\d+", body)]


def _parse_candidate(text: str, center: Optional[NodeId]) -> CandidateHyperedge:
    ids = _first_id_list(text)
    if not ids:
        raise ResponseParseError("no node list in generator reply")
    if center is None:
        center = ids[0]
    nodes = set(ids) | {center}
    if len(nodes) < 2:
        raise ResponseParseError(f"generator reply names only the center {center}")
    return CandidateHyperedge(frozenset(nodes), center, text.strip())


def _parse_verdict(text: str) -> ReviewDecision:
    found = {m.group(1).upper() for m in _VERDICT.finditer(text)}
    if found == {"APPROVE"}:
        return ReviewDecision(Verdict.APPROVE, text.strip())
    reason = text.strip() if found == {"REJECT"} else f"ambiguous verdict: {text.strip()[:200]}"
    return ReviewDecision(Verdict.REJECT, reason)


def _parse_removals(text: str) -> frozenset:
    ids = _first_id_list(text)
    if ids is not None:
        return frozenset(ids)
    if _NONE.search(text):
        return frozenset()
    loose = set(re.findall(r"\b\d+\b", text))
    if len(loose) != 1:
        logger.debug("Remover reply names no single edge, removing nothing: %r", text)
        return frozenset()
    return frozenset(int(tok) for tok in loose)


def _parse_directive(text: str) -> StrategyDirective:
    kinds = [kind for kind, pattern in _DIRECTIVES.items() if pattern.search(text)]
    kind = kinds[0] if len(kinds) == 1 else StrategyKind.MAINTAIN
    focus = _first_id_list(text) or []
    return StrategyDirective(kind, tuple(dict.fromkeys(focus)), text.strip())


def parse_response(role: AgentRole, text: str, center: Optional[NodeId] = None) -> RoleResult:
    """
    Turn a free-text agent reply into a structured decision.

    Generator replies yield the first bracketed or comma-separated id list,
    with the center forced in. Reviewer replies approve only on an
    unambiguous APPROVE. Remover replies yield an index list, empty for
    NONE and for prose that scatters several bare numbers. Optimizer
    replies yield the single directive named, MAINTAIN when none or several
    are named, plus an optional focus list.

    Args:
        role: Role that produced the reply.
        text: Reply text.
        center: Central entity of a generator request.

    Raises:
        ResponseParseError: If a generator reply has no usable node list.
    """
    if role is AgentRole.GENERATOR:
        return _parse_candidate(text, center)
    if role is AgentRole.REVIEWER:
        return _parse_verdict(text)
    if role is AgentRole.REMOVER:
        return _parse_removals(text)
    return _parse_directive(text)
