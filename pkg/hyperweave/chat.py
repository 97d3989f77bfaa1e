"""OpenAI-compatible chat-completions transport and the remote agent backend."""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence, Union

import httpx
from tenacity import (RetryCallState, Retrying, retry_if_exception_type,
                      stop_after_attempt, wait_exponential)

from hyperweave.agents import (SKIPPABLE_ERRORS, AgentRole, GeneratorContext, RoleContext,
                               RoleResult)
from hyperweave.errors import CredentialError, ProtocolError, TransportError
from hyperweave.prompts import build_prompt, parse_response

logger = logging.getLogger(__name__)

ENV_API_KEY = "HYPERLLM_API_KEY"
COMPLETIONS_PATH = "/v1/chat/completions"


@dataclass(frozen=True)
class BackendConfig:
    """
    Remote endpoint settings.

    Attributes:
        base_url: Endpoint root; requests go to ``{base_url}/v1/chat/completions``.
        model: Model name sent with each request.
        api_key: Credential; read from HYPERLLM_API_KEY when absent.
        temperature: Sampling temperature.
        request_timeout: Per-request timeout in seconds.
        max_retries: Retries after the first attempt on transient failures.
        backoff_base: First backoff wait in seconds, doubled per retry.
        backoff_cap: Longest backoff wait in seconds.
        max_in_flight: Concurrent requests allowed by chat_complete_many.
    """

    base_url: str
    model: str
    api_key: Optional[str] = None
    temperature: float = 0.0
    request_timeout: float = 60.0
    max_retries: int = 4
    backoff_base: float = 1.0
    backoff_cap: float = 30.0
    max_in_flight: int = 4

    @classmethod
    def from_config(cls, config: Any) -> "BackendConfig":
        return cls(
            base_url=config.base_url,
            model=config.model,
            temperature=config.temperature,
            request_timeout=config.request_timeout,
            max_retries=config.max_retries,
            backoff_base=config.backoff_base,
            backoff_cap=config.backoff_cap,
            max_in_flight=config.max_in_flight,
        )

    def resolve_api_key(self) -> str:
        key = self.api_key or os.environ.get(ENV_API_KEY, "")
        if not key.strip():
            raise CredentialError(f"no credential: set {ENV_API_KEY}")
        return key.strip()

    @property
    def url(self) -> str:
        return self.base_url.rstrip("/") + COMPLETIONS_PATH

    def __repr__(self) -> str:
        return f"BackendConfig(base_url={self.base_url!r}, model={self.model!r})"


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str


@dataclass(frozen=True)
class ChatRequest:
    """
    One chat-completion request: a system message followed by user messages.

    Raises:
        ValueError: If the first message is not the only system message or
            any content is empty.
    """

    model: str
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        roles = [m.role for m in self.messages]
        if not roles or roles[0] != "system" or roles.count("system") != 1:
            raise ValueError("a chat request needs exactly one system message, first")
        if any(r not in ("system", "user") for r in roles):
            raise ValueError(f"unsupported message roles: {roles}")
        if any(not m.content.strip() for m in self.messages):
            raise ValueError("message content must not be empty")

    @classmethod
    def from_prompt(
        cls, model: str, system: str, user: str, temperature: float = 0.0, seed: Optional[int] = None
    ) -> "ChatRequest":
        return cls(model, (ChatMessage("system", system), ChatMessage("user", user)), temperature, seed)

    def payload(self) -> dict[str, Any]:
        body: dict[str, Any] = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in self.messages],
            "temperature": self.temperature,
        }
        if self.seed is not None:
            body["seed"] = self.seed
        return body


@dataclass(frozen=True)
class ChatResponse:
    content: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    total_tokens: int = 0


class _RetryableStatus(Exception):
    def __init__(self, status_code: int):
        super().__init__(f"HTTP {status_code}")
        self.status_code = status_code


def _post_once(client: httpx.Client, url: str, headers: dict, body: dict) -> httpx.Response:
    response = client.post(url, headers=headers, json=body)
    status = response.status_code
    if status in (401, 403):
        raise CredentialError(f"credential rejected (HTTP {status})")
    if status == 429 or status >= 500:
        raise _RetryableStatus(status)
    if status >= 400:
        raise TransportError(f"HTTP {status}: {response.text[:200]}")
    return response


def _log_retry(state: RetryCallState) -> None:
    exc = state.outcome.exception() if state.outcome else None
    wait = state.next_action.sleep if state.next_action else 0.0
    logger.warning("Chat request attempt %d failed (%s), retrying in %.1fs",
                   state.attempt_number, exc, wait)


def _parse_body(response: httpx.Response) -> ChatResponse:
    try:
        data = response.json()
        content = data["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise ProtocolError(f"not a chat completion: {exc}") from exc
    if not isinstance(content, str) or not content.strip():
        raise ProtocolError("chat completion has no message content")
    usage = data.get("usage") or {}
    try:
        return ChatResponse(
            content=content,
            prompt_tokens=int(usage.get("prompt_tokens", 0) or 0),
            completion_tokens=int(usage.get("completion_tokens", 0) or 0),
            total_tokens=int(usage.get("total_tokens", 0) or 0),
        )
    except (AttributeError, TypeError, ValueError) as exc:
        raise ProtocolError(f"unreadable token usage: {exc}") from exc


def chat_complete(
    config: BackendConfig,
    request: ChatRequest,
    client: Optional[httpx.Client] = None,
    sleep: Callable[[float], None] = time.sleep,
) -> ChatResponse:
    """
    Send one chat-completion request.

    HTTP 429, 5xx, timeouts and connection failures are retried with
    exponential backoff up to ``config.max_retries`` times.

    Args:
        config: Endpoint settings.
        request: Request to send.
        client: HTTP client to reuse; a private one is opened otherwise.
        sleep: Wait function between retries.

    Returns:
        First-choice message content with token usage.

    Raises:
        CredentialError: Missing credential (before any request) or HTTP 401/403.
        TransportError: Non-retryable status or exhausted retries.
        ProtocolError: Response body is not a chat completion.
    """
    api_key = config.resolve_api_key()
    headers = {"Authorization": f"Bearer {api_key}", "Content-Type": "application/json"}
    retrying = Retrying(
        stop=stop_after_attempt(config.max_retries + 1),
        wait=wait_exponential(multiplier=config.backoff_base, max=config.backoff_cap),
        retry=retry_if_exception_type((_RetryableStatus, httpx.TransportError)),
        before_sleep=_log_retry,
        sleep=sleep,
        reraise=True,
    )
    owned = client is None
    if client is None:
        client = httpx.Client(timeout=config.request_timeout)
    try:
        response = retrying(_post_once, client, config.url, headers, request.payload())
    except (_RetryableStatus, httpx.TransportError) as exc:
        raise TransportError(
            f"giving up after {config.max_retries + 1} attempts: {exc}"
        ) from exc
    finally:
        if owned:
            client.close()
    logger.debug("Chat request to %s succeeded", config.url)
    return _parse_body(response)


def chat_complete_many(
    config: BackendConfig,
    requests: Sequence[ChatRequest],
    client: Optional[httpx.Client] = None,
    sleep: Callable[[float], None] = time.sleep,
) -> list[ChatResponse]:
    """
    Send requests with at most ``config.max_in_flight`` in flight.

    Returns:
        Responses in request order, whatever the completion order.

    Raises:
        BackendError: The failure of the lowest-indexed failed request,
            after every request has finished.
    """
    config.resolve_api_key()
    if not requests:
        return []
    owned = client is None
    if client is None:
        client = httpx.Client(timeout=config.request_timeout)
    try:
        with ThreadPoolExecutor(max_workers=max(1, config.max_in_flight)) as pool:
            futures = [pool.submit(chat_complete, config, r, client, sleep) for r in requests]
            outcomes = [f.exception() or f.result() for f in futures]
    finally:
        if owned:
            client.close()
    for outcome in outcomes:
        if isinstance(outcome, BaseException):
            raise outcome
    return outcomes


class Transcript:
    """Append-only JSON-lines record of remote exchanges, one object per line."""

    def __init__(self, path: Union[str, os.PathLike]):
        self.path = path
        self._lock = threading.Lock()
        self._count = 0
        with open(self.path, "w", encoding="utf-8"):
            pass

    def append(self, record: dict[str, Any]) -> None:
        with self._lock:
            entry = {"id": self._count, **record}
            self._count += 1
            with open(self.path, "a", encoding="utf-8", newline="\n") as f:
                f.write(json.dumps(entry, sort_keys=True) + "\n")


class RemoteBackend:
    """Agent backend that prompts a chat-completions endpoint and parses the replies."""

    def __init__(
        self,
        config: BackendConfig,
        seed: Optional[int] = None,
        transcript: Optional[Transcript] = None,
        client: Optional[httpx.Client] = None,
    ):
        self.config = config
        self.seed = seed
        self.transcript = transcript
        self.client = client

    def _request(self, role: AgentRole, ctx: RoleContext) -> ChatRequest:
        system, user = build_prompt(role, ctx)
        return ChatRequest.from_prompt(
            self.config.model, system, user, self.config.temperature, self.seed
        )

    def _record(self, role: AgentRole, request: ChatRequest, response: ChatResponse) -> None:
        if self.transcript is None:
            return
        self.transcript.append({
            "role": role.value,
            "request": request.payload(),
            "response": response.content,
            "usage": {
                "prompt_tokens": response.prompt_tokens,
                "completion_tokens": response.completion_tokens,
                "total_tokens": response.total_tokens,
            },
        })

    def decide(self, role: AgentRole, ctx: RoleContext) -> RoleResult:
        outcome = self.decide_many(role, [ctx])[0]
        if isinstance(outcome, Exception):
            raise outcome
        return outcome

    def decide_many(self, role: AgentRole, contexts: Sequence[RoleContext]) -> list:
        """
        Ask for one decision per context, concurrently up to the in-flight cap.

        Returns:
            Parsed decisions in context order; an unparsable reply appears
            as its exception instead of a decision.

        Raises:
            BackendError: If any request fails at the transport level.
        """
        requests = [self._request(role, ctx) for ctx in contexts]
        responses = chat_complete_many(self.config, requests, client=self.client)
        outcomes: list = []
        for ctx, request, response in zip(contexts, requests, responses):
            self._record(role, request, response)
            center = ctx.center.id if isinstance(ctx, GeneratorContext) else None
            try:
                outcomes.append(parse_response(role, response.content, center=center))
            except SKIPPABLE_ERRORS as exc:
                logger.warning("Discarding %s reply: %s", role.value, exc)
                outcomes.append(exc)
        return outcomes
