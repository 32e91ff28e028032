"""Language-model backends.

Both backends answer a :class:`ChatRequest` with the raw reply text; all
parsing and schema enforcement happens in :mod:`bbhighlights.llm.calls`.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass
from typing import Any, Callable, Protocol

import httpx

from ..errors import BackendUnavailable
from ..gamelog import parse_inning
from .config import BackendKind, LLMRequestConfig, Task

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChatRequest:
    task: Task
    prompt: str
    payload: Any
    config: LLMRequestConfig


class Backend(Protocol):
    kind: BackendKind
    deterministic: bool

    def complete(self, request: ChatRequest) -> str: ...


# ---------------------------------------------------------------------------
# importance bands, shared by the mock and by clamping
# ---------------------------------------------------------------------------

HIGH_BAND = (40, 60)
MODERATE_BAND = (20, 39)
LOW_BAND = (1, 19)

MOMENTUM_KEYWORDS = ("momentum", "turning point", "clutch")
LATE_INNING = 7


def importance_band(wpa: float) -> tuple[int, int]:
    """Score band for a play, keyed on absolute WPA with left-closed cut points."""
    magnitude = abs(wpa)
    if magnitude >= 0.15:
        return HIGH_BAND
    if magnitude >= 0.05:
        return MODERATE_BAND
    return LOW_BAND


def has_momentum(text: str) -> bool:
    text = text.lower()
    return any(k in text for k in MOMENTUM_KEYWORDS)


# ---------------------------------------------------------------------------
# deterministic mock
# ---------------------------------------------------------------------------

def _stage_phrase(inning: int) -> str:
    if inning >= 8:
        return "late in the game"
    if inning >= 4:
        return "in the middle innings"
    return "early in the game"


def mock_analysis(wpa: float, inning_text: str) -> str:
    _, inning = parse_inning(inning_text)
    if wpa > 0:
        side = "improved the home team's chances of winning"
    elif wpa < 0:
        side = "benefited the away team"
    else:
        side = "left the win probability unchanged"
    size = f"{abs(wpa):.3f}"
    stage = _stage_phrase(inning)
    band = importance_band(wpa)

    if band is HIGH_BAND:
        return (f"A major swing of {size} in win probability that {side}. "
                f"Coming {stage} ({inning_text}), it is a clear momentum shift and a turning point.")
    if band is MODERATE_BAND:
        return (f"A meaningful change of {size} in win probability that {side}, "
                f"building momentum {stage} ({inning_text}).")
    if inning >= 8 and wpa != 0:
        return (f"Only a small change of {size} that {side}, but {stage} ({inning_text}) "
                f"every out and baserunner carries clutch weight.")
    return (f"A routine play with a small change of {size} that {side} {stage} ({inning_text}); "
            f"it added to the ebb and flow of the game.")


def mock_transform_score(wpa: float, inning_text: str) -> int:
    lo, hi = importance_band(wpa)
    _, inning = parse_inning(inning_text)
    score = (lo + hi) // 2
    if inning >= LATE_INNING:
        score += 5
    return max(lo, min(hi, score))


def mock_adjustment(analysis: str) -> int:
    return 10 if has_momentum(analysis) else 2


class MockBackend:
    """Rule-based stand-in for the language model; a pure function of the request payload."""

    kind = BackendKind.MOCK
    deterministic = True

    def complete(self, request: ChatRequest) -> str:
        p = request.payload
        if request.task is Task.WPA_ANALYSIS:
            out: Any = {"id": p["id"], "WPA_analysis": mock_analysis(p["WPA"], p["inning"])}
        elif request.task is Task.WPA_TRANSFORM:
            out = []
            for play in p["plays"]:
                score = mock_transform_score(play["WPA"], play["inning info"])
                out.append({
                    "id": play["id"],
                    "score": score,
                    "rationale": f"|WPA| {abs(play['WPA']):.3f} in the {play['inning info']}",
                })
        elif request.task is Task.SCORE_ADJUST:
            out = []
            for play in p["plays"]:
                bump = mock_adjustment(play["WPA analysis"])
                out.append({
                    "id": play["id"],
                    "score": play["score"] + bump,
                    "rationale": f"base {play['score']} +{bump} for "
                                 + ("momentum" if bump > 2 else "minor context"),
                })
        else:
            raise ValueError(f"unknown task {request.task}")
        return json.dumps(out, ensure_ascii=False, sort_keys=True)


# ---------------------------------------------------------------------------
# HTTP chat-completion client
# ---------------------------------------------------------------------------

_RETRY_STATUS = {408, 409, 425, 429, 500, 502, 503, 504}


class HttpChatBackend:
    """Client for an OpenAI-style ``/chat/completions`` endpoint.

    Transport errors and retryable statuses are re-sent with exponential
    backoff, up to ``config.max_retries`` extra attempts.
    """

    kind = BackendKind.HTTP
    deterministic = False

    def __init__(self, config: LLMRequestConfig, *, api_key: str | None = None,
                 client: httpx.Client | None = None, sleep: Callable[[float], None] = time.sleep,
                 backoff_base: float = 0.5):
        self.endpoint = config.endpoint or os.environ.get("LLM_ENDPOINT")
        if not self.endpoint:
            raise BackendUnavailable("no endpoint configured (set LLM_ENDPOINT)")
        self.api_key = api_key if api_key is not None else os.environ.get("LLM_API_KEY")
        self.config = config
        self.client = client or httpx.Client(timeout=config.timeout_ms / 1000)
        self.sleep = sleep
        self.backoff_base = backoff_base

    def request_body(self, request: ChatRequest) -> dict:
        cfg = request.config
        return {
            "model": cfg.model_name,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": cfg.temperature,
            "top_p": cfg.top_p,
            "max_tokens": cfg.max_tokens,
        }

    def complete(self, request: ChatRequest) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = self.request_body(request)
        last_error = "no attempt made"
        for attempt in range(request.config.max_retries + 1):
            if attempt:
                self.sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                resp = self.client.post(self.endpoint, json=body, headers=headers,
                                        timeout=request.config.timeout_ms / 1000)
            except httpx.HTTPError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                log.warning("LLM request failed (attempt %d): %s", attempt + 1, last_error)
                continue
            if resp.status_code in _RETRY_STATUS:
                last_error = f"HTTP {resp.status_code}"
                log.warning("LLM request got %s (attempt %d)", last_error, attempt + 1)
                continue
            if resp.status_code >= 400:
                raise BackendUnavailable(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError):
                raise BackendUnavailable("malformed completion response") from None
        raise BackendUnavailable(f"LLM endpoint unreachable after retries ({last_error})")


def make_backend(kind, config: LLMRequestConfig, **kw) -> Backend:
    kind = BackendKind(kind)
    if kind is BackendKind.MOCK:
        return MockBackend()
    return HttpChatBackend(config, **kw)
