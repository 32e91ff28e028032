"""Language-model boundary: prompts, backends and schema-checked calls."""

from .backends import (
    Backend,
    ChatRequest,
    HttpChatBackend,
    MockBackend,
    importance_band,
    make_backend,
)
from .calls import (
    ContextAnalysis,
    ScoreResponse,
    adjust_scores,
    analyze_wpa,
    transform_wpa_scores,
    validate_response,
)
from .config import BackendKind, LLMRequestConfig, Task
from .prompts import render_prompt

__all__ = [
    "Backend", "BackendKind", "ChatRequest", "ContextAnalysis", "HttpChatBackend",
    "LLMRequestConfig", "MockBackend", "ScoreResponse", "Task", "adjust_scores",
    "analyze_wpa", "importance_band", "make_backend", "render_prompt",
    "transform_wpa_scores", "validate_response",
]
