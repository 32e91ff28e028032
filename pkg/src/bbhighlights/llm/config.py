from __future__ import annotations

import enum
from dataclasses import dataclass


class BackendKind(str, enum.Enum):
    HTTP = "http"
    MOCK = "mock"


class Task(str, enum.Enum):
    WPA_ANALYSIS = "wpa_analysis"
    WPA_TRANSFORM = "wpa_transform"
    SCORE_ADJUST = "score_adjust"


@dataclass(frozen=True)
class LLMRequestConfig:
    """Decoding and transport settings for every language-model request.

    Defaults are greedy-ish decoding (temperature 0, nucleus 0.1) with a
    10,000 token completion cap.
    """

    temperature: float = 0.0
    top_p: float = 0.1
    max_tokens: int = 10_000
    model_name: str = "default"
    endpoint: str | None = None
    timeout_ms: int = 120_000
    max_retries: int = 2
    concurrency: int = 4
    batch_size: int = 40

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.concurrency < 1 or self.batch_size < 1:
            raise ValueError("concurrency and batch_size must be >= 1")

    @classmethod
    def from_dict(cls, data: dict | None) -> LLMRequestConfig:
        return cls(**(data or {}))
