"""Schema-checked language-model calls.

Every reply is parsed and checked for exact id coverage and field types.
Non-deterministic backends get ``config.max_retries`` re-issues on a
schema violation; deterministic ones fail straight away since a re-issue
would return the same bytes.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import SchemaViolation
from .backends import Backend, ChatRequest, importance_band
from .config import LLMRequestConfig, Task
from .prompts import render_prompt

log = logging.getLogger(__name__)

ANALYSIS_FIELDS = {"WPA_analysis": str}
SCORE_FIELDS = {"score": int, "rationale": str}

ADJUST_MIN = 1
ADJUST_MAX = 20


@dataclass(frozen=True)
class ContextAnalysis:
    play_id: int
    wpa_analysis: str


@dataclass(frozen=True)
class ScoreResponse:
    play_id: int
    score: int
    rationale: str
    flagged: bool = False


_FENCE = re.compile(r"^\s*```[a-zA-Z]*\s*\n(.*?)\n?```\s*$", re.S)


def _loads(raw: str):
    m = _FENCE.match(raw)
    text = m.group(1) if m else raw
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    # tolerate chatter around the JSON body
    starts = [i for i in (text.find("["), text.find("{")) if i >= 0]
    if starts:
        start = min(starts)
        end = max(text.rfind("]"), text.rfind("}"))
        if end > start:
            try:
                return json.loads(text[start:end + 1])
            except json.JSONDecodeError:
                pass
    raise SchemaViolation("reply is not valid JSON")


def _coerce(value, kind, name, play_id):
    if kind is int:
        if isinstance(value, bool):
            raise SchemaViolation(f"play {play_id}: field {name!r} must be an integer", field=name)
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if not isinstance(value, int):
            raise SchemaViolation(f"play {play_id}: field {name!r} must be an integer, got {value!r}",
                                  field=name)
        return value
    if not isinstance(value, kind):
        raise SchemaViolation(f"play {play_id}: field {name!r} must be {kind.__name__}", field=name)
    if kind is str and not value.strip():
        raise SchemaViolation(f"play {play_id}: field {name!r} is empty", field=name)
    return value


def validate_response(raw: str, expected_ids: Iterable[int], fields: dict = SCORE_FIELDS) -> list[dict]:
    """Parse a reply and check it covers exactly ``expected_ids``.

    A bare object is accepted as a one-element array. Returns the records
    in reply order with typed fields.
    """
    data = _loads(raw)
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise SchemaViolation("reply must be a JSON object or array")

    records = []
    seen: list[int] = []
    for rec in data:
        if not isinstance(rec, dict):
            raise SchemaViolation("array element is not an object")
        if "id" not in rec:
            raise SchemaViolation("record without 'id'", field="id")
        pid = _coerce(rec["id"], int, "id", rec.get("id"))
        out = {"id": pid}
        for name, kind in fields.items():
            if name not in rec:
                raise SchemaViolation(f"play {pid}: missing field {name!r}", field=name)
            out[name] = _coerce(rec[name], kind, name, pid)
        seen.append(pid)
        records.append(out)

    expected = set(expected_ids)
    got = set(seen)
    missing, extra = expected - got, got - expected
    if missing or extra:
        raise SchemaViolation(
            f"id coverage mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}",
            missing=missing, extra=extra)
    if len(seen) != len(got):
        dupes = sorted({i for i in seen if seen.count(i) > 1})
        raise SchemaViolation(f"duplicate ids in reply: {dupes}", extra=dupes)
    return records


def request_validated(backend: Backend, task: Task, payload: dict, expected_ids, fields: dict,
                      config: LLMRequestConfig, prompt_dir=None) -> list[dict]:
    prompt = render_prompt(task, payload, prompt_dir)
    request = ChatRequest(task, prompt, payload, config)
    attempts = 1 if backend.deterministic else config.max_retries + 1
    for attempt in range(attempts):
        raw = backend.complete(request)
        try:
            return validate_response(raw, expected_ids, fields)
        except SchemaViolation as exc:
            if attempt + 1 == attempts:
                raise
            log.warning("%s reply rejected (attempt %d/%d): %s", task.value, attempt + 1, attempts, exc)
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# the three stages
# ---------------------------------------------------------------------------

def analysis_payload(play, window: Sequence, wpa: float) -> dict:
    return {
        "id": play.id,
        "result": play.result,
        "inning": play.state_before.inning_text,
        "WPA": wpa,
        "previous_plays": [{"id": p.id, "result": p.result} for p in window],
    }


def analyze_wpa(backend: Backend, play, window: Sequence, wpa: float, config: LLMRequestConfig,
                prompt_dir=None) -> ContextAnalysis:
    payload = analysis_payload(play, window, wpa)
    (rec,) = request_validated(backend, Task.WPA_ANALYSIS, payload, {play.id}, ANALYSIS_FIELDS,
                               config, prompt_dir)
    return ContextAnalysis(rec["id"], rec["WPA_analysis"])


def _batches(items: Sequence, size: int):
    for i in range(0, len(items), size):
        yield items[i:i + size]


def transform_wpa_scores(backend: Backend, plays: Sequence[dict], config: LLMRequestConfig,
                         prompt_dir=None) -> list[ScoreResponse]:
    """Base highlight score (1-60) per play.

    ``plays`` items carry ``id``, ``result``, ``inning`` (text) and ``wpa``.
    Replies outside the band implied by |wpa| are clamped into it and
    flagged.
    """
    if not plays:
        raise ValueError("no plays to score")
    by_id = {}
    for batch in _batches(list(plays), config.batch_size):
        payload = {"plays": [
            {"id": p["id"], "result": p["result"], "inning info": p["inning"], "WPA": p["wpa"]}
            for p in batch
        ]}
        for rec in request_validated(backend, Task.WPA_TRANSFORM, payload, {p["id"] for p in batch},
                                     SCORE_FIELDS, config, prompt_dir):
            by_id[rec["id"]] = rec

    out = []
    for p in plays:
        rec = by_id[p["id"]]
        lo, hi = importance_band(p["wpa"])
        score = max(lo, min(hi, rec["score"]))
        flagged = score != rec["score"]
        if flagged:
            log.info("play %s: base score %s outside band %s-%s, clamped", p["id"], rec["score"], lo, hi)
        out.append(ScoreResponse(p["id"], score, rec["rationale"], flagged))
    return out


def adjust_scores(backend: Backend, plays: Sequence[dict], config: LLMRequestConfig,
                  prompt_dir=None) -> list[ScoreResponse]:
    """Context-adjusted score per play; the increase is clamped to +1..+20.

    ``plays`` items carry ``id``, ``base_score`` and ``wpa_analysis``, and
    optionally ``result`` and ``inning`` for the prompt.
    """
    if not plays:
        raise ValueError("no plays to adjust")
    by_id = {}
    for batch in _batches(list(plays), config.batch_size):
        payload = {"plays": [
            {"id": p["id"], "result": p.get("result", ""), "inning info": p.get("inning", ""),
             "score": p["base_score"], "WPA analysis": p["wpa_analysis"]}
            for p in batch
        ]}
        for rec in request_validated(backend, Task.SCORE_ADJUST, payload, {p["id"] for p in batch},
                                     SCORE_FIELDS, config, prompt_dir):
            by_id[rec["id"]] = rec

    out = []
    for p in plays:
        rec = by_id[p["id"]]
        base = p["base_score"]
        delta = rec["score"] - base
        clamped = max(ADJUST_MIN, min(ADJUST_MAX, delta))
        flagged = clamped != delta
        if flagged:
            log.info("play %s: adjustment %+d outside +1..+20, clamped to %+d", p["id"], delta, clamped)
        out.append(ScoreResponse(p["id"], base + clamped, rec["rationale"], flagged))
    return out
