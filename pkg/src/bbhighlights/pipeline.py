"""End-to-end orchestration of the three stages for one game."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .errors import ChainBreak
from .evaluation import Selector, wpa_baseline_select
from .gamelog import GameLog, ValidationIssue, validate_log
from .llm import Backend, LLMRequestConfig
from .reflection import (
    POST_ROLL_MS,
    PRE_ROLL_MS,
    HighlightSelection,
    Preferences,
    apply_preferences,
    emit_manifest,
    select_top_k,
)
from .sabermetrics import AnnotatedPlay, WETable, annotate_game
from .scoring import ScoredPlay, decide

log = logging.getLogger(__name__)


class StageError(Exception):
    """Wraps a failure with the pipeline stage it happened in."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


@dataclass(frozen=True)
class PipelineResult:
    game: GameLog
    issues: tuple[ValidationIssue, ...]
    annotated: tuple[AnnotatedPlay, ...]
    scored: tuple[ScoredPlay, ...]
    selection: HighlightSelection
    manifest: dict


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def prepare(game: GameLog, table: WETable) -> tuple[list[ValidationIssue], list[AnnotatedPlay]]:
    issues = validate_log(game)
    for issue in issues:
        log.warning("%s: %s at play index %d: %s", game.game_id, issue.kind, issue.index, issue.message)
    breaks = [i for i in issues if i.kind == "ChainBreak"]
    if breaks:
        raise ChainBreak(f"game {game.game_id}: {len(breaks)} state chain break(s), first at index {breaks[0].index}")
    return issues, annotate_game(table, game)


def run_game(game: GameLog, table: WETable, backend: Backend, config: LLMRequestConfig,
             prefs: Preferences = Preferences(), *, prompt_dir=None, reflect: bool = True,
             pre_roll_ms: int = PRE_ROLL_MS, post_roll_ms: int = POST_ROLL_MS) -> PipelineResult:
    """Preparation, decision and reflection for one game.

    With ``reflect=False`` preferences are skipped and the top-K is taken
    directly from the decision-stage scores.
    """
    issues, annotated = _stage("prepare", prepare, game, table)
    scored = _stage("decide", decide, annotated, backend, config, prompt_dir)
    if reflect:
        scored = _stage("reflect", apply_preferences, scored, game, prefs)
    selection = _stage("select", select_top_k, scored, prefs.k, game.game_id)
    selection, manifest = _stage("manifest", emit_manifest, selection, game, pre_roll_ms, post_roll_ms)
    return PipelineResult(game, tuple(issues), tuple(annotated), tuple(scored), selection, manifest)


def make_wpa_selector(table: WETable) -> Selector:
    cache: dict = {}

    def select(game: GameLog, k: int):
        if game.game_id not in cache:
            cache[game.game_id] = annotate_game(table, game)
        return wpa_baseline_select(cache[game.game_id], k)

    return select


def make_pipeline_selector(table: WETable, backend: Backend, config: LLMRequestConfig,
                           prefs: Preferences = Preferences(), *, prompt_dir=None,
                           reflect: bool = True) -> Selector:
    """Selector for K sweeps; scores each game once and re-cuts it per k."""
    cache: dict = {}

    def select(game: GameLog, k: int):
        if game.game_id not in cache:
            _, annotated = prepare(game, table)
            scored = decide(annotated, backend, config, prompt_dir)
            if reflect:
                scored = apply_preferences(scored, game, prefs)
            cache[game.game_id] = scored
        return set(select_top_k(cache[game.game_id], k, game.game_id).play_ids)

    return select


def score_games(games: Sequence[GameLog], table: WETable, backend: Backend, config: LLMRequestConfig,
                prefs: Preferences = Preferences(), **kw) -> dict:
    return {g.game_id: run_game(g, table, backend, config, prefs, **kw) for g in games}
