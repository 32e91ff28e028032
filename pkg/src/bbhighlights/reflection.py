"""Reflection stage: user preferences, top-K selection and clip manifest."""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .gamelog import EventKind, GameLog
from .scoring import ScoredPlay

DEFAULT_K = 60
PRE_ROLL_MS = 5_000
POST_ROLL_MS = 20_000


class Theme(str, enum.Enum):
    ANY = "Any"
    OFFENSE = "Offense"
    DEFENSE = "Defense"


THEME_KINDS = {
    Theme.OFFENSE: {EventKind.HIT, EventKind.HOME_RUN, EventKind.WALK, EventKind.STEAL},
    Theme.DEFENSE: {EventKind.OUT, EventKind.STRIKEOUT, EventKind.ERROR},
}


class UnknownPlayer(UserWarning):
    pass


@dataclass(frozen=True)
class Preferences:
    late_innings: frozenset = frozenset({8, 9})
    late_inning_points: int = 0
    key_players: frozenset = frozenset()
    key_player_points: int = 0
    theme: Theme = Theme.ANY
    k: int = DEFAULT_K

    def __post_init__(self):
        if self.late_inning_points < 0 or self.key_player_points < 0:
            raise ValueError("preference points must be non-negative")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        object.__setattr__(self, "late_innings", frozenset(self.late_innings))
        object.__setattr__(self, "key_players", frozenset(self.key_players))
        object.__setattr__(self, "theme", Theme(self.theme))

    @classmethod
    def from_dict(cls, data: dict | None) -> Preferences:
        data = dict(data or {})
        late = data.pop("late_inning_bonus", {}) or {}
        players = data.pop("key_players", {}) or {}
        kw = {}
        if "innings" in late:
            kw["late_innings"] = frozenset(late["innings"])
        if "points" in late:
            kw["late_inning_points"] = late["points"]
        if "names" in players:
            kw["key_players"] = frozenset(players["names"])
        if "points" in players:
            kw["key_player_points"] = players["points"]
        return cls(**kw, **data)


@dataclass(frozen=True)
class ChosenPlay:
    play_id: int
    final_score: int
    clip_start_ms: int | None = None
    clip_end_ms: int | None = None


@dataclass(frozen=True)
class HighlightSelection:
    game_id: str
    chosen: tuple[ChosenPlay, ...]
    k_requested: int
    k_effective: int

    @property
    def play_ids(self) -> list[int]:
        return [c.play_id for c in self.chosen]


def apply_preferences(scored: Sequence[ScoredPlay], log: GameLog, prefs: Preferences) -> list[ScoredPlay]:
    unknown = prefs.key_players - log.actors
    if unknown and prefs.key_player_points:
        warnings.warn(f"key player(s) not in game {log.game_id}: {', '.join(sorted(unknown))}",
                      UnknownPlayer, stacklevel=2)

    allowed = THEME_KINDS.get(prefs.theme)
    out = []
    for s in scored:
        play = log.play(s.play_id)
        bonus = 0
        if play.inning in prefs.late_innings:
            bonus += prefs.late_inning_points
        if play.actor is not None and play.actor in prefs.key_players:
            bonus += prefs.key_player_points
        eligible = s.eligible and (allowed is None or play.event_kind in allowed)
        out.append(s.with_preference(bonus, eligible) if (bonus or eligible != s.eligible) else s)
    return out


def select_top_k(scored: Sequence[ScoredPlay], k: int, game_id: str = "") -> HighlightSelection:
    """The k best eligible plays (ties to the earlier one), returned in play order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = sorted((i for i, s in enumerate(scored) if s.eligible),
                    key=lambda i: (-scored[i].final_score, i))
    picked = sorted(ranked[:k])
    chosen = tuple(ChosenPlay(scored[i].play_id, scored[i].final_score) for i in picked)
    return HighlightSelection(game_id, chosen, k, len(chosen))


def clip_windows(timestamps: Sequence[int], chosen_idx: Sequence[int], pre_roll_ms: int = PRE_ROLL_MS,
                 post_roll_ms: int = POST_ROLL_MS) -> list[tuple[int, int]]:
    """Clip (start, end) for each chosen play index into ``timestamps``.

    A clip ends at the next play's start (or after the post-roll, whichever
    is first) and never runs into the next chosen clip.
    """
    starts = [max(0, timestamps[i] - pre_roll_ms) for i in chosen_idx]
    windows = []
    for n, i in enumerate(chosen_idx):
        end = timestamps[i] + post_roll_ms
        if i + 1 < len(timestamps):
            end = min(end, timestamps[i + 1])
        if n + 1 < len(chosen_idx):
            end = min(end, starts[n + 1])
        windows.append((starts[n], max(starts[n], end)))
    return windows


def emit_manifest(selection: HighlightSelection, log: GameLog, pre_roll_ms: int = PRE_ROLL_MS,
                  post_roll_ms: int = POST_ROLL_MS) -> tuple[HighlightSelection, dict]:
    """Attach clip windows to ``selection`` and build the manifest document."""
    idx = sorted(log.position(c.play_id) for c in selection.chosen)
    timestamps = [p.timestamp_ms for p in log.plays]
    windows = clip_windows(timestamps, idx, pre_roll_ms, post_roll_ms)
    by_id = {c.play_id: c for c in selection.chosen}

    chosen = []
    clips = []
    for i, (start, end) in zip(idx, windows):
        play = log.plays[i]
        c = replace(by_id[play.id], clip_start_ms=start, clip_end_ms=end)
        chosen.append(c)
        clips.append({
            "play_id": play.id,
            "clip_start_ms": start,
            "clip_end_ms": end,
            "result": play.result,
            "final_score": c.final_score,
        })
    selection = replace(selection, chosen=tuple(chosen))
    return selection, {"game_id": log.game_id, "clips": clips}


def selection_record(selection: HighlightSelection) -> dict:
    return {
        "game_id": selection.game_id,
        "k_requested": selection.k_requested,
        "k_effective": selection.k_effective,
        "chosen": [
            {"play_id": c.play_id, "final_score": c.final_score,
             "clip_start_ms": c.clip_start_ms, "clip_end_ms": c.clip_end_ms}
            for c in selection.chosen
        ],
    }


def dump_json(doc, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def load_selection_ids(path) -> set[int]:
    """Play ids from a selection file, a manifest, or a bare JSON id list."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(doc, list):
        return {int(x) for x in doc}
    if "chosen" in doc:
        return {int(c["play_id"]) for c in doc["chosen"]}
    if "clips" in doc:
        return {int(c["play_id"]) for c in doc["clips"]}
    if "play_ids" in doc:
        return {int(x) for x in doc["play_ids"]}
    raise ValueError(f"{path}: no play ids found")
