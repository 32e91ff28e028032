"""Win expectancy tables, WPA and leverage.

Win expectancy is always from the home team's side. Table values are
snapped to multiples of 2**-53 on lookup: on [0.5, 1] that is the float
itself, below 0.5 it moves the value by at most 1.1e-16. Every difference
and partial sum of such values is exactly representable, so per-game WPA
telescopes without rounding.
"""

from __future__ import annotations

import json
import math
import os
import threading
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ChainBreak, EmptyCorpus, IncompleteGame, ZeroDenominator
from .gamelog import INITIAL_STATE, GameLog, GameState, Half, Play

SCORE_DIFF_CLAMP = 10
_GRID = 2 ** 53

TERMINAL_WE = {"HomeWin": 1.0, "AwayWin": 0.0, "Tie": 0.5}


@dataclass(frozen=True, order=True)
class StateKey:
    inning_bucket: int
    half: Half
    outs: int
    runner_state: int
    score_diff_bucket: int

    @classmethod
    def of(cls, state: GameState, max_inning_bucket: int = 9) -> StateKey:
        diff = max(-SCORE_DIFF_CLAMP, min(SCORE_DIFF_CLAMP, state.score_diff))
        return cls(min(state.inning, max_inning_bucket), state.half, state.outs, state.runner_state, diff)


@dataclass(frozen=True)
class Entry:
    wins: int
    total: int

    @property
    def we(self) -> float:
        return quantized_ratio(self.wins, self.total)


def quantized_ratio(wins: int, total: int) -> float:
    """wins/total rounded to the nearest multiple of 2**-53."""
    k = (2 * wins * _GRID + total) // (2 * total)
    return k / _GRID


@dataclass(frozen=True)
class WETable:
    entries: dict
    avg_abs_dwe: float
    metadata: dict
    fallback: str = "nearest"
    misses: Counter = field(default_factory=Counter, compare=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, repr=False)

    @property
    def max_inning_bucket(self) -> int:
        return self.metadata["max_inning_bucket"]

    def key(self, state: GameState) -> StateKey:
        return StateKey.of(state, self.max_inning_bucket)

    def _record_miss(self, kind: str) -> None:
        with self._lock:
            self.misses[kind] += 1

    @property
    def miss_count(self) -> int:
        return sum(self.misses.values())


# ---------------------------------------------------------------------------
# table construction
# ---------------------------------------------------------------------------

def _check_complete(game: GameLog) -> None:
    if not game.plays or not game.plays[-1].is_terminal:
        raise IncompleteGame(f"game {game.game_id} lacks a terminal play")


def count_states(corpus: Sequence[GameLog], max_inning_bucket: int = 9) -> dict:
    """Per-game visit and home-win counts for every pre-play state."""
    counts: dict = {}
    for game in corpus:
        home_won = game.outcome == "HomeWin"
        for key in {StateKey.of(p.state_before, max_inning_bucket) for p in game.plays}:
            wins, total = counts.get(key, (0, 0))
            counts[key] = (wins + home_won, total + 1)
    return {k: Entry(w, t) for k, (w, t) in counts.items()}


def build_we_table(corpus: Sequence[GameLog], max_inning_bucket: int = 9,
                   fallback: str = "nearest") -> WETable:
    """Build a win-expectancy table from complete historical games.

    ``N_s`` counts games that passed through state ``s`` (a game that sits
    in one state for several plays counts once) and ``W_s`` the subset the
    home team won. The mean absolute WE swing over every corpus play is
    computed in a second pass with the finished table, using the same
    fallback and terminal rules as :func:`annotate_game`.
    """
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus()
    for game in corpus:
        _check_complete(game)

    entries = count_states(corpus, max_inning_bucket)
    metadata = {
        "corpus_size": len(corpus),
        "built_at": os.environ.get("SOURCE_DATE_EPOCH"),
        "max_inning_bucket": max_inning_bucket,
    }
    draft = WETable(entries, 0.0, metadata, fallback)
    swings = [abs(wpa) for game in corpus for _, _, wpa in _chained_values(draft, game)]
    avg = math.fsum(swings) / len(swings)
    return WETable(entries, avg, metadata, fallback)


# ---------------------------------------------------------------------------
# lookups
# ---------------------------------------------------------------------------

def _nearest(table: WETable, key: StateKey) -> float | None:
    wins = total = 0
    best = None
    for diff in range(-SCORE_DIFF_CLAMP, SCORE_DIFF_CLAMP + 1):
        entry = table.entries.get(StateKey(key.inning_bucket, key.half, key.outs, key.runner_state, diff))
        if entry is None:
            continue
        dist = abs(diff - key.score_diff_bucket)
        if best is None or dist < best:
            best, wins, total = dist, entry.wins, entry.total
        elif dist == best:
            # equidistant neighbours on both sides are pooled
            wins += entry.wins
            total += entry.total
    return None if best is None else quantized_ratio(wins, total)


def lookup_we(table: WETable, state: GameState, terminal_outcome: str | None = None) -> float:
    if terminal_outcome is not None:
        return TERMINAL_WE[terminal_outcome]
    key = table.key(state)
    entry = table.entries.get(key)
    if entry is not None:
        return entry.we
    if table.fallback == "nearest":
        value = _nearest(table, key)
        if value is not None:
            table._record_miss("nearest")
            return value
    table._record_miss("neutral")
    return 0.5


def compute_wpa(we_before: float, we_after: float) -> float:
    return we_after - we_before


def compute_li(table: WETable, we_before: float, we_after: float) -> float:
    if table.avg_abs_dwe == 0:
        raise ZeroDenominator("average |dWE| of the table is zero")
    return abs(we_after - we_before) / table.avg_abs_dwe


# ---------------------------------------------------------------------------
# annotation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnnotatedPlay:
    play: Play
    we_before: float
    we_after: float
    wpa: float
    li: float

    @property
    def id(self) -> int:
        return self.play.id


def _chained_values(table: WETable, game: GameLog):
    plays = game.plays
    befores = [lookup_we(table, p.state_before) for p in plays]
    for i, play in enumerate(plays):
        if play.is_terminal or i == len(plays) - 1:
            after = lookup_we(table, play.state_after, game.outcome)
        else:
            after = befores[i + 1]
        yield befores[i], after, compute_wpa(befores[i], after)


def annotate_game(table: WETable, log: GameLog) -> list[AnnotatedPlay]:
    for i in range(1, len(log.plays)):
        if log.plays[i - 1].state_after != log.plays[i].state_before:
            raise ChainBreak(f"game {log.game_id}: state chain broken at play index {i}")
    _check_complete(log)
    out = []
    for play, (before, after, wpa) in zip(log.plays, _chained_values(table, log)):
        out.append(AnnotatedPlay(play, before, after, wpa, compute_li(table, before, after)))
    return out


def initial_we(table: WETable) -> float:
    return lookup_we(table, INITIAL_STATE)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def serialize_table(table: WETable) -> str:
    records = [
        {
            "inning": k.inning_bucket,
            "half": k.half.value,
            "outs": k.outs,
            "runners": k.runner_state,
            "score_diff": k.score_diff_bucket,
            "wins": e.wins,
            "total": e.total,
        }
        for k, e in sorted(table.entries.items())
    ]
    head = [
        f'"metadata": {json.dumps(table.metadata, sort_keys=True)}',
        f'"fallback": {json.dumps(table.fallback)}',
        # string keeps all 17 significant digits regardless of repr shortening
        f'"avg_abs_dwe": "{table.avg_abs_dwe:.17g}"',
    ]
    body = ",\n".join(json.dumps(r) for r in records)
    return "{\n" + ",\n".join(head) + ',\n"entries": [\n' + body + "\n]}\n"


def parse_table(text: str) -> WETable:
    doc = json.loads(text)
    entries = {}
    for r in doc["entries"]:
        key = StateKey(r["inning"], Half(r["half"]), r["outs"], r["runners"], r["score_diff"])
        entries[key] = Entry(r["wins"], r["total"])
    return WETable(entries, float(doc["avg_abs_dwe"]), doc["metadata"], doc.get("fallback", "nearest"))


def save_table(table: WETable, path) -> None:
    Path(path).write_text(serialize_table(table), encoding="utf-8")


def load_table(path) -> WETable:
    return parse_table(Path(path).read_text(encoding="utf-8"))


def annotate_all(table: WETable, games: Iterable[GameLog]) -> dict:
    return {g.game_id: annotate_game(table, g) for g in games}
