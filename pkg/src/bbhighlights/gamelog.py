"""Game-log model, parser and validator.

A game log file is line-delimited JSON: one header record followed by one
record per play, in chronological order.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DuplicatePlayId, EmptyLog, MalformedRecord, UnknownPlayId


class Half(str, enum.Enum):
    TOP = "top"
    BOTTOM = "bottom"

    @property
    def label(self) -> str:
        return "Top" if self is Half.TOP else "Bottom"


class EventKind(str, enum.Enum):
    HIT = "Hit"
    HOME_RUN = "HomeRun"
    WALK = "Walk"
    STRIKEOUT = "Strikeout"
    OUT = "Out"
    ERROR = "Error"
    STEAL = "Steal"
    SUBSTITUTION = "Substitution"
    OTHER = "Other"


@dataclass(frozen=True, order=True)
class GameState:
    inning: int
    half: Half
    outs: int
    runner_state: int
    score_diff: int  # home minus away

    def __post_init__(self):
        if self.inning < 1:
            raise ValueError(f"inning must be >= 1, got {self.inning}")
        if self.outs not in (0, 1, 2):
            raise ValueError(f"outs must be 0..2, got {self.outs}")
        if not 0 <= self.runner_state <= 7:
            raise ValueError(f"runner_state must be 0..7, got {self.runner_state}")

    @property
    def inning_text(self) -> str:
        return f"{self.half.label} of the {ordinal(self.inning)}"


INITIAL_STATE = GameState(1, Half.TOP, 0, 0, 0)


@dataclass(frozen=True)
class Play:
    id: int
    timestamp_ms: int
    result: str
    event_kind: EventKind
    state_before: GameState
    state_after: GameState
    is_terminal: bool = False
    actor: str | None = None

    @property
    def inning(self) -> int:
        return self.state_before.inning


@dataclass(frozen=True)
class GameLog:
    game_id: str
    home_team: str
    away_team: str
    plays: tuple[Play, ...]
    final_home_score: int
    final_away_score: int
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "plays", tuple(self.plays))
        object.__setattr__(self, "_index", {p.id: i for i, p in enumerate(self.plays)})

    def position(self, play_id: int) -> int:
        try:
            return self._index[play_id]
        except KeyError:
            raise UnknownPlayId(play_id) from None

    def play(self, play_id: int) -> Play:
        return self.plays[self.position(play_id)]

    @property
    def outcome(self) -> str:
        diff = self.final_home_score - self.final_away_score
        if diff > 0:
            return "HomeWin"
        if diff < 0:
            return "AwayWin"
        return "Tie"

    @property
    def actors(self) -> set[str]:
        return {p.actor for p in self.plays if p.actor}


@dataclass(frozen=True)
class ValidationIssue:
    kind: str  # ChainBreak | TimestampOrder | OutsRegression | ScoreRegression | NoProgress | ...
    index: int
    message: str


# ---------------------------------------------------------------------------
# inning text and event keywords
# ---------------------------------------------------------------------------

def ordinal(n: int) -> str:
    if 10 <= n % 100 <= 20:
        suffix = "th"
    else:
        suffix = {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")
    return f"{n}{suffix}"


_INNING_RE = re.compile(r"^\s*(top|bottom|bot|t|b)\w*\s+(?:of\s+(?:the\s+)?)?(\d+)(?:st|nd|rd|th)?\s*$", re.I)


def parse_inning(text: str) -> tuple[Half, int]:
    """Parse prose such as ``"Top of the 6th"`` into ``(Half.TOP, 6)``."""
    m = _INNING_RE.match(text)
    if not m:
        raise ValueError(f"unrecognised inning text {text!r}")
    half = Half.TOP if m.group(1).lower().startswith("t") else Half.BOTTOM
    return half, int(m.group(2))


# first match wins, so compound phrases precede their substrings
_EVENT_KEYWORDS: list[tuple[EventKind, re.Pattern]] = [
    (EventKind.OUT, re.compile(r"double play|triple play|caught stealing|picked off")),
    (EventKind.HOME_RUN, re.compile(r"home run|homer|grand slam")),
    (EventKind.WALK, re.compile(r"\bwalk(?!-?off)|base on balls|hit by pitch|intentional")),
    (EventKind.STRIKEOUT, re.compile(r"strikeout|struck out|strikes out")),
    (EventKind.ERROR, re.compile(r"\berror")),
    (EventKind.STEAL, re.compile(r"\bsteal|stolen base|\bstole")),
    (EventKind.SUBSTITUTION, re.compile(r"substitut|pinch|replaces|pitching change|relieve")),
    (EventKind.HIT, re.compile(r"\bsingle|\bdouble|\btriple|\bhit\b|bunt hit|infield hit")),
    (EventKind.OUT, re.compile(r"out\b|flyout|groundout|lineout|popout|fly ball|sacrifice|fielder's choice|grounds|flies|lines|pops")),
]


def classify_event(result: str) -> EventKind:
    text = result.lower()
    for kind, pattern in _EVENT_KEYWORDS:
        if pattern.search(text):
            return kind
    return EventKind.OTHER


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _int_field(rec: dict, name: str, index: int, *, default=None) -> int:
    if name not in rec:
        if default is not None:
            return default
        raise MalformedRecord(index, f"missing field {name!r}")
    value = rec[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedRecord(index, f"field {name!r} must be an integer, got {value!r}")
    return value


def _str_field(rec: dict, name: str, index: int) -> str:
    if name not in rec:
        raise MalformedRecord(index, f"missing field {name!r}")
    value = rec[name]
    if not isinstance(value, str):
        raise MalformedRecord(index, f"field {name!r} must be a string, got {value!r}")
    return value


def _half_inning(rec: dict, index: int, inning_key: str, half_key: str) -> tuple[Half, int]:
    if inning_key not in rec:
        raise MalformedRecord(index, f"missing field {inning_key!r}")
    raw = rec[inning_key]
    prose_half = None
    if isinstance(raw, str):
        try:
            prose_half, inning = parse_inning(raw)
        except ValueError as exc:
            raise MalformedRecord(index, str(exc)) from None
    elif isinstance(raw, int) and not isinstance(raw, bool):
        inning = raw
    else:
        raise MalformedRecord(index, f"field {inning_key!r} must be an integer or inning text")

    if half_key in rec:
        try:
            half = Half(str(rec[half_key]).lower())
        except ValueError:
            raise MalformedRecord(index, f"field {half_key!r} must be 'top' or 'bottom'") from None
        if prose_half is not None and prose_half is not half:
            raise MalformedRecord(index, f"{half_key!r} contradicts inning text {raw!r}")
    elif prose_half is not None:
        half = prose_half
    else:
        raise MalformedRecord(index, f"missing field {half_key!r}")
    return half, inning


def _state(index: int, **kw) -> GameState:
    try:
        return GameState(**kw)
    except ValueError as exc:
        raise MalformedRecord(index, str(exc)) from None


def _parse_play(rec: dict, index: int) -> Play:
    if not isinstance(rec, dict):
        raise MalformedRecord(index, "play record must be an object")
    play_id = _int_field(rec, "id", index)
    timestamp = _int_field(rec, "timestamp_ms", index)
    if timestamp < 0:
        raise MalformedRecord(index, "timestamp_ms must be non-negative")
    result = _str_field(rec, "result", index)

    half, inning = _half_inning(rec, index, "inning", "half")
    before = _state(
        index,
        inning=inning,
        half=half,
        outs=_int_field(rec, "outs_before", index),
        runner_state=_int_field(rec, "runners_before", index),
        score_diff=_int_field(rec, "score_diff_before", index),
    )
    if "inning_after" in rec:
        half_after, inning_after = _half_inning(rec, index, "inning_after", "half_after")
    else:
        half_after, inning_after = half, inning
    after = _state(
        index,
        inning=inning_after,
        half=half_after,
        outs=_int_field(rec, "outs_after", index),
        runner_state=_int_field(rec, "runners_after", index),
        score_diff=_int_field(rec, "score_diff_after", index),
    )

    kind_raw = rec.get("event_kind")
    if kind_raw is None:
        kind = classify_event(result)
    else:
        try:
            kind = EventKind(kind_raw)
        except ValueError:
            kind = EventKind.OTHER

    actor = rec.get("actor")
    if actor is not None and not isinstance(actor, str):
        raise MalformedRecord(index, "field 'actor' must be a string")

    terminal = rec.get("is_terminal", False)
    if not isinstance(terminal, bool):
        raise MalformedRecord(index, "field 'is_terminal' must be a boolean")

    return Play(
        id=play_id,
        timestamp_ms=timestamp,
        result=result,
        event_kind=kind,
        state_before=before,
        state_after=after,
        is_terminal=terminal,
        actor=actor,
    )


def parse_game_log(text: str) -> GameLog:
    """Parse a line-delimited game log document.

    Record indices in error messages are 0-based over non-blank lines, the
    header being record 0.
    """
    records = []
    for lineno, line in enumerate(l for l in text.splitlines() if l.strip()):
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise MalformedRecord(lineno, f"invalid JSON: {exc.msg}") from None
    if not records:
        raise EmptyLog("game log has no header")

    header = records[0]
    if not isinstance(header, dict):
        raise MalformedRecord(0, "header must be an object")
    game_id = _str_field(header, "game_id", 0)
    home = _str_field(header, "home_team", 0)
    away = _str_field(header, "away_team", 0)
    final_home = _int_field(header, "final_home_score", 0)
    final_away = _int_field(header, "final_away_score", 0)

    plays = []
    seen = set()
    for index, rec in enumerate(records[1:], start=1):
        play = _parse_play(rec, index)
        if play.id in seen:
            raise DuplicatePlayId(play.id, index)
        seen.add(play.id)
        plays.append(play)
    if not plays:
        raise EmptyLog(f"game {game_id} has no plays")

    return GameLog(game_id, home, away, tuple(plays), final_home, final_away)


def load_game_log(path) -> GameLog:
    return parse_game_log(Path(path).read_text(encoding="utf-8"))


def play_record(play: Play) -> dict:
    b, a = play.state_before, play.state_after
    rec = {
        "id": play.id,
        "timestamp_ms": play.timestamp_ms,
        "result": play.result,
    }
    if play.actor is not None:
        rec["actor"] = play.actor
    rec.update(
        event_kind=play.event_kind.value,
        inning=b.inning,
        half=b.half.value,
        outs_before=b.outs,
        runners_before=b.runner_state,
        score_diff_before=b.score_diff,
        outs_after=a.outs,
        runners_after=a.runner_state,
        score_diff_after=a.score_diff,
        inning_after=a.inning,
        half_after=a.half.value,
        is_terminal=play.is_terminal,
    )
    return rec


def serialize_game_log(log: GameLog) -> str:
    header = {
        "game_id": log.game_id,
        "home_team": log.home_team,
        "away_team": log.away_team,
        "final_home_score": log.final_home_score,
        "final_away_score": log.final_away_score,
    }
    lines = [json.dumps(header, ensure_ascii=False)]
    lines += [json.dumps(play_record(p), ensure_ascii=False) for p in log.plays]
    return "\n".join(lines) + "\n"


def save_game_log(log: GameLog, path) -> None:
    Path(path).write_text(serialize_game_log(log), encoding="utf-8")


# ---------------------------------------------------------------------------
# validation and context
# ---------------------------------------------------------------------------

def validate_log(log: GameLog) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []
    plays = log.plays

    for i, play in enumerate(plays):
        b, a = play.state_before, play.state_after
        if i > 0:
            prev = plays[i - 1]
            if prev.state_after != b:
                issues.append(ValidationIssue(
                    "ChainBreak", i,
                    f"play {play.id} starts from {b} but play {prev.id} ended at {prev.state_after}"))
            if play.timestamp_ms < prev.timestamp_ms:
                issues.append(ValidationIssue(
                    "TimestampOrder", i,
                    f"play {play.id} at {play.timestamp_ms} ms precedes play {prev.id} at {prev.timestamp_ms} ms"))
            if play.id <= prev.id:
                issues.append(ValidationIssue("IdOrder", i, f"play id {play.id} not above {prev.id}"))

        same_half = (a.inning, a.half) == (b.inning, b.half)
        if same_half and a.outs < b.outs:
            issues.append(ValidationIssue(
                "OutsRegression", i, f"outs fell from {b.outs} to {a.outs} within a half-inning"))
        # away bats in the top, so home-minus-away can only fall there; the reverse in the bottom
        if b.half is Half.TOP and a.score_diff > b.score_diff:
            issues.append(ValidationIssue("ScoreRegression", i, "home score rose while away was batting"))
        if b.half is Half.BOTTOM and a.score_diff < b.score_diff:
            issues.append(ValidationIssue("ScoreRegression", i, "away score rose while home was batting"))

        if play.is_terminal != (i == len(plays) - 1):
            issues.append(ValidationIssue(
                "TerminalFlag", i, "exactly the last play must be marked terminal"))

    final_diff = log.final_home_score - log.final_away_score
    if plays and plays[-1].state_after.score_diff != final_diff:
        issues.append(ValidationIssue(
            "FinalScore", len(plays) - 1,
            f"terminal score_diff {plays[-1].state_after.score_diff} != final {final_diff}"))

    if all(p.state_before == p.state_after for p in plays):
        issues.append(ValidationIssue("NoProgress", 0, "no play changes the game state"))
    return issues


def preceding(plays: Sequence, index: int, n: int = 5) -> list:
    if n < 0:
        raise ValueError("n must be non-negative")
    return list(plays[max(0, index - n):index])


def context_window(log: GameLog, play_id: int, n: int = 5) -> list[Play]:
    """The up-to-``n`` plays immediately before ``play_id``, oldest first."""
    return preceding(log.plays, log.position(play_id), n)


def iter_logs(paths: Iterable) -> Iterable[GameLog]:
    for p in paths:
        yield load_game_log(p)
