"""Seeded synthetic game generator.

Produces complete, chain-consistent game logs for tests, fixtures and
demo corpora. The base-running model is deliberately simple; all that
matters downstream is that states evolve legally and games end by the
usual rules (no bottom of the 9th when the home side leads, walk-offs end
the game immediately, extra innings until someone leads).
"""

from __future__ import annotations

import random

from .gamelog import INITIAL_STATE, EventKind, GameLog, GameState, Half, Play

_FIRST = ["Kim", "Lee", "Park", "Choi", "Jung", "Kang", "Cho", "Yoon", "Jang", "Lim", "Han", "Oh", "Seo", "Shin"]
_GIVEN = ["Min-seok", "Ji-hwan", "Dae-ho", "Joo-in", "Hyun-woo", "Jae-won", "Sung-bum",
          "Woo-jin", "Byung-ho", "Ha-seong", "Jung-hoo", "Chang-mo", "Seung-yeop", "Eui-ji"]
_FIELDS = ["left field", "center field", "right field"]
_INFIELD = ["shortstop", "second base", "third base", "first base"]

# (event, weight)
_OUTCOMES = [
    ("strikeout", 22), ("groundout", 20), ("flyout", 16), ("lineout", 5),
    ("single", 15), ("double", 5), ("triple", 1), ("homer", 3),
    ("walk", 8), ("hbp", 1), ("error", 1.5), ("steal", 2), ("sub", 2.5),
]


def _roster(rng: random.Random, n: int = 12) -> list[str]:
    names = set()
    while len(names) < n:
        names.add(f"{rng.choice(_FIRST)} {rng.choice(_GIVEN)}")
    return sorted(names)


def _advance(runners: int, bases: int) -> tuple[int, int]:
    """Push every runner ``bases`` bases; the batter is not included."""
    runs = 0
    new = 0
    for base in range(3):
        if runners & (1 << base):
            target = base + bases
            if target >= 3:
                runs += 1
            else:
                new |= 1 << target
    return new, runs


def _force(runners: int) -> tuple[int, int]:
    """Batter to first, forced runners move up one."""
    if not runners & 1:
        return runners | 1, 0
    if not runners & 2:
        return runners | 3, 0
    if not runners & 4:
        return 7, 0
    return 7, 1


def _resolve(event, outs, runners, rng):
    """Return (result text, kind, outs added, new runners, runs)."""
    where = rng.choice(_FIELDS)
    if event == "strikeout":
        return rng.choice(["Strikeout swinging", "Strikeout looking"]), EventKind.STRIKEOUT, 1, runners, 0
    if event == "groundout":
        if runners & 1 and outs < 2 and rng.random() < 0.35:
            new, runs = _advance(runners & ~1, 1)
            runs = runs if outs == 0 else 0
            return f"Grounds into double play to {rng.choice(_INFIELD)}", EventKind.OUT, 2, new, runs
        new, runs = _advance(runners, 1) if outs < 2 else (runners, 0)
        return f"Groundout to {rng.choice(_INFIELD)}", EventKind.OUT, 1, new, runs
    if event == "flyout":
        if runners & 4 and outs < 2 and rng.random() < 0.5:
            return f"Sacrifice fly to {where}", EventKind.OUT, 1, runners & ~4, 1
        return f"Flyout to {where}", EventKind.OUT, 1, runners, 0
    if event == "lineout":
        return f"Lineout to {rng.choice(_INFIELD)}", EventKind.OUT, 1, runners, 0
    if event == "single":
        new, runs = _advance(runners, 1)
        if new & 4 and rng.random() < 0.4:
            new &= ~4
            runs += 1
        return f"Single to {where}", EventKind.HIT, 0, new | 1, runs
    if event == "double":
        new, runs = _advance(runners, 2)
        return f"Double to {where}", EventKind.HIT, 0, new | 2, runs
    if event == "triple":
        _, runs = _advance(runners, 3)
        return f"Triple to {where}", EventKind.HIT, 0, 4, runs
    if event == "homer":
        _, runs = _advance(runners, 4)
        return f"Home run to {where}", EventKind.HOME_RUN, 0, 0, runs + 1
    if event == "walk":
        new, runs = _force(runners)
        return "Walk", EventKind.WALK, 0, new, runs
    if event == "hbp":
        new, runs = _force(runners)
        return "Hit by pitch", EventKind.WALK, 0, new, runs
    if event == "error":
        new, runs = _advance(runners, 1)
        return f"Reaches on fielding error by {rng.choice(_INFIELD)}", EventKind.ERROR, 0, new | 1, runs
    if event == "steal":
        if runners & 1 and not runners & 2:
            if rng.random() < 0.75:
                return "Steals second base", EventKind.STEAL, 0, (runners & ~1) | 2, 0
            return "Caught stealing second base", EventKind.OUT, 1, runners & ~1, 0
        return None
    if event == "sub":
        return "Substitution: pinch hitter", EventKind.SUBSTITUTION, 0, runners, 0
    raise ValueError(event)


def generate_game(seed: int, game_id: str | None = None, *, home: str = "Home", away: str = "Away",
                  max_innings: int = 30) -> GameLog:
    rng = random.Random(seed)
    rosters = {Half.TOP: _roster(rng), Half.BOTTOM: _roster(rng)}
    events, weights = zip(*_OUTCOMES)
    plays: list[Play] = []
    state = INITIAL_STATE
    clock = rng.randint(60_000, 300_000)
    home_score = away_score = 0
    pid = 0
    over = False

    while not over:
        event = rng.choices(events, weights)[0]
        outs, runners = state.outs, state.runner_state
        resolved = _resolve(event, outs, runners, rng)
        if resolved is None:
            continue
        text, kind, add_outs, new_runners, runs = resolved
        batting = state.half
        actor = rng.choice(rosters[batting])

        if batting is Half.TOP:
            away_score += runs
        else:
            home_score += runs
        diff = home_score - away_score
        new_outs = outs + add_outs

        if batting is Half.BOTTOM and state.inning >= 9 and diff > 0:
            # walk-off
            after = GameState(state.inning, batting, min(new_outs, 2), new_runners, diff)
            over = True
        elif new_outs >= 3:
            inning, half = state.inning, batting
            if half is Half.TOP:
                half = Half.BOTTOM
                if inning >= 9 and diff > 0:
                    over = True
            else:
                if inning >= 9 and diff != 0:
                    over = True
                inning, half = inning + 1, Half.TOP
                if inning > max_innings:
                    over = True
            after = GameState(inning, half, 0, 0, diff)
        else:
            after = GameState(state.inning, batting, new_outs, new_runners, diff)

        pid += 1
        plays.append(Play(
            id=pid,
            timestamp_ms=clock,
            result=f"{actor}: {text}",
            event_kind=kind,
            state_before=state,
            state_after=after,
            is_terminal=over,
            actor=actor,
        ))
        clock += rng.randint(15_000, 150_000)
        state = after

    return GameLog(game_id or f"SYN{seed:05d}", home, away, tuple(plays), home_score, away_score)


def generate_corpus(n: int, seed: int = 0, prefix: str = "SYN") -> list[GameLog]:
    rng = random.Random(seed)
    games = []
    for i in range(n):
        g = generate_game(rng.randrange(2 ** 31), f"{prefix}{i:04d}")
        games.append(g)
    return games
