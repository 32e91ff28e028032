"""Decision stage: base score, context adjustment and leverage rank bonus.

The final score of a play is purely additive::

    final = base_score + llm_adjustment + li_bonus (+ preference_bonus)

so every point in the ranking can be traced back to one ledger field.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Sequence

from .gamelog import preceding
from .llm import Backend, LLMRequestConfig, adjust_scores, analyze_wpa, transform_wpa_scores
from .sabermetrics import AnnotatedPlay

MAX_LI_BONUS = 20
CONTEXT_PLAYS = 5


@dataclass(frozen=True)
class RankRecord:
    play_id: int
    r_wpa: int
    r_li: int

    @property
    def delta_r(self) -> int:
        return self.r_wpa - self.r_li


@dataclass(frozen=True)
class ScoredPlay:
    play_id: int
    wpa: float
    li: float
    base_score: int
    llm_adjustment: int
    li_bonus: int
    final_score: int
    preference_bonus: int = 0
    eligible: bool = True
    analysis: str = ""
    flagged: bool = False

    def __post_init__(self):
        expected = self.base_score + self.llm_adjustment + self.li_bonus + self.preference_bonus
        if self.final_score != expected:
            raise ValueError(f"play {self.play_id}: final_score {self.final_score} != ledger sum {expected}")

    def with_preference(self, bonus: int, eligible: bool) -> ScoredPlay:
        return replace(self, preference_bonus=self.preference_bonus + bonus,
                       final_score=self.final_score + bonus, eligible=eligible)


def _ranks(values: Sequence[float]) -> list[int]:
    # stable sort on the negated key: equal values keep chronological order
    order = sorted(range(len(values)), key=lambda i: -values[i])
    ranks = [0] * len(values)
    for rank, i in enumerate(order, start=1):
        ranks[i] = rank
    return ranks


def rank_plays(annotated: Sequence[AnnotatedPlay]) -> list[RankRecord]:
    """Rank by |WPA| and by LI, 1 = largest; ties go to the earlier play."""
    if not annotated:
        raise ValueError("nothing to rank")
    r_wpa = _ranks([abs(a.wpa) for a in annotated])
    r_li = _ranks([a.li for a in annotated])
    return [RankRecord(a.play.id, w, l) for a, w, l in zip(annotated, r_wpa, r_li)]


def li_rank_correction(ranks: Sequence[RankRecord]) -> dict[int, int]:
    """Bonus for plays whose leverage rank beats their |WPA| rank.

    Plays with a positive rank difference are ordered by it (largest
    first, ties chronological); position p earns ``max(0, 21 - p)``.
    """
    bonus = {r.play_id: 0 for r in ranks}
    positive = [(i, r) for i, r in enumerate(ranks) if r.delta_r > 0]
    positive.sort(key=lambda item: (-item[1].delta_r, item[0]))
    for position, (_, r) in enumerate(positive, start=1):
        bonus[r.play_id] = max(0, MAX_LI_BONUS + 1 - position)
    return bonus


def analyze_all(annotated: Sequence[AnnotatedPlay], backend: Backend, config: LLMRequestConfig,
                prompt_dir=None, context: int = CONTEXT_PLAYS) -> dict:
    plays = [a.play for a in annotated]

    def one(i):
        a = annotated[i]
        return analyze_wpa(backend, a.play, preceding(plays, i, context), a.wpa, config, prompt_dir)

    indices = range(len(annotated))
    if backend.deterministic or config.concurrency == 1:
        results = [one(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
            results = list(pool.map(one, indices))
    return {r.play_id: r.wpa_analysis for r in results}


def decide(annotated: Sequence[AnnotatedPlay], backend: Backend, config: LLMRequestConfig,
           prompt_dir=None) -> list[ScoredPlay]:
    """Score every play of one game; the result is in chronological order."""
    if not annotated:
        raise ValueError("no annotated plays")
    analyses = analyze_all(annotated, backend, config, prompt_dir)

    base = transform_wpa_scores(backend, [
        {"id": a.id, "result": a.play.result, "inning": a.play.state_before.inning_text, "wpa": a.wpa}
        for a in annotated
    ], config, prompt_dir)
    base_by_id = {r.play_id: r for r in base}

    adjusted = adjust_scores(backend, [
        {"id": a.id, "result": a.play.result, "inning": a.play.state_before.inning_text,
         "base_score": base_by_id[a.id].score, "wpa_analysis": analyses[a.id]}
        for a in annotated
    ], config, prompt_dir)
    adjusted_by_id = {r.play_id: r for r in adjusted}

    bonus = li_rank_correction(rank_plays(annotated))

    scored = []
    for a in annotated:
        b = base_by_id[a.id]
        adj = adjusted_by_id[a.id]
        delta = adj.score - b.score
        scored.append(ScoredPlay(
            play_id=a.id,
            wpa=a.wpa,
            li=a.li,
            base_score=b.score,
            llm_adjustment=delta,
            li_bonus=bonus[a.id],
            final_score=b.score + delta + bonus[a.id],
            analysis=analyses[a.id],
            flagged=b.flagged or adj.flagged,
        ))
    return scored


def scored_record(s: ScoredPlay) -> dict:
    return asdict(s)


def serialize_scored(scored: Sequence[ScoredPlay]) -> str:
    return "".join(json.dumps(scored_record(s), ensure_ascii=False) + "\n" for s in scored)


def parse_scored(text: str) -> list[ScoredPlay]:
    return [ScoredPlay(**json.loads(line)) for line in text.splitlines() if line.strip()]


def save_scored(scored: Sequence[ScoredPlay], path) -> None:
    Path(path).write_text(serialize_scored(scored), encoding="utf-8")
