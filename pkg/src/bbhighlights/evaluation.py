"""Precision/recall/F1 against reference highlights, the |WPA| baseline and K sweeps."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import EmptyGroundTruth
from .gamelog import GameLog
from .sabermetrics import AnnotatedPlay

DEFAULT_K_GRID = tuple(range(10, 100, 10))

Selector = Callable[[GameLog, int], Iterable[int]]


@dataclass(frozen=True)
class GroundTruth:
    game_id: str
    gt_play_ids: frozenset

    def __post_init__(self):
        object.__setattr__(self, "gt_play_ids", frozenset(self.gt_play_ids))

    def check_against(self, log: GameLog) -> None:
        unknown = self.gt_play_ids - {p.id for p in log.plays}
        if unknown:
            raise ValueError(f"ground truth for {self.game_id} names unknown plays {sorted(unknown)}")


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    selected_count: int
    gt_count: int
    intersection_count: int


@dataclass(frozen=True)
class KSweepReport:
    entries: tuple  # ((k, mean_f1), ...)
    argmax_k: int

    def table(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "mean_f1"])
        for k, f1 in self.entries:
            w.writerow([k, f"{f1:.6f}"])
        return buf.getvalue()


def precision_recall_f1(selected: Iterable[int], gt: GroundTruth) -> EvalReport:
    if not gt.gt_play_ids:
        raise EmptyGroundTruth(f"ground truth for {gt.game_id} is empty")
    selected = set(selected)
    hits = len(selected & gt.gt_play_ids)
    p = hits / len(selected) if selected else 0.0
    r = hits / len(gt.gt_play_ids)
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return EvalReport(p, r, f1, len(selected), len(gt.gt_play_ids), hits)


def wpa_baseline_select(annotated: Sequence[AnnotatedPlay], k: int) -> set[int]:
    """Top-k plays by |WPA| alone, earlier play first on ties."""
    if k < 1:
        raise ValueError("k must be >= 1")
    order = sorted(range(len(annotated)), key=lambda i: (-abs(annotated[i].wpa), i))
    return {annotated[i].play.id for i in order[:k]}


def sweep_k(games: Sequence[tuple[GameLog, GroundTruth]], selector: Selector,
            k_grid: Sequence[int] = DEFAULT_K_GRID) -> KSweepReport:
    if not k_grid:
        raise ValueError("empty k grid")
    if not games:
        raise ValueError("no games to sweep")
    entries = []
    for k in k_grid:
        f1s = [precision_recall_f1(selector(log, k), gt).f1 for log, gt in games]
        entries.append((k, sum(f1s) / len(f1s)))
    best = max(f for _, f in entries)
    argmax = min(k for k, f in entries if f == best)
    return KSweepReport(tuple(entries), argmax)


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------

def load_ground_truth(path) -> GroundTruth:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    gt = GroundTruth(doc["game_id"], frozenset(int(i) for i in doc["gt_play_ids"]))
    if not gt.gt_play_ids:
        raise EmptyGroundTruth(f"{path}: no ground-truth plays")
    return gt


def save_ground_truth(gt: GroundTruth, path) -> None:
    doc = {"game_id": gt.game_id, "gt_play_ids": sorted(gt.gt_play_ids)}
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")


def report_record(report: EvalReport) -> dict:
    return asdict(report)


def sweep_record(report: KSweepReport) -> dict:
    return {
        "entries": [{"k": k, "mean_f1": f} for k, f in report.entries],
        "argmax_k": report.argmax_k,
    }
