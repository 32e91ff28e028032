#!/usr/bin/env python3
"""Regenerate the checked-in test fixtures and goldens.

    python scripts/make_fixtures.py            # rewrite tests/data
    python scripts/make_fixtures.py --corpus-dir demo_corpus --games 50   # corpus only

Goldens must only be refreshed after the change that alters them has been
reviewed; the tests compare against these bytes.
"""

from __future__ import annotations

import argparse
import shutil
from pathlib import Path

from bbhighlights.cli import main as cli_main
from bbhighlights.evaluation import GroundTruth, save_ground_truth
from bbhighlights.gamelog import load_game_log, save_game_log
from bbhighlights.llm import LLMRequestConfig, MockBackend
from bbhighlights.sabermetrics import annotate_game, build_we_table, save_table
from bbhighlights.scoring import decide, save_scored
from bbhighlights.synthetic import generate_corpus, generate_game

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "tests" / "data"

TABLE_CORPUS = dict(n=500, seed=7)
GOLDEN_SEED = 2024


def contextual(a) -> bool:
    """Reference-highlight rule for synthetic games: big swings anywhere,
    moderate swings from the 7th on, and any win-probability change from the 8th on."""
    w = abs(a.wpa)
    inning = a.play.inning
    return w >= 0.15 or (w >= 0.05 and inning >= 7) or (inning >= 8 and w > 0)


RUN_YAML = """\
# golden end-to-end run with the deterministic mock backend
game_log: game.jsonl
we_table: we_table.json
ground_truth: gt.json
out_dir: out
backend: mock
llm:
  temperature: 0.0
  top_p: 0.1
  max_tokens: 10000
preferences:
  late_inning_bonus: {innings: [8, 9], points: 5}
  key_players: {names: [], points: 0}
  theme: Any
  k: 25
"""


def write_golden() -> None:
    gold = DATA / "golden"
    gold.mkdir(parents=True, exist_ok=True)
    table = build_we_table(generate_corpus(**TABLE_CORPUS))
    save_table(table, gold / "we_table.json")

    game = generate_game(GOLDEN_SEED, "GOLD0001", home="LG Twins", away="Doosan Bears")
    save_game_log(game, gold / "game.jsonl")
    ann = annotate_game(table, game)
    save_ground_truth(GroundTruth(game.game_id, {a.id for a in ann if contextual(a)}), gold / "gt.json")
    (gold / "run.yaml").write_text(RUN_YAML, encoding="utf-8")

    expected = gold / "expected"
    if expected.exists():
        shutil.rmtree(expected)
    rc = cli_main(["run", "--config", str(gold / "run.yaml"), "--out-dir", str(expected)])
    assert rc == 0, rc
    (expected / "we_curve.png").unlink()

    ten = load_game_log(DATA / "ten_play.jsonl")
    save_scored(decide(annotate_game(table, ten), MockBackend(), LLMRequestConfig()),
                DATA / "ten_play_scored.jsonl")


def write_corpus(directory: Path, n: int, seed: int) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for g in generate_corpus(n, seed):
        save_game_log(g, directory / f"{g.game_id}.jsonl")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--corpus-dir", type=Path, help="write a synthetic corpus here instead of the fixtures")
    ap.add_argument("--games", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if args.corpus_dir:
        write_corpus(args.corpus_dir, args.games, args.seed)
    else:
        write_golden()
