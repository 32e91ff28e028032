"""Command-line entry point.

Exit codes: 0 success, 1 input/config error, 2 backend error, 3 internal
invariant failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config
from .errors import EmptyCorpus, HighlightError
from .evaluation import (
    GroundTruth,
    load_ground_truth,
    precision_recall_f1,
    report_record,
    sweep_k,
    sweep_record,
)
from .gamelog import load_game_log
from .llm import make_backend
from .pipeline import StageError, make_pipeline_selector, make_wpa_selector, run_game
from .reflection import dump_json, load_selection_ids, selection_record
from .sabermetrics import build_we_table, load_table, save_table
from .scoring import serialize_scored

log = logging.getLogger("bbhighlights")

EXIT_OK, EXIT_INPUT, EXIT_BACKEND, EXIT_INTERNAL = 0, 1, 2, 3


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, StageError):
        exc = exc.cause
    if isinstance(exc, HighlightError):
        return exc.exit_code
    if isinstance(exc, (OSError, ValueError, KeyError)):
        return EXIT_INPUT
    return EXIT_INTERNAL


# ---------------------------------------------------------------------------
# build-table
# ---------------------------------------------------------------------------

def cmd_build_table(corpus_dir, out_path, max_inning_bucket: int = 9) -> int:
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        return _fail(f"corpus directory not found: {corpus_dir}", EXIT_INPUT)
    files = sorted(corpus_dir.glob("*.jsonl"))
    if not files:
        return _fail(f"empty corpus: no *.jsonl game logs in {corpus_dir}", EmptyCorpus.exit_code)
    games = []
    for f in files:
        try:
            games.append(load_game_log(f))
        except HighlightError as exc:
            return _fail(f"{f.name}: {exc}", exc.exit_code)
    try:
        table = build_we_table(games, max_inning_bucket)
    except HighlightError as exc:
        return _fail(str(exc), exc.exit_code)
    save_table(table, out_path)
    print(f"corpus: {len(games)} games")
    print(f"entries: {len(table.entries)}")
    print(f"avg_abs_dwe: {table.avg_abs_dwe:.12f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

OUTPUT_FILES = ("scored.jsonl", "selection.json", "manifest.json", "evaluation.json", "we_curve.png")


def _write_outputs(cfg: RunConfig, result, gt: GroundTruth | None) -> list[Path]:
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def track(name):
        p = out / name
        written.append(p)
        return p

    try:
        track("scored.jsonl").write_text(serialize_scored(result.scored), encoding="utf-8")
        dump_json(selection_record(result.selection), track("selection.json"))
        dump_json(result.manifest, track("manifest.json"))
        if gt is not None:
            report = precision_recall_f1(result.selection.play_ids, gt)
            dump_json(report_record(report), track("evaluation.json"))
            print(f"P={report.precision:.3f} R={report.recall:.3f} F1={report.f1:.3f}")
        if cfg.figures:
            from .plotting import plot_we_curve

            plot_we_curve(result.annotated, result.selection.play_ids, track("we_curve.png"),
                          title=f"{result.game.game_id}: win expectancy and selected plays")
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return written


def cmd_run(config_path, *, backend=None, k=None, out_dir=None) -> int:
    try:
        cfg = load_config(config_path).with_overrides(backend=backend, k=k, out_dir=out_dir)
        cfg.check_paths()
        game = load_game_log(cfg.game_log)
        table = load_table(cfg.we_table)
        gt = load_ground_truth(cfg.ground_truth) if cfg.ground_truth else None
        llm_backend = make_backend(cfg.backend, cfg.llm)
    except Exception as exc:
        return _fail(f"[config] {exc}", _exit_code(exc))

    if cfg.preferences.k > len(game.plays):
        print(f"warning: k={cfg.preferences.k} exceeds the {len(game.plays)} plays in {game.game_id}; "
              "selecting all eligible plays", file=sys.stderr)
    try:
        result = run_game(game, table, llm_backend, cfg.llm, cfg.preferences, prompt_dir=cfg.prompt_dir,
                          reflect=cfg.reflect, pre_roll_ms=cfg.pre_roll_ms, post_roll_ms=cfg.post_roll_ms)
        written = _write_outputs(cfg, result, gt)
    except Exception as exc:
        msg = str(exc) if isinstance(exc, StageError) else f"[output] {exc}"
        return _fail(msg, _exit_code(exc))

    if table.miss_count:
        print(f"warning: {table.miss_count} win-expectancy lookups fell back "
              f"({dict(sorted(table.misses.items()))})", file=sys.stderr)
    print(f"{game.game_id}: selected {result.selection.k_effective} of {len(game.plays)} plays")
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# evaluate / sweep
# ---------------------------------------------------------------------------

def cmd_evaluate(selection_path, gt_path) -> int:
    try:
        selected = load_selection_ids(selection_path)
        gt = load_ground_truth(gt_path)
        report = precision_recall_f1(selected, gt)
    except Exception as exc:
        return _fail(str(exc), _exit_code(exc))
    print(f"P={report.precision:.3f} R={report.recall:.3f} F1={report.f1:.3f}")
    return EXIT_OK


def cmd_sweep(config_path, k_grid=None, *, backend=None, out_dir=None) -> int:
    try:
        cfg = load_config(config_path).with_overrides(backend=backend, out_dir=out_dir, k_grid=k_grid)
        cfg.check_paths(need_game=False)
        specs = list(cfg.games)
        if not specs and cfg.game_log is not None:
            from .config import GameSpec

            specs = [GameSpec(cfg.game_log, cfg.ground_truth)]
        if not specs:
            raise ValueError("config lists no games to sweep")
        games = []
        for entry in specs:
            if entry.ground_truth is None:
                raise ValueError(f"no ground truth for {entry.game_log}")
            g = load_game_log(entry.game_log)
            gt = load_ground_truth(entry.ground_truth)
            gt.check_against(g)
            games.append((g, gt))
        table = load_table(cfg.we_table)
        if cfg.selector == "wpa":
            selector = make_wpa_selector(table)
        elif cfg.selector == "pipeline":
            selector = make_pipeline_selector(table, make_backend(cfg.backend, cfg.llm), cfg.llm,
                                              cfg.preferences, prompt_dir=cfg.prompt_dir, reflect=cfg.reflect)
        else:
            raise ValueError(f"unknown selector {cfg.selector!r} (pipeline or wpa)")
    except Exception as exc:
        return _fail(f"[config] {exc}", _exit_code(exc))

    try:
        report = sweep_k(games, selector, cfg.k_grid)
    except Exception as exc:
        return _fail(f"[sweep] {exc}", _exit_code(exc))

    table_text = report.table()
    sys.stdout.write(table_text)
    print(f"argmax_k={report.argmax_k}")

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text(table_text, encoding="utf-8")
    dump_json(sweep_record(report), out / "sweep.json")
    if cfg.figures:
        from .plotting import plot_k_sweep

        plot_k_sweep(report.entries, report.argmax_k, out / "sweep.png",
                     title=f"mean F1 over {len(games)} game(s), selector={cfg.selector}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def _k_grid(text: str) -> list[int]:
    try:
        grid = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k grid {text!r}") from None
    if not grid or any(k < 1 for k in grid):
        raise argparse.ArgumentTypeError("k grid must be positive integers")
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbhighlights", description="Baseball highlight selection pipeline")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-table", help="build a win-expectancy table from a corpus of game logs")
    p.add_argument("corpus_dir")
    p.add_argument("out_path")
    p.add_argument("--max-inning-bucket", type=int, default=9)

    p = sub.add_parser("run", help="score and select highlights for one game")
    p.add_argument("--config", required=True)
    p.add_argument("--backend", choices=["mock", "http"])
    p.add_argument("--k", type=int)
    p.add_argument("--out-dir")

    p = sub.add_parser("evaluate", help="precision/recall/F1 of a selection against ground truth")
    p.add_argument("selection")
    p.add_argument("ground_truth")

    p = sub.add_parser("sweep", help="mean F1 over a grid of K values")
    p.add_argument("--config", required=True)
    p.add_argument("--k-grid", type=_k_grid)
    p.add_argument("--backend", choices=["mock", "http"])
    p.add_argument("--out-dir")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "build-table":
        return cmd_build_table(args.corpus_dir, args.out_path, args.max_inning_bucket)
    if args.command == "run":
        return cmd_run(args.config, backend=args.backend, k=args.k, out_dir=args.out_dir)
    if args.command == "evaluate":
        return cmd_evaluate(args.selection, args.ground_truth)
    if args.command == "sweep":
        return cmd_sweep(args.config, args.k_grid, backend=args.backend, out_dir=args.out_dir)
    return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
