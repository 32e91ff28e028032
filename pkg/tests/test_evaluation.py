import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbhighlights.errors import EmptyGroundTruth
from bbhighlights.evaluation import (
    DEFAULT_K_GRID,
    GroundTruth,
    load_ground_truth,
    precision_recall_f1,
    save_ground_truth,
    sweep_k,
    wpa_baseline_select,
)
from bbhighlights.gamelog import EventKind, GameState, Half, Play
from bbhighlights.sabermetrics import AnnotatedPlay, annotate_game

from oracles import topk_oracle


def ann(wpas, lis=None):
    s = GameState(1, Half.TOP, 0, 0, 0)
    lis = lis or [0.0] * len(wpas)
    return [AnnotatedPlay(Play(i, i, "x", EventKind.OTHER, s, s), 0.5, 0.5 + w, w, li)
            for i, (w, li) in enumerate(zip(wpas, lis), 1)]


class TestMetrics:
    def test_perfect(self):
        r = precision_recall_f1({1, 2}, GroundTruth("g", {1, 2}))
        assert (r.precision, r.recall, r.f1) == (1.0, 1.0, 1.0)

    def test_worked_case(self):
        r = precision_recall_f1({1, 2, 3, 4}, GroundTruth("g", {2, 3, 5}))
        assert r.precision == pytest.approx(0.5, abs=1e-12)
        assert r.recall == pytest.approx(2 / 3, abs=1e-12)
        assert r.f1 == pytest.approx(4 / 7, abs=1e-12)
        assert (r.selected_count, r.gt_count, r.intersection_count) == (4, 3, 2)

    def test_empty_selection(self):
        r = precision_recall_f1(set(), GroundTruth("g", {1}))
        assert (r.precision, r.recall, r.f1) == (0.0, 0.0, 0.0)

    def test_empty_gt(self):
        with pytest.raises(EmptyGroundTruth):
            precision_recall_f1({1}, GroundTruth("g", set()))

    @settings(max_examples=300)
    @given(st.sets(st.integers(0, 30)), st.sets(st.integers(0, 30), min_size=1))
    def test_identities(self, sel, gt):
        r = precision_recall_f1(sel, GroundTruth("g", gt))
        for v in (r.precision, r.recall, r.f1):
            assert 0.0 <= v <= 1.0
        if r.precision + r.recall > 0:
            assert r.f1 == pytest.approx(2 * r.precision * r.recall / (r.precision + r.recall), abs=1e-12)
        else:
            assert r.f1 == 0.0
        assert r.intersection_count <= min(r.selected_count, r.gt_count)

    @settings(max_examples=200)
    @given(st.sets(st.integers(0, 30)), st.sets(st.integers(0, 30)), st.sets(st.integers(0, 30), min_size=1))
    def test_recall_monotone(self, a, extra, gt):
        g = GroundTruth("g", gt)
        assert precision_recall_f1(a | extra, g).recall >= precision_recall_f1(a, g).recall

    def test_file_round_trip(self, tmp_path):
        gt = GroundTruth("G1", {5, 3, 9})
        save_ground_truth(gt, tmp_path / "gt.json")
        assert load_ground_truth(tmp_path / "gt.json") == gt
        (tmp_path / "empty.json").write_text('{"game_id": "G", "gt_play_ids": []}')
        with pytest.raises(EmptyGroundTruth):
            load_ground_truth(tmp_path / "empty.json")


class TestBaseline:
    def test_all_equal(self):
        assert wpa_baseline_select(ann([0.1] * 6), 3) == {1, 2, 3}

    def test_twelve_plays(self):
        rng = random.Random(12)
        wpas = [rng.choice([-1, 1]) * rng.choice([0.0, 0.02, 0.08, 0.2, 0.35]) for _ in range(12)]
        got = wpa_baseline_select(ann(wpas), 4)
        assert got == {i + 1 for i in topk_oracle([abs(w) for w in wpas], 4)}

    def test_saturation(self):
        assert wpa_baseline_select(ann([0.1, 0.2]), 5) == {1, 2}

    @settings(max_examples=100)
    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=30), st.integers(1, 30), st.data())
    def test_ignores_li(self, wpas, k, data):
        lis = data.draw(st.lists(st.floats(0, 10), min_size=len(wpas), max_size=len(wpas)))
        assert wpa_baseline_select(ann(wpas, lis), k) == wpa_baseline_select(ann(wpas), k)


class TestSweep:
    def test_default_grid(self, corpus20, table20):
        assert DEFAULT_K_GRID == (10, 20, 30, 40, 50, 60, 70, 80, 90)
        game = corpus20[0]
        gt = GroundTruth(game.game_id, {p.id for p in game.plays[:5]})
        anns = {game.game_id: annotate_game(table20, game)}
        report = sweep_k([(game, gt)], lambda g, k: wpa_baseline_select(anns[g.game_id], k))
        assert [k for k, _ in report.entries] == list(DEFAULT_K_GRID)
        assert report.table().count("\n") == 10

    def test_constructed_optimum(self, corpus20, table20):
        game = max(corpus20, key=lambda g: len(g.plays))
        a = annotate_game(table20, game)
        assert len(a) >= 90
        gt = GroundTruth(game.game_id, wpa_baseline_select(a, 30))
        report = sweep_k([(game, gt)], lambda g, k: wpa_baseline_select(a, k))
        assert report.argmax_k == 30
        assert dict(report.entries)[30] == 1.0

    def test_flat_curve(self, corpus20):
        game = corpus20[0]
        gt = GroundTruth(game.game_id, {game.plays[0].id, game.plays[1].id})
        report = sweep_k([(game, gt)], lambda g, k: {g.plays[0].id})
        assert len({f for _, f in report.entries}) == 1
        assert report.argmax_k == 10

    def test_mean_over_games(self, corpus20):
        g1, g2 = corpus20[:2]
        games = [(g1, GroundTruth(g1.game_id, {g1.plays[0].id})), (g2, GroundTruth(g2.game_id, {g2.plays[0].id}))]
        report = sweep_k(games, lambda g, k: {g.plays[0].id} if g is g1 else {g.plays[1].id}, [10])
        assert report.entries == ((10, 0.5),)

    def test_errors(self, corpus20):
        with pytest.raises(ValueError):
            sweep_k([(corpus20[0], GroundTruth("x", {1}))], lambda g, k: set(), [])
