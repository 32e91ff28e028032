import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbhighlights.errors import ChainBreak, EmptyCorpus, IncompleteGame, ZeroDenominator
from bbhighlights.gamelog import INITIAL_STATE, GameLog, GameState, Half
from bbhighlights.sabermetrics import (
    Entry,
    StateKey,
    WETable,
    annotate_game,
    build_we_table,
    compute_li,
    compute_wpa,
    lookup_we,
    parse_table,
    quantized_ratio,
    serialize_table,
)
from bbhighlights.synthetic import generate_corpus, generate_game

from oracles import brute_force_counts, replay_annotations


def table_with(entries, avg=0.1, fallback="nearest", mib=9):
    return WETable(dict(entries), avg, {"corpus_size": 1, "built_at": None, "max_inning_bucket": mib},
                   fallback)


S = GameState(5, Half.BOTTOM, 1, 3, -2)


class TestLookup:
    def test_terminal(self):
        t = table_with({})
        assert lookup_we(t, S, "HomeWin") == 1.0
        assert lookup_we(t, S, "AwayWin") == 0.0

    def test_seen(self):
        t = table_with({StateKey.of(S): Entry(7, 10)})
        assert lookup_we(t, S) == 0.7
        assert t.miss_count == 0

    def test_unseen_neutral(self):
        t = table_with({}, fallback="neutral")
        assert lookup_we(t, S) == 0.5
        assert t.misses["neutral"] == 1
        lookup_we(t, S)
        assert t.miss_count == 2

    def test_unseen_nearest_score_diff(self):
        t = table_with({
            StateKey(5, Half.BOTTOM, 1, 3, 1): Entry(9, 10),
            StateKey(5, Half.BOTTOM, 1, 3, -4): Entry(1, 10),
            StateKey(5, Half.BOTTOM, 2, 3, -2): Entry(5, 5),  # different outs, never a neighbour
        })
        assert lookup_we(t, S) == pytest.approx(0.1)
        assert t.misses["nearest"] == 1

    def test_equidistant_neighbours_pool(self):
        t = table_with({
            StateKey(5, Half.BOTTOM, 1, 3, -1): Entry(3, 4),
            StateKey(5, Half.BOTTOM, 1, 3, -3): Entry(1, 6),
        })
        assert lookup_we(t, S) == pytest.approx(0.4)

    def test_nearest_falls_back_to_neutral(self):
        t = table_with({StateKey(6, Half.BOTTOM, 1, 3, 0): Entry(1, 1)})
        assert lookup_we(t, S) == 0.5
        assert t.misses["neutral"] == 1

    def test_extra_innings_collapse(self):
        t = table_with({StateKey(9, Half.TOP, 0, 0, 0): Entry(1, 4)})
        assert lookup_we(t, GameState(13, Half.TOP, 0, 0, 0)) == 0.25
        assert t.miss_count == 0

    def test_score_diff_clamped(self):
        assert StateKey.of(GameState(1, Half.TOP, 0, 0, 14)).score_diff_bucket == 10
        assert StateKey.of(GameState(1, Half.TOP, 0, 0, -30)).score_diff_bucket == -10


@settings(max_examples=200)
@given(st.integers(1, 10_000), st.data())
def test_quantized_ratio(total, data):
    wins = data.draw(st.integers(0, total))
    q = quantized_ratio(wins, total)
    assert 0.0 <= q <= 1.0
    assert abs(q - wins / total) <= 2 ** -53
    assert (q * 2 ** 53).is_integer()
    if 2 * wins >= total:
        assert q == wins / total


class TestWpaLi:
    def test_wpa(self):
        assert compute_wpa(0.5, 0.5) == 0.0
        assert compute_wpa(0.552, 0.500) == pytest.approx(-0.052)
        assert compute_wpa(0.0, 1.0) == 1.0

    def test_li(self):
        t = table_with({}, avg=0.04)
        assert compute_li(t, 0.50, 0.54) == pytest.approx(1.0)
        assert compute_li(t, 0.3, 0.3) == 0.0
        assert compute_li(t, 0.6, 0.52) == pytest.approx(2.0)

    def test_li_zero_denominator(self):
        with pytest.raises(ZeroDenominator):
            compute_li(table_with({}, avg=0.0), 0.1, 0.2)


class TestBuild:
    def test_brute_force_counts(self, corpus20, table20):
        expected = brute_force_counts(corpus20)
        got = {(k.inning_bucket, k.half.value, k.outs, k.runner_state, k.score_diff_bucket): (e.wins, e.total)
               for k, e in table20.entries.items()}
        assert got == expected

    def test_home_always_wins(self):
        games = [g for g in generate_corpus(60, seed=5) if g.outcome == "HomeWin"][:8]
        t = build_we_table(games)
        assert all(e.we == 1.0 for e in t.entries.values())

    def test_entry_invariants(self, table20):
        for e in table20.entries.values():
            assert 0 <= e.wins <= e.total and e.total >= 1
            assert 0.0 <= e.we <= 1.0
        assert table20.avg_abs_dwe > 0

    def test_seven_of_ten(self):
        games = [g for g in generate_corpus(80, seed=2)]
        home = [g for g in games if g.outcome == "HomeWin"][:7]
        away = [g for g in games if g.outcome == "AwayWin"][:3]
        t = build_we_table(home + away)
        # every game passes through the opening state
        assert t.entries[StateKey.of(INITIAL_STATE)] == Entry(7, 10)
        assert lookup_we(t, INITIAL_STATE) == 0.7

    def test_li_mean_is_one(self, corpus20, table20):
        lis = [a.li for g in corpus20 for a in annotate_game(table20, g)]
        assert math.fsum(lis) / len(lis) == pytest.approx(1.0, abs=1e-9)

    def test_terminal_states_not_entries(self, corpus20, table20):
        # a finished game's final state is only a table entry if some other play started there
        starts = {StateKey.of(p.state_before) for g in corpus20 for p in g.plays}
        assert set(table20.entries) == starts

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            build_we_table([])

    def test_incomplete_game(self):
        g = generate_game(1)
        cut = replace(g, plays=g.plays[:-1])
        with pytest.raises(IncompleteGame):
            build_we_table([cut])

    def test_serial_and_merged_builds_agree(self, corpus20, table20):
        halves = build_we_table(corpus20[10:] + corpus20[:10])
        assert halves.entries == table20.entries

    def test_serialization_lossless(self, table20):
        text = serialize_table(table20)
        again = parse_table(text)
        assert again == table20
        assert again.avg_abs_dwe == table20.avg_abs_dwe
        assert serialize_table(again) == text
        assert '"wins"' in text and '"total"' in text


class TestAnnotate:
    def test_replay_oracle(self, corpus20, table20):
        game = next(g for g in corpus20 if len(g.plays) >= 10)
        got = annotate_game(table20, game)
        for a, (b, af, w, li) in zip(got, replay_annotations(table20, game)):
            assert a.we_before == pytest.approx(b, abs=2e-16)
            assert a.we_after == pytest.approx(af, abs=2e-16)
            assert a.wpa == pytest.approx(w, abs=5e-16)
            assert a.li == pytest.approx(li, rel=1e-12, abs=1e-15)

    def test_equation_fidelity(self, corpus20, table20):
        for g in corpus20:
            for a in annotate_game(table20, g):
                assert a.wpa == a.we_after - a.we_before
                assert a.li == abs(a.we_after - a.we_before) / table20.avg_abs_dwe
                assert 0 <= a.we_before <= 1 and 0 <= a.we_after <= 1
                assert -1 <= a.wpa <= 1 and a.li >= 0

    def test_chained(self, corpus20, table20):
        ann = annotate_game(table20, corpus20[0])
        for x, y in zip(ann, ann[1:]):
            assert x.we_after == y.we_before

    def test_telescoping_exact(self, corpus20, table20):
        for g in corpus20:
            ann = annotate_game(table20, g)
            total = 0.0
            for a in ann:
                total += a.wpa
            assert total == ann[-1].we_after - ann[0].we_before
            assert ann[-1].we_after == (1.0 if g.outcome == "HomeWin" else 0.0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 100_000))
    def test_telescoping_on_unseen_games(self, table20, seed):
        g = generate_game(seed)
        ann = annotate_game(table20, g)
        assert math.fsum(a.wpa for a in ann) == ann[-1].we_after - ann[0].we_before
        assert sum(a.wpa for a in ann) == ann[-1].we_after - ann[0].we_before

    def test_substitution_is_zero(self, ten_play, golden_table):
        ann = annotate_game(golden_table, ten_play)
        sub = next(a for a in ann if a.play.id == 104)
        assert sub.wpa == 0.0 and sub.li == 0.0

    def test_chain_break_rejected(self, table20):
        g = generate_game(4)
        p = g.plays[3]
        bad = replace(p, state_before=replace(p.state_before, runner_state=(p.state_before.runner_state + 1) % 8))
        g = replace(g, plays=g.plays[:3] + (bad,) + g.plays[4:])
        with pytest.raises(ChainBreak):
            annotate_game(table20, g)

    def test_zero_denominator_propagates(self):
        t = table_with({}, avg=0.0)
        g = generate_game(4)
        with pytest.raises(ZeroDenominator):
            annotate_game(t, g)

    def test_tie_game_terminal(self, table20):
        g = generate_game(4)
        tie = GameLog(g.game_id, g.home_team, g.away_team, g.plays, 3, 3)
        assert annotate_game(table20, tie)[-1].we_after == 0.5
