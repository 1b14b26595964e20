import random

import chess
import pytest
from hypothesis import given, settings, strategies as st

from prunedmcts.core import IllegalAction
from prunedmcts.games import Chess, MiniGo, RandomRewardGame, TicTacToe
from prunedmcts.oracles import (CheatPruner, ConstantCritic, ExactCritic, HybridCritic,
                                IdentityPruner, MaterialCritic, MockPruner, OutcomeCritic,
                                RandomPruner, UnsupportedGame, cheat_prune, hybrid_eval,
                                material_eval, outcome_eval)

MATE_IN_1 = "6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1"


def random_states(game, count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        s = game.initial_state()
        while not game.is_terminal(s) and len(out) < count:
            out.append(s)
            s = game.apply(s, rng.choice(game.legal_actions(s)))
    return out


@pytest.mark.parametrize("game,count", [(TicTacToe(), 10**4), (MiniGo(5, max_plies=60), 10**4),
                                        (Chess(), 10**4), (RandomRewardGame(4, 3), 10**4)])
def test_pruner_soundness(game, count):
    pruners = [IdentityPruner(), RandomPruner(3, seed=1), CheatPruner({}, k=3, seed=2)]
    for s in random_states(game, count, seed=0):
        legal = set(game.legal_actions(s))
        for p in pruners:
            kept = p.prune(game, s)
            assert kept and set(kept) <= legal


def test_random_pruner_deterministic(ttt):
    s = ttt.replay("40")
    assert RandomPruner(3, 5).prune(ttt, s) == RandomPruner(3, 5).prune(ttt, s)
    assert len(RandomPruner(3, 5).prune(ttt, s)) == 3
    with pytest.raises(ValueError):
        RandomPruner(0)


def test_mock_pruner(ttt):
    p = MockPruner({("4",): ["0", "4", "8"]}, default=["1"])
    assert p.prune(ttt, ttt.replay("4")) == ["0", "8"]
    assert p.prune(ttt, ttt.initial_state()) == ["1"]
    assert p.prune(ttt, ttt.replay("1")) == ttt.legal_actions(ttt.replay("1"))
    assert MockPruner().prune(ttt, ttt.initial_state()) == ttt.legal_actions(ttt.initial_state())
    assert p.width == 3


def test_cheat_prune_examples():
    g = Chess(MATE_IN_1)
    s = g.initial_state()
    kept = cheat_prune(g, s, "a1a8", 5, seed=3)
    assert len(kept) == 5 and kept[0] == "a1a8" and len(set(kept)) == 5
    assert set(kept) <= set(g.legal_actions(s))
    assert cheat_prune(g, s, "a1a8", 1) == ["a1a8"]
    assert cheat_prune(g, s, "a1a8", 500) == g.legal_actions(s)
    with pytest.raises(IllegalAction):
        cheat_prune(g, s, "a1h8", 5)
    with pytest.raises(ValueError):
        cheat_prune(g, s, "a1a8", 0)
    assert cheat_prune(g, s, "a1a8", 5, seed=3) == kept


def test_cheat_pruner_without_solution(ttt):
    p = CheatPruner(lambda s: "4" if not s.history else None, k=2, seed=0)
    assert p.prune(ttt, ttt.initial_state())[0] == "4"
    assert len(p.prune(ttt, ttt.replay("4"))) == 2


# -- critics -----------------------------------------------------------------------

def test_outcome_eval_examples(ttt):
    assert outcome_eval(ttt, ttt.replay("03142")) == 1
    assert outcome_eval(ttt, ttt.replay("03142"), 2.5) == 2.5
    assert outcome_eval(ttt, ttt.replay("048263571")) == 0
    assert outcome_eval(ttt, ttt.replay("04")) == 0
    assert OutcomeCritic(1, -1).evaluate(ttt, ttt.replay("04")) == -1


def test_outcome_perspective_antisymmetry():
    before = Chess().replay(["f2f3", "e7e5", "g2g4"])
    white_max = Chess()
    black_max = Chess(before.board.fen())
    mated_w = white_max.apply(before, "d8h4")
    mated_b = black_max.apply(black_max.initial_state(), "d8h4")
    assert outcome_eval(white_max, mated_w) == -outcome_eval(black_max, mated_b) == -1


def test_material_eval_examples():
    g = Chess()
    assert material_eval(g, g.initial_state()) == 0
    up_queen = Chess("4k3/8/8/8/8/8/8/3QK3 w - - 0 1")
    assert material_eval(up_queen, up_queen.initial_state()) == pytest.approx(0.9)
    # same board, Black to move: Black is Max and is a queen down
    down = Chess("4k3/8/8/8/8/8/8/3QK3 b - - 0 1")
    assert material_eval(down, down.initial_state()) == pytest.approx(-0.9)
    m = Chess(MATE_IN_1)
    assert material_eval(m, m.replay(["a1a8"])) == 10
    fools = g.replay(["f2f3", "e7e5", "g2g4", "d8h4"])
    assert material_eval(g, fools) == -10
    stalemate = Chess("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1")
    assert material_eval(stalemate, stalemate.initial_state()) == 0


def test_material_eval_rejects_other_games(ttt):
    with pytest.raises(UnsupportedGame):
        material_eval(ttt, ttt.initial_state())


PC_VALUES = {chess.PAWN: 100, chess.KNIGHT: 325, chess.BISHOP: 325, chess.ROOK: 500, chess.QUEEN: 900}


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**9))
def test_material_eval_matches_recount(seed):
    rng = random.Random(seed)
    g = Chess()
    s = g.initial_state()
    for _ in range(120):
        if g.is_terminal(s):
            break
        ref = chess.Board(g.fen(s))
        edge = sum(PC_VALUES.get(p.piece_type, 0) * (1 if p.color == chess.WHITE else -1)
                   for p in ref.piece_map().values())
        assert material_eval(g, s) == pytest.approx(edge / 1000)
        s = g.apply(s, rng.choice(g.legal_actions(s)))


def test_hybrid_examples():
    g = Chess("4k3/8/8/8/8/8/8/3QK3 w - - 0 1")
    s = g.initial_state()
    assert hybrid_eval(g, s, ConstantCritic(0.9), ConstantCritic(0.2)) == pytest.approx(1.1)
    assert HybridCritic(MaterialCritic(), ConstantCritic(0)).evaluate(g, s) == material_eval(g, s)
    m = Chess(MATE_IN_1)
    assert HybridCritic(MaterialCritic(), ConstantCritic(0)).evaluate(m, m.replay(["a1a8"])) == 10


def test_exact_critic(ttt, ttt_solution):
    c = ExactCritic(ttt_solution)
    for s in random_states(ttt, 200, 1):
        assert c.evaluate(ttt, s) == ttt_solution.value(s)
