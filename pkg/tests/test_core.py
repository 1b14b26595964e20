import chess
import pytest
from hypothesis import given, settings, strategies as st

from prunedmcts.core import (GameOutcome, GameState, IllegalAction, PlayerRole, TerminalState,
                             pair_reward, turn_of)
from prunedmcts.games import Chess, MiniGo, RandomRewardGame, SyntheticGame, TicTacToe


def random_history(game, draws, limit=60):
    state = game.initial_state()
    for d in draws[:limit]:
        legal = game.legal_actions(state)
        if not legal:
            break
        state = game.apply(state, legal[d % len(legal)])
    return state


def test_apply_concatenates_history(ttt):
    s = ttt.apply(ttt.initial_state(), "4")
    assert s.history == ("4",)
    assert s.ply == 1
    assert s.board[4] == "X"


def test_apply_illegal_and_terminal(ttt):
    s = ttt.apply(ttt.initial_state(), "4")
    with pytest.raises(IllegalAction):
        ttt.apply(s, "4")
    won = ttt.replay(["0", "3", "1", "4", "2"])
    assert ttt.outcome(won) is GameOutcome.MAX_WINS
    with pytest.raises(TerminalState):
        ttt.apply(won, "5")


def test_chess_apply_e2e4():
    g = Chess()
    s = g.apply(g.initial_state(), "e2e4")
    ref = chess.Board()
    ref.push_uci("e2e4")
    assert g.fen(s) == ref.fen() == "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq - 0 1"
    with pytest.raises(IllegalAction):
        g.apply(g.initial_state(), "e2e5")


@pytest.mark.parametrize("ply,role", [(0, PlayerRole.MAX), (7, PlayerRole.MIN), (2, PlayerRole.MAX)])
def test_turn_of(ply, role):
    assert turn_of(GameState(tuple("x" * ply), None)) is role


def test_pair_reward_synthetic():
    g = SyntheticGame(2, 1, reward_fn=lambda h, a: 0.5 if not h else -0.25)
    assert pair_reward(g, g.initial_state(), "0", "1") == 0.25
    zero = SyntheticGame(2, 1)
    assert pair_reward(zero, zero.initial_state(), "0", "0") == 0.0


def test_pair_reward_board_games_are_zero():
    for g, a, b in [(TicTacToe(), "0", "1"), (Chess(), "e2e4", "e7e5"), (MiniGo(5), "C3", "pass")]:
        assert pair_reward(g, g.initial_state(), a, b) == 0.0


def test_pair_reward_propagates_illegal(ttt):
    with pytest.raises(IllegalAction):
        pair_reward(ttt, ttt.initial_state(), "0", "0")


def test_outcome_values():
    assert GameOutcome.MAX_WINS.terminal_value == 1
    assert GameOutcome.MIN_WINS.terminal_value == -1
    assert GameOutcome.DRAW.terminal_value == 0
    with pytest.raises(ValueError):
        GameOutcome.ONGOING.terminal_value
    for o in (GameOutcome.MAX_WINS, GameOutcome.MIN_WINS, GameOutcome.DRAW):
        assert o.value_for(PlayerRole.MIN) == -o.value_for(PlayerRole.MAX)


def test_state_identity_is_history(ttt):
    a = ttt.replay(["0", "4", "1"])
    b = ttt.replay(["1", "4", "0"])
    assert a.board == b.board
    assert a != b
    assert a == ttt.replay(["0", "4", "1"])


GAMES = [TicTacToe(), MiniGo(5), Chess(), RandomRewardGame(3, 4, seed=3)]


@settings(max_examples=40, deadline=None)
@given(gi=st.integers(0, len(GAMES) - 1), draws=st.lists(st.integers(0, 10**6), max_size=60))
def test_replay_matches_incremental(gi, draws):
    game = GAMES[gi]
    state = random_history(game, draws)
    again = game.replay(state.history)
    assert game.board_text(again) == game.board_text(state)
    assert state.ply == len(state.history)


@settings(max_examples=40, deadline=None)
@given(gi=st.integers(0, len(GAMES) - 1), draws=st.lists(st.integers(0, 10**6), max_size=40))
def test_alternation_and_reward_bound(gi, draws):
    game = GAMES[gi]
    state = random_history(game, draws)
    for a in game.legal_actions(state)[:8]:
        nxt = game.apply(state, a)
        assert game.turn_of(nxt) is not game.turn_of(state)
        assert abs(game.reward(state, a)) <= game.r_max
    assert (game.legal_actions(state) == []) == game.is_terminal(state)


def test_legal_actions_sorted():
    for g in GAMES:
        legal = g.legal_actions(g.initial_state())
        assert legal == sorted(legal)
