import math
import statistics

import pytest
from hypothesis import given, settings, strategies as st

from prunedmcts.core import NoActions, PlayerRole
from prunedmcts.exact import magnitude_bounds
from prunedmcts.games import Chess, RandomRewardGame, SyntheticGame
from prunedmcts.oracles import (CheatPruner, ConstantCritic, IdentityPruner, MockPruner,
                                OutcomeCritic, RandomPruner)
from prunedmcts.search import (EXPERIMENT_BONUS, THEORY_BONUS, ActionStats, BonusParams,
                               CriticFailure, PrunerFailure, SearchConfig, SearchResult,
                               TreeNode, backup_path, best_action, run_search, select_child,
                               ucb_bonus)


def test_presets():
    assert (EXPERIMENT_BONUS.beta, EXPERIMENT_BONUS.eta1, EXPERIMENT_BONUS.eta2) == (1.25, 0.5, 0.5)
    assert (THEORY_BONUS.eta1, THEORY_BONUS.eta2) == (0.25, 0.5)


def test_bonus_examples():
    assert ucb_bonus(EXPERIMENT_BONUS, 0, 100, 4) == pytest.approx(6.25)
    assert ucb_bonus(BonusParams(1.0, 0.25, 0.5), 0, 16, 16) == pytest.approx(0.5)
    assert ucb_bonus(BonusParams(0.7, 0.3, 0.9), 3, 1, 1) == pytest.approx(0.7)


def test_bonus_rejects_zero_counts():
    with pytest.raises(ValueError):
        ucb_bonus(EXPERIMENT_BONUS, 0, 1, 0)


@settings(max_examples=100)
@given(n=st.integers(1, 10**6), c=st.integers(1, 10**5))
def test_bonus_monotone(n, c):
    p = EXPERIMENT_BONUS
    assert ucb_bonus(p, 0, n, c + 1) < ucb_bonus(p, 0, n, c)
    assert ucb_bonus(p, 0, n + 1, c) > ucb_bonus(p, 0, n, c)


def test_bonus_params_validation():
    for bad in [dict(beta=0), dict(eta1=1.0), dict(eta2=0), dict(beta=())]:
        with pytest.raises(ValueError):
            BonusParams(**{**dict(beta=1.0, eta1=0.5, eta2=0.5), **bad})
    sched = BonusParams([1.0, 2.0])
    assert sched.beta_at(1) == 2.0 and not sched.shared
    with pytest.raises(ValueError):
        sched.beta_at(2)


def test_config_validation():
    for bad in [dict(num_simulations=0), dict(max_depth=0), dict(gamma=1.0),
                dict(candidate_order="random")]:
        with pytest.raises(ValueError):
            SearchConfig(**bad)


# -- select_child ------------------------------------------------------------

def two_arm_node(role):
    node = TreeNode(None, 0, role)
    node.candidates = ["a", "b"]
    node.visits = 10
    for a, n, mean in [("a", 9, 0.5), ("b", 1, 0.4)]:
        child = TreeNode(None, 1, role.other)
        child.visits = n
        node.children[a] = child
        node.edge_sum[a] = mean * n
    return node


# beta chosen so that the bonuses are a: 0.1, b: 0.3
TWO_ARM = BonusParams(0.3 / math.sqrt(10), 0.5, 0.5)


def test_select_child_max_adds_bonus():
    node = two_arm_node(PlayerRole.MAX)
    assert ucb_bonus(TWO_ARM, 0, 10, 9) == pytest.approx(0.1)
    assert select_child(node, PlayerRole.MAX, TWO_ARM) == "b"


def test_select_child_min_subtracts_bonus():
    assert select_child(two_arm_node(PlayerRole.MIN), PlayerRole.MIN, TWO_ARM) == "b"


def test_select_child_unvisited_first_in_candidate_order():
    node = TreeNode(None, 0, PlayerRole.MAX)
    node.candidates = ["c", "a"]
    assert select_child(node, PlayerRole.MAX, EXPERIMENT_BONUS) == "c"


def test_select_child_no_candidates(ttt):
    node = TreeNode(ttt.initial_state(), 0, PlayerRole.MAX)
    node.candidates = []
    with pytest.raises(NoActions):
        select_child(node, PlayerRole.MAX, EXPERIMENT_BONUS)


# -- backup_path ---------------------------------------------------------------

def test_backup_one_step():
    path = [(PlayerRole.MAX, "a", 0.5), (PlayerRole.MIN, "b", -0.25)]
    g0, g_half = backup_path(path, 1.0, 0.9)
    assert g_half == pytest.approx(0.65)
    assert g0 == pytest.approx(1.15)


@given(depth=st.integers(1, 6), v=st.floats(-5, 5), gamma=st.floats(0, 0.99))
def test_backup_zero_rewards(depth, v, gamma):
    path = []
    for _ in range(depth):
        path += [(PlayerRole.MAX, "a", 0.0), (PlayerRole.MIN, "b", 0.0)]
    returns = backup_path(path, v, gamma)
    for i in range(depth):
        assert returns[2 * i] == pytest.approx(gamma ** (depth - i) * v, abs=1e-12)


def test_backup_zero_leaf():
    path = [(PlayerRole.MAX, "a", 0.0), (PlayerRole.MIN, "b", 0.0)] * 3
    assert backup_path(path, 0.0, 0.5) == [0.0] * 6


# -- best_action -----------------------------------------------------------------

def test_best_action_examples():
    stats = [ActionStats("a", 10, 0.9), ActionStats("b", 10, 0.1)]
    assert best_action(stats, PlayerRole.MAX) == "a"
    assert best_action(stats, PlayerRole.MIN) == "b"
    tied = [ActionStats("b", 20, 0.5), ActionStats("a", 30, 0.5)]
    assert best_action(tied, PlayerRole.MAX) == "a"
    same = [ActionStats("b", 5, 0.5), ActionStats("a", 5, 0.5)]
    assert best_action(same, PlayerRole.MAX) == "b"


def test_best_action_ignores_unvisited():
    stats = [ActionStats("a", 0, None), ActionStats("b", 1, -1.0)]
    assert best_action(stats, PlayerRole.MAX) == "b"
    with pytest.raises(NoActions):
        best_action([ActionStats("a", 0, None)], PlayerRole.MAX)


# -- run_search ----------------------------------------------------------------------

def test_single_path_arithmetic():
    g = SyntheticGame(2, 3)
    r = run_search(g, g.initial_state(), SearchConfig(1, 1, 0.5), IdentityPruner(), ConstantCritic(3.0))
    assert r.root_value == 1.5


@pytest.mark.parametrize("gamma", [0.5, 0.9])
@pytest.mark.parametrize("depth", [1, 3])
@pytest.mark.parametrize("v", [1.0, -2.0])
def test_gamma_asymmetry(gamma, depth, v):
    g = SyntheticGame(2, depth + 1)
    r = run_search(g, g.initial_state(), SearchConfig(64, depth, gamma), IdentityPruner(), ConstantCritic(v))
    assert abs(r.root_value - gamma ** depth * v) <= 1e-12


def test_root_role_must_match(ttt):
    s = ttt.apply(ttt.initial_state(), "0")
    with pytest.raises(ValueError):
        run_search(ttt, s, SearchConfig(5, 1), IdentityPruner(), OutcomeCritic(), root_role=PlayerRole.MAX)
    r = run_search(ttt, s, SearchConfig(20, 4), IdentityPruner(), OutcomeCritic(), root_role=PlayerRole.MIN)
    assert r.root_role is PlayerRole.MIN


def test_terminal_root_rejected(ttt):
    with pytest.raises(ValueError):
        run_search(ttt, ttt.replay("03142"), SearchConfig(5, 1), IdentityPruner(), OutcomeCritic())


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 200), depth=st.integers(1, 4), seed=st.integers(0, 1000),
       width=st.integers(1, 3), shuffle=st.booleans())
def test_count_conservation(n, depth, seed, width, shuffle):
    g = RandomRewardGame(3, 3, seed=seed)
    cfg = SearchConfig(n, depth, 0.9, rng_seed=seed, randomize_ties=shuffle)
    r = run_search(g, g.initial_state(), cfg, RandomPruner(width, seed), ConstantCritic(0.5))
    assert sum(s.visits for s in r.actions) == n
    for node in r.root.iter_nodes():
        if node.children:
            assert sum(c.visits for c in node.children.values()) == node.visits


@settings(max_examples=20, deadline=None)
@given(n=st.integers(1, 300), depth=st.integers(1, 3), seed=st.integers(0, 1000),
       gamma=st.sampled_from([0.0, 0.5, 0.9]), c=st.floats(-3, 3))
def test_node_means_within_magnitude_bounds(n, depth, seed, gamma, c):
    g = RandomRewardGame(3, 3, r_max=1.0, seed=seed)
    bounds = magnitude_bounds(g.r_max, gamma, max(0.0, abs(c) - 2 / (1 - gamma)) + 1.0, depth)
    r = run_search(g, g.initial_state(), SearchConfig(n, depth, gamma, rng_seed=seed),
                   IdentityPruner(), ConstantCritic(c))
    for node in r.root.iter_nodes():
        if node.visits:
            assert abs(node.value_sum / node.visits) <= bounds.levels[node.level / 2] + 1e-9


def test_determinism(ttt):
    cfg = SearchConfig(300, 4, 0.99, rng_seed=7, randomize_ties=True)
    a = run_search(ttt, ttt.initial_state(), cfg, IdentityPruner(), OutcomeCritic())
    b = run_search(ttt, ttt.initial_state(), cfg, IdentityPruner(), OutcomeCritic())
    assert a.to_json() == b.to_json()


def test_result_serialises(ttt):
    r = run_search(ttt, ttt.initial_state(), SearchConfig(30, 2), IdentityPruner(), OutcomeCritic())
    d = r.to_dict()
    assert d["root_value"] == r.root_value == r.root.value_sum / 30
    assert set(d["diagnostics"]) == {"tree_size", "depth_reached", "pruner_calls", "critic_calls",
                                     "terminal_leaves"}
    assert isinstance(r, SearchResult)


def test_candidate_order_modes(ttt):
    pruner = MockPruner({(): ["8", "0", "4"]})
    first = {}
    for order in ("pruner", "sorted"):
        r = run_search(ttt, ttt.initial_state(), SearchConfig(1, 1, candidate_order=order), pruner,
                       OutcomeCritic())
        first[order] = [s.action for s in r.actions if s.visits][0]
        assert [s.action for s in r.actions] == (["8", "0", "4"] if order == "pruner" else ["0", "4", "8"])
    assert first == {"pruner": "8", "sorted": "0"}


def test_early_terminal_uses_outcome(ttt):
    # X to move can win at once on 2; with H=3 the search sees the terminal leaf
    s = ttt.replay("0314")
    r = run_search(ttt, s, SearchConfig(200, 3), IdentityPruner(), ConstantCritic(0.0))
    assert r.best_action == "2"
    assert r.diagnostics["terminal_leaves"] > 0
    assert r.root.children["2"].children == {}


class Boom:
    def prune(self, game, state):
        raise RuntimeError("boom")

    def evaluate(self, game, state):
        raise RuntimeError("boom")


def test_oracle_failures_are_wrapped(ttt):
    with pytest.raises(PrunerFailure) as exc:
        run_search(ttt, ttt.initial_state(), SearchConfig(2, 1), Boom(), OutcomeCritic())
    assert exc.value.state == ttt.initial_state()
    with pytest.raises(CriticFailure):
        run_search(ttt, ttt.initial_state(), SearchConfig(2, 1), IdentityPruner(), Boom())


class Fixed:
    def __init__(self, actions):
        self.actions = actions

    def prune(self, game, state):
        return self.actions


def test_illegal_or_empty_pruner_output(ttt):
    with pytest.raises(PrunerFailure):
        run_search(ttt, ttt.initial_state(), SearchConfig(2, 1), Fixed(["9"]), OutcomeCritic())
    with pytest.raises(NoActions):
        run_search(ttt, ttt.initial_state(), SearchConfig(2, 1), Fixed([]), OutcomeCritic())


def test_duplicate_candidates_dropped(ttt):
    r = run_search(ttt, ttt.initial_state(), SearchConfig(4, 1), MockPruner({(): ["4", "0", "4"]}),
                   OutcomeCritic())
    assert [s.action for s in r.actions] == ["4", "0"]


MATE_IN_1 = "6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1"


@pytest.mark.parametrize("seed", range(5))
def test_mate_in_one_with_cheat_pruner(seed):
    g = Chess(MATE_IN_1)
    s = g.initial_state()
    pruner = CheatPruner({(): "a1a8"}, k=5, seed=seed)
    r = run_search(g, s, SearchConfig(50, 1, rng_seed=seed), pruner, OutcomeCritic(1, -1))
    assert g.apply(s, r.best_action).board.is_checkmate()


def test_ttt_converges_to_draw(ttt):
    cfg = SearchConfig(10000, 9, 0.99, bonus=BonusParams(0.25, 0.25, 0.5))
    r = run_search(ttt, ttt.initial_state(), cfg, IdentityPruner(), OutcomeCritic())
    assert abs(r.root_value) <= 0.15


def one_step_share(role, n, seed):
    """Share of visits the better arm of a two-arm single-step game gets."""
    if role is PlayerRole.MAX:
        g = SyntheticGame(2, 1, reward_fn=lambda h, a: 1.0 if (not h and a == "0") else 0.0)
        pruner = MockPruner({(): ["0", "1"]}, default=["0"])
    else:
        g = SyntheticGame(2, 1, reward_fn=lambda h, a: -1.0 if (len(h) == 1 and a == "0") else 0.0)
        pruner = MockPruner({("0",): ["0", "1"]}, default=["0"])
    cfg = SearchConfig(n, 1, 0.9, rng_seed=seed, randomize_ties=True)
    r = run_search(g, g.initial_state(), cfg, pruner, ConstantCritic(0.0))
    node = r.root if role is PlayerRole.MAX else r.root.children["0"]
    return node.children["0"].visits / node.visits


@pytest.mark.parametrize("role", [PlayerRole.MAX, PlayerRole.MIN])
def test_bonus_sign_favours_better_arm(role):
    shares = [statistics.median(one_step_share(role, n, s) for s in range(5)) for n in (10, 100, 1000, 10000)]
    assert shares == sorted(shares)
    assert shares[-1] > 0.5
