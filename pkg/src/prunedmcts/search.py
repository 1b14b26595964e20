"""Monte-Carlo tree search self-play over a pruned action space.

Each simulation walks from the root for at most ``max_depth`` full steps.
The Max player picks the candidate maximising empirical mean return plus a
polynomial bonus, the Min player the candidate minimising mean minus the
bonus.  The leaf is scored by the critic (or by its outcome if the game
ended early) and the return is propagated back: a Max step adds its reward,
a Min step adds its reward and discounts the continuation by gamma.

Edge and node statistics are cumulative sums of per-visit returns, so
``edge_sum[a] / child.visits`` is the empirical mean return of ``a``.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Sequence

from .core import Game, GameState, NoActions, PlayerRole


class PrunerFailure(RuntimeError):
    def __init__(self, state: GameState, cause: BaseException):
        super().__init__(f"pruner failed at history {list(state.history)}: {cause!r}")
        self.state = state


class CriticFailure(RuntimeError):
    def __init__(self, state: GameState, cause: BaseException):
        super().__init__(f"critic failed at history {list(state.history)}: {cause!r}")
        self.state = state


@dataclass(frozen=True)
class BonusParams:
    """B_h(s, a) = beta_h * N(s)**eta1 / N(s∘a)**eta2.

    ``beta`` is a single value or a per-level schedule indexed by half-step
    level (0 for the root, 1 for the first half-step, ...).
    """

    beta: float | tuple = 1.25
    eta1: float = 0.5
    eta2: float = 0.5

    def __post_init__(self):
        betas = self.beta if isinstance(self.beta, (tuple, list)) else (self.beta,)
        if isinstance(self.beta, list):
            object.__setattr__(self, "beta", tuple(self.beta))
        if not betas or any(b <= 0 for b in betas):
            raise ValueError("beta must be positive")
        if not 0 < self.eta1 < 1 or not 0 < self.eta2 <= 1:
            raise ValueError("need 0 < eta1 < 1 and 0 < eta2 <= 1")

    @property
    def shared(self) -> bool:
        return not isinstance(self.beta, tuple)

    def beta_at(self, level: int) -> float:
        if self.shared:
            return self.beta
        if level >= len(self.beta):
            raise ValueError(f"no beta for level {level}; schedule has {len(self.beta)} entries")
        return self.beta[level]


EXPERIMENT_BONUS = BonusParams(1.25, 0.5, 0.5)
THEORY_BONUS = BonusParams(1.25, 0.25, 0.5)


@dataclass(frozen=True)
class SearchConfig:
    num_simulations: int = 50
    max_depth: int = 10
    gamma: float = 0.99
    bonus: BonusParams = EXPERIMENT_BONUS
    rng_seed: int = 0
    # multiplier applied to +1/-1/0 outcomes when a rollout ends early
    terminal_reward: float = 1.0
    # "pruner" keeps the pruner's ranking as the canonical candidate order
    # (unvisited candidates are tried, and ties broken, in that order);
    # "sorted" uses the game's action encoding order instead
    candidate_order: str = "pruner"
    # shuffle the canonical order per node with the config seed
    randomize_ties: bool = False

    def __post_init__(self):
        if self.num_simulations < 1 or self.max_depth < 1:
            raise ValueError("num_simulations and max_depth must be >= 1")
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must lie in [0, 1)")
        if self.candidate_order not in ("pruner", "sorted"):
            raise ValueError("candidate_order must be 'pruner' or 'sorted'")


def ucb_bonus(params: BonusParams, level: int, n_parent: int, n_child: int) -> float:
    if n_parent < 1 or n_child < 1:
        raise ValueError("visit counts must be >= 1")
    return params.beta_at(level) * n_parent ** params.eta1 / n_child ** params.eta2


class TreeNode:
    __slots__ = ("state", "level", "role", "visits", "value_sum", "children",
                 "edge_sum", "candidates", "terminal_value")

    def __init__(self, state: GameState, level: int, role: PlayerRole):
        self.state = state
        self.level = level          # half-steps below the search root
        self.role = role
        self.visits = 0
        self.value_sum = 0.0
        self.children: dict[str, TreeNode] = {}
        self.edge_sum: dict[str, float] = {}
        self.candidates: list[str] | None = None
        self.terminal_value: float | None = None

    def mean(self, action: str) -> float:
        return self.edge_sum[action] / self.children[action].visits

    def child_visits(self, action: str) -> int:
        child = self.children.get(action)
        return child.visits if child is not None else 0

    def iter_nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children.values())


def select_child(node: TreeNode, role: PlayerRole, params: BonusParams) -> str:
    """Unvisited candidates first, then the UCB rule; ties keep candidate order."""
    if not node.candidates:
        raise NoActions(f"no candidate actions at history {list(node.state.history)}")
    for a in node.candidates:
        if node.child_visits(a) == 0:
            return a
    best, best_score = None, None
    for a in node.candidates:
        bonus = ucb_bonus(params, node.level, node.visits, node.children[a].visits)
        if role is PlayerRole.MAX:
            score = node.mean(a) + bonus
            better = best_score is None or score > best_score
        else:
            score = node.mean(a) - bonus
            better = best_score is None or score < best_score
        if better:
            best, best_score = a, score
    return best


def backup_path(path: Sequence[tuple], leaf_value: float, gamma: float) -> list[float]:
    """Propagate one simulation's return up ``path``.

    ``path`` holds ``(node, action, reward)`` entries from the root down;
    returns the per-entry returns G in the same order.  Works on any objects
    with ``role``, ``value_sum`` and ``edge_sum``; pass plain tuples with a
    role instead of nodes to use it as a calculator.
    """
    returns = [0.0] * len(path)
    g = leaf_value
    for i in range(len(path) - 1, -1, -1):
        node, action, reward = path[i]
        role = node.role if hasattr(node, "role") else node
        g = reward + (gamma * g if role is PlayerRole.MIN else g)
        returns[i] = g
        if hasattr(node, "edge_sum"):
            node.edge_sum[action] = node.edge_sum.get(action, 0.0) + g
            node.value_sum += g
    return returns


@dataclass
class ActionStats:
    action: str
    visits: int
    mean_return: float | None


@dataclass
class SearchResult:
    root_value: float
    best_action: str
    actions: list[ActionStats]
    root_role: PlayerRole
    diagnostics: dict = field(default_factory=dict)
    root: TreeNode | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "root_value": self.root_value,
            "best_action": self.best_action,
            "root_role": self.root_role.value,
            "actions": [{"action": s.action, "visits": s.visits, "mean_return": s.mean_return}
                        for s in self.actions],
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def best_action(result: SearchResult | Sequence[ActionStats], role: PlayerRole) -> str:
    """Best root action by mean return; ties go to more visits, then listing order."""
    stats = result.actions if isinstance(result, SearchResult) else result
    visited = [s for s in stats if s.visits > 0 and s.mean_return is not None]
    if not visited:
        raise NoActions("no visited root action")
    sign = 1.0 if role is PlayerRole.MAX else -1.0
    best = visited[0]
    for s in visited[1:]:
        a, b = sign * s.mean_return, sign * best.mean_return
        if a > b or (a == b and s.visits > best.visits):
            best = s
    return best.action


class _Search:
    def __init__(self, game: Game, config: SearchConfig, pruner, critic):
        self.game = game
        self.config = config
        self.pruner = pruner
        self.critic = critic
        self.rng = random.Random(config.rng_seed)
        self.pruner_calls = 0
        self.critic_calls = 0
        self.terminal_leaves = 0
        self.nodes = 0
        self.deepest = 0

    def node(self, state: GameState, level: int) -> TreeNode:
        self.nodes += 1
        self.deepest = max(self.deepest, level)
        node = TreeNode(state, level, self.game.turn_of(state))
        outcome = self.game.outcome(state)
        if outcome.is_terminal:
            node.terminal_value = outcome.terminal_value * self.config.terminal_reward
        return node

    def expand(self, node: TreeNode):
        self.pruner_calls += 1
        try:
            actions = list(self.pruner.prune(self.game, node.state))
        except NoActions:
            raise
        except Exception as exc:
            raise PrunerFailure(node.state, exc) from exc
        if not actions:
            raise NoActions(f"pruner returned nothing at history {list(node.state.history)}")
        legal = set(self.game.legal_actions(node.state))
        bad = [a for a in actions if a not in legal]
        if bad:
            raise PrunerFailure(node.state, ValueError(f"illegal candidates {bad}"))
        # duplicates dropped, first occurrence kept
        actions = list(dict.fromkeys(actions))
        if self.config.candidate_order == "sorted":
            actions.sort()
        if self.config.randomize_ties:
            self.rng.shuffle(actions)
        node.candidates = actions

    def evaluate(self, node: TreeNode) -> float:
        self.critic_calls += 1
        try:
            return float(self.critic.evaluate(self.game, node.state))
        except Exception as exc:
            raise CriticFailure(node.state, exc) from exc

    def simulate(self, root: TreeNode):
        cfg = self.config
        horizon = 2 * cfg.max_depth
        node = root
        node.visits += 1
        path = []
        while True:
            if node.terminal_value is not None:
                self.terminal_leaves += 1
                leaf_value = node.terminal_value
                break
            if node.level >= horizon:
                leaf_value = self.evaluate(node)
                break
            if node.candidates is None:
                self.expand(node)
            action = select_child(node, node.role, cfg.bonus)
            reward = self.game.reward(node.state, action)
            child = node.children.get(action)
            if child is None:
                child = self.node(self.game.apply(node.state, action), node.level + 1)
                node.children[action] = child
            child.visits += 1
            path.append((node, action, reward))
            node = child
        node.value_sum += leaf_value
        backup_path(path, leaf_value, cfg.gamma)


def run_search(game: Game, root: GameState, config: SearchConfig, pruner, critic,
               root_role: PlayerRole | None = None) -> SearchResult:
    """Run ``config.num_simulations`` simulations from ``root``."""
    role = game.turn_of(root)
    if root_role is not None and root_role is not role:
        raise ValueError(f"root_role {root_role} disagrees with the state's turn {role}")
    if game.is_terminal(root):
        raise ValueError("cannot search from a terminal state")
    search = _Search(game, config, pruner, critic)
    tree = search.node(root, 0)
    for _ in range(config.num_simulations):
        search.simulate(tree)
    stats = [ActionStats(a, tree.child_visits(a),
                         tree.mean(a) if tree.child_visits(a) else None)
             for a in tree.candidates]
    result = SearchResult(
        root_value=tree.value_sum / config.num_simulations,
        best_action="",
        actions=stats,
        root_role=role,
        diagnostics={
            "tree_size": search.nodes,
            "depth_reached": search.deepest,
            "pruner_calls": search.pruner_calls,
            "critic_calls": search.critic_calls,
            "terminal_leaves": search.terminal_leaves,
        },
        root=tree,
    )
    result.best_action = best_action(result, role)
    return result
