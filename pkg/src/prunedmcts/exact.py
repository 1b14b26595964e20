"""Brute-force ground truth for small games.

``solve`` enumerates every state reachable from a root (memoised on the
game's ``state_key``) and computes the minimax values

    V*(s)    = max_a  R(s, a) + V*_half(s∘a)          (Max to move)
    V*_half(s) = min_b  R(s, b) + gamma * V*(s∘b)      (Min to move)

with terminal states worth their outcome.  The same table then yields
values under a pruned action set, action values Q*, the LogSumExp pruner
error and the pruning-error bound check.
"""
from __future__ import annotations

import ast
import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import Game, GameState, NoActions, PlayerRole


class StateSpaceExceeded(RuntimeError):
    pass


DEFAULT_STATE_CAP = 10**7


@dataclass
class _Node:
    state: GameState
    role: PlayerRole
    terminal_value: float | None
    edges: list = field(default_factory=list)   # (action, reward, child key)


def lse(values: Sequence[float], tau: float) -> float:
    """(1/tau) * log(mean(exp(tau * v))), shifted by max(values) for stability."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("lse of an empty list")
    m = v.max()
    return float(m + (np.log(np.exp(tau * (v - m)).sum()) - math.log(v.size)) / tau)


class ExactSolution:
    """Memoised V*, V*_half and Q* tables for every state reachable from a root."""

    def __init__(self, game: Game, root_key, nodes: dict, gamma: float, values: dict,
                 terminal_reward: float = 1.0):
        self.game = game
        self.root_key = root_key
        self.nodes = nodes
        self.gamma = gamma
        self.values = values
        self.terminal_reward = terminal_reward
        self._pruned: dict = {}
        self._candidates: dict = {}

    def __len__(self):
        return len(self.nodes)

    def key(self, state: GameState):
        return self.game.state_key(state)

    def value(self, state: GameState) -> float:
        """V*(s) for a Max-to-move state, V*_half(s) for a Min-to-move one."""
        try:
            return self.values[self.key(state)]
        except KeyError:
            raise KeyError(f"state {state.history} is not covered by this solution") from None

    @property
    def root_value(self) -> float:
        return self.values[self.root_key]

    def states(self) -> Iterable[GameState]:
        return (n.state for n in self.nodes.values())

    def decision_keys(self):
        return [k for k, n in self.nodes.items() if n.terminal_value is None]

    # -- action values ----------------------------------------------------
    def q_values(self, key, values: dict | None = None) -> dict[str, float]:
        """Bellman-consistent Q*: max over it gives V* (Max) or -V*_half (Min)."""
        values = self.values if values is None else values
        node = self.nodes[key]
        if node.role is PlayerRole.MAX:
            return {a: r + values[c] for a, r, c in node.edges}
        return {a: -(r + self.gamma * values[c]) for a, r, c in node.edges}

    def bellman_residual(self) -> float:
        worst = 0.0
        for key, node in self.nodes.items():
            if node.terminal_value is not None:
                target = node.terminal_value
            else:
                q = self.q_values(key).values()
                target = max(q) if node.role is PlayerRole.MAX else -max(q)
            worst = max(worst, abs(self.values[key] - target))
        return worst

    def optimal_action(self, state: GameState) -> str:
        q = self.q_values(self.key(state))
        return max(sorted(q), key=lambda a: q[a])

    # -- pruning ----------------------------------------------------------
    def candidates(self, pruner) -> dict:
        """Pruned action set per decision state (cached per pruner object)."""
        pid = id(pruner)
        if pid not in self._candidates:
            table = {}
            for key in self.decision_keys():
                node = self.nodes[key]
                acts = list(pruner.prune(self.game, node.state))
                if not acts:
                    raise NoActions(f"pruner returned nothing at history {list(node.state.history)}")
                legal = {a for a, _, _ in node.edges}
                if not set(acts) <= legal:
                    raise ValueError(f"pruner returned illegal actions {set(acts) - legal}")
                table[key] = set(acts)
            self._candidates[pid] = (pruner, table)
        return self._candidates[pid][1]

    def pruned_values(self, pruner) -> dict:
        """Ṽ* / Ṽ*_half with both players restricted to the pruner's sets."""
        pid = id(pruner)
        if pid not in self._pruned:
            allowed = self.candidates(pruner)
            self._pruned[pid] = (pruner, _solve_values(self.nodes, self.gamma, allowed,
                                                       root_key=self.root_key))
        return self._pruned[pid][1]

    def pruned_value(self, pruner, state: GameState | None = None) -> float:
        key = self.root_key if state is None else self.key(state)
        return self.pruned_values(pruner)[key]

    # -- persistence ------------------------------------------------------
    def to_json(self) -> str:
        """Value and Q tables keyed by ``repr(state_key)``."""
        table = {}
        for key, node in self.nodes.items():
            entry = {"role": node.role.value, "value": self.values[key], "history": list(node.state.history)}
            if node.terminal_value is not None:
                entry["terminal_value"] = node.terminal_value
            else:
                entry["q"] = self.q_values(key)
            table[repr(key)] = entry
        return json.dumps({"game": self.game.name, "gamma": self.gamma,
                           "terminal_reward": self.terminal_reward,
                           "root": repr(self.root_key), "states": table}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, game: Game) -> "ExactSolution":
        """Rebuild a solution; states are replayed from their stored histories."""
        data = json.loads(text)
        gamma = data["gamma"]
        nodes, values = {}, {}
        for key_text, entry in data["states"].items():
            key = ast.literal_eval(key_text)
            state = game.replay(entry["history"])
            nodes[key] = _Node(state, PlayerRole(entry["role"]), entry.get("terminal_value"))
            values[key] = entry["value"]
        for key, node in nodes.items():
            if node.terminal_value is None:
                for a in game.legal_actions(node.state):
                    nodes_key = game.state_key(game.apply(node.state, a))
                    node.edges.append((a, game.reward(node.state, a), nodes_key))
        return cls(game, ast.literal_eval(data["root"]), nodes, gamma, values,
                   data.get("terminal_reward", 1.0))


def _explore(game: Game, root: GameState, terminal_reward: float, cap: int) -> dict:
    nodes = {}
    root_key = game.state_key(root)
    queue = deque([(root_key, root)])
    seen = {root_key}
    while queue:
        key, state = queue.popleft()
        outcome = game.outcome(state)
        role = game.turn_of(state)
        if outcome.is_terminal:
            nodes[key] = _Node(state, role, outcome.terminal_value * terminal_reward)
            continue
        node = _Node(state, role, None)
        for a in game.legal_actions(state):
            child = game.apply(state, a)
            ck = game.state_key(child)
            node.edges.append((a, game.reward(state, a), ck))
            if ck not in seen:
                seen.add(ck)
                if len(seen) > cap:
                    raise StateSpaceExceeded(f"more than {cap} states reachable")
                queue.append((ck, child))
        nodes[key] = node
    return nodes


def _topological(nodes: dict, root_key) -> list | None:
    """Children-first order, or None when the key graph has a cycle."""
    order, state = [], {}
    stack = [(root_key, iter(nodes[root_key].edges))]
    state[root_key] = 1
    while stack:
        key, it = stack[-1]
        for _, _, ck in it:
            mark = state.get(ck)
            if mark == 1:
                return None
            if mark is None:
                state[ck] = 1
                stack.append((ck, iter(nodes[ck].edges)))
                break
        else:
            stack.pop()
            state[key] = 2
            order.append(key)
    return order


def _backup(node: _Node, values: dict, gamma: float, allowed) -> float:
    if node.terminal_value is not None:
        return node.terminal_value
    edges = node.edges if allowed is None else [e for e in node.edges if e[0] in allowed]
    if node.role is PlayerRole.MAX:
        return max(r + values[c] for _, r, c in edges)
    return min(r + gamma * values[c] for _, r, c in edges)


def _solve_values(nodes: dict, gamma: float, allowed_sets: dict | None = None,
                  tolerance: float = 1e-9, max_iter: int = 100_000, root_key=None) -> dict:
    def allowed(key):
        return None if allowed_sets is None else allowed_sets.get(key)

    if root_key is None:
        root_key = next(iter(nodes))
    order = _topological(nodes, root_key)
    values: dict = {}
    if order is not None:
        for key in order:
            values[key] = _backup(nodes[key], values, gamma, allowed(key))
        return values
    # cyclic key graph: Gauss-Seidel value iteration to a sup-norm residual
    if gamma >= 1:
        raise ValueError("value iteration on a cyclic state graph needs gamma < 1")
    values = {k: (n.terminal_value or 0.0) for k, n in nodes.items()}
    for _ in range(max_iter):
        residual = 0.0
        for key, node in nodes.items():
            new = _backup(node, values, gamma, allowed(key))
            residual = max(residual, abs(new - values[key]))
            values[key] = new
        if residual < tolerance:
            return values
    raise RuntimeError(f"value iteration did not reach residual {tolerance}")


def solve(game: Game, state: GameState | None = None, gamma: float = 0.99,
          tolerance: float = 1e-9, cap: int = DEFAULT_STATE_CAP,
          terminal_reward: float = 1.0) -> ExactSolution:
    """Exhaustively solve the game from ``state`` (default: the initial state)."""
    root = game.initial_state() if state is None else state
    if not 0 <= gamma <= 1:
        raise ValueError("gamma must lie in [0, 1]")
    nodes = _explore(game, root, terminal_reward, cap)
    root_key = game.state_key(root)
    values = _solve_values(nodes, gamma, tolerance=tolerance, root_key=root_key)
    return ExactSolution(game, root_key, nodes, gamma, values, terminal_reward)


def exact_value(game: Game, state: GameState, gamma: float, tolerance: float = 1e-9,
                cap: int = DEFAULT_STATE_CAP) -> float:
    return solve(game, state, gamma, tolerance, cap).root_value


def pruned_exact_value(game: Game, state: GameState, gamma: float, pruner,
                       cap: int = DEFAULT_STATE_CAP) -> float:
    return solve(game, state, gamma, cap=cap).pruned_value(pruner)


# -- policy evaluation --------------------------------------------------------

@dataclass
class PolicyPair:
    """``mu`` (Max) and ``nu`` (Min) map (game, state) to {action: probability}."""

    mu: Callable[[Game, GameState], dict]
    nu: Callable[[Game, GameState], dict]

    def dist(self, game: Game, state: GameState) -> dict:
        policy = self.mu if game.turn_of(state) is PlayerRole.MAX else self.nu
        d = policy(game, state)
        total = sum(d.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"policy distribution sums to {total}")
        return d

    @classmethod
    def deterministic(cls, max_choice: Callable, min_choice: Callable) -> "PolicyPair":
        return cls(lambda g, s: {max_choice(g, s): 1.0}, lambda g, s: {min_choice(g, s): 1.0})


def policy_value(game: Game, state: GameState, gamma: float, pair: PolicyPair,
                 horizon: int | None = None, terminal_reward: float = 1.0,
                 cap: int = DEFAULT_STATE_CAP) -> float:
    """E[sum_h gamma^h r(s_h, a_h, b_h)] under the pair, by exact expectation.

    Terminal outcomes count like the exact solver's terminal values.  With a
    ``horizon`` (full steps) the sum is truncated there.
    """
    memo: dict = {}
    count = 0

    def value(s: GameState, steps: int) -> float:
        nonlocal count
        key = (s.history, steps)
        if key in memo:
            return memo[key]
        count += 1
        if count > cap:
            raise StateSpaceExceeded(f"more than {cap} states visited")
        outcome = game.outcome(s)
        if outcome.is_terminal:
            v = outcome.terminal_value * terminal_reward
        elif horizon is not None and steps >= horizon:
            v = 0.0
        else:
            maxing = game.turn_of(s) is PlayerRole.MAX
            v = 0.0
            for a, p in pair.dist(game, s).items():
                if p == 0:
                    continue
                child = game.apply(s, a)
                if maxing:
                    v += p * (game.reward(s, a) + value(child, steps))
                else:
                    v += p * (game.reward(s, a) + gamma * value(child, steps + 1))
        memo[key] = v
        return v

    return value(state, 0)


def policy_value_mc(game: Game, state: GameState, gamma: float, pair: PolicyPair,
                    samples: int = 1000, seed: int = 0, horizon: int | None = None,
                    terminal_reward: float = 1.0) -> tuple[float, float]:
    """Monte Carlo estimate of the discounted return: (mean, standard error)."""
    rng = random.Random(seed)
    totals = []
    for _ in range(samples):
        s, discount, total, steps = state, 1.0, 0.0, 0
        while True:
            outcome = game.outcome(s)
            if outcome.is_terminal:
                total += discount * outcome.terminal_value * terminal_reward
                break
            if horizon is not None and steps >= horizon:
                break
            d = pair.dist(game, s)
            actions = sorted(d)
            a = rng.choices(actions, weights=[d[x] for x in actions])[0]
            total += discount * game.reward(s, a)
            if game.turn_of(s) is PlayerRole.MIN:
                discount *= gamma
                steps += 1
            s = game.apply(s, a)
        totals.append(total)
    arr = np.asarray(totals)
    stderr = float(arr.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("nan")
    return float(arr.mean()), stderr


# -- pruning diagnostics ------------------------------------------------------

def _taus(taus) -> list[float]:
    taus = [float(t) for t in taus]
    if any(t <= 0 for t in taus):
        raise ValueError("tau must be positive")
    return taus


def epsilon1(solution: ExactSolution, pruner, taus: Iterable[float]) -> dict[float, float]:
    """max over states (both roles) of |lse(Q*, A, tau) - lse(Q*, Ã, tau)| per tau."""
    allowed = solution.candidates(pruner)
    taus = _taus(taus)
    out = {t: 0.0 for t in taus}
    for key, kept in allowed.items():
        q = solution.q_values(key)
        full = list(q.values())
        if len(kept) == len(full):
            continue
        sub = [q[a] for a in kept]
        for t in taus:
            out[t] = max(out[t], abs(lse(full, t) - lse(sub, t)))
    return out


def epsilon_hat(solution: ExactSolution, pruner) -> float:
    """max over states of |max_A Q* - max_Ã Q*|."""
    allowed = solution.candidates(pruner)
    worst = 0.0
    for key, kept in allowed.items():
        q = solution.q_values(key)
        worst = max(worst, abs(max(q.values()) - max(q[a] for a in kept)))
    return worst


@dataclass
class BoundReport:
    taus: list[float]
    epsilon1: dict[float, float]
    epsilon_hat: float
    rhs: dict[float, float]
    max_gap: float                 # max_s |V*(s) - Ṽ*(s)|
    slack: dict[float, float]      # rhs - max_gap
    violations: list = field(default_factory=list)   # (tau, key, gap, rhs)
    n_actions: int = 0
    n_pruned: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"taus": self.taus, "epsilon1": {str(t): v for t, v in self.epsilon1.items()},
                "epsilon_hat": self.epsilon_hat, "rhs": {str(t): v for t, v in self.rhs.items()},
                "max_gap": self.max_gap, "slack": {str(t): v for t, v in self.slack.items()},
                "violations": [[t, repr(k), g, r] for t, k, g, r in self.violations],
                "n_actions": self.n_actions, "n_pruned": self.n_pruned}


def pruning_bound(gamma: float, eps1: float, n_actions: int, n_pruned: int, tau: float) -> float:
    """(2 / (1 - gamma)) * (eps1 + 2 log(|A| |Ã|) / tau)."""
    return 2.0 / (1.0 - gamma) * (eps1 + 2.0 * math.log(n_actions * n_pruned) / tau)


def check_pruning_bound(solution: ExactSolution, pruner, taus: Iterable[float]) -> BoundReport:
    """Check |V*(s) - Ṽ*(s)| against the LSE pruning bound on every state.

    |A| and |Ã| are the largest action-set sizes over the state space, which
    keeps the bound valid when action sets vary by state.
    """
    if solution.gamma >= 1:
        raise ValueError("the bound needs gamma < 1")
    taus = _taus(taus)
    allowed = solution.candidates(pruner)
    pruned = solution.pruned_values(pruner)
    n_actions = max((len(solution.nodes[k].edges) for k in allowed), default=1)
    n_pruned = max((len(v) for v in allowed.values()), default=1)
    eps1 = epsilon1(solution, pruner, taus)
    gaps = {k: abs(solution.values[k] - pruned[k]) for k in solution.nodes}
    max_gap = max(gaps.values())
    rhs = {t: pruning_bound(solution.gamma, eps1[t], n_actions, n_pruned, t) for t in taus}
    violations = [(t, k, g, rhs[t]) for t in taus for k, g in gaps.items() if g > rhs[t]]
    return BoundReport(taus, eps1, epsilon_hat(solution, pruner), rhs, max_gap,
                       {t: rhs[t] - max_gap for t in taus}, violations, n_actions, n_pruned)


def critic_sup_error(solution: ExactSolution, critic, states: Iterable[GameState] | None = None) -> float:
    """Empirical epsilon_0: max |critic(s) - V*(s)| over ``states`` (default: all)."""
    game = solution.game
    states = solution.states() if states is None else states
    return max((abs(critic.evaluate(game, s) - solution.value(s)) for s in states), default=0.0)


# -- magnitude bounds ---------------------------------------------------------

@dataclass
class MagnitudeBounds:
    v_max: float
    levels: dict[float, float]   # half-step level h -> R^max_h


def magnitude_bounds(r_max: float, gamma: float, eps0: float, horizon: int) -> MagnitudeBounds:
    """Return bounds per level: R_{H-1/2} = R + gamma (V_max + eps0), then
    R_h = R + R_{h+1/2} on Max levels and R_{h-1/2} = R + gamma R_h on Min levels.
    Level H carries the critic bound V_max + eps0.
    """
    if not 0 <= gamma < 1:
        raise ValueError("gamma must lie in [0, 1)")
    v_max = 2.0 * r_max / (1.0 - gamma)
    levels = {float(horizon): v_max + eps0}
    bound = r_max + gamma * (v_max + eps0)
    levels[horizon - 0.5] = bound
    for h in range(horizon - 1, -1, -1):
        bound = r_max + bound
        levels[float(h)] = bound
        if h > 0:
            bound = r_max + gamma * bound
            levels[h - 0.5] = bound
    return MagnitudeBounds(v_max, dict(sorted(levels.items())))
