"""Pruner and critic oracles that need no language model.

A pruner has ``prune(game, state) -> list of actions`` returning a non-empty
subset of the legal actions; a critic has ``evaluate(game, state) -> float``
returning a value from the Max player's perspective.
"""
from __future__ import annotations

import random
from typing import Callable, Iterable, Mapping

from .core import Game, GameState, IllegalAction
from .games.chess import Chess
from .games.synthetic import stable_uniform


class UnsupportedGame(TypeError):
    pass


# -- pruners ----------------------------------------------------------------

class IdentityPruner:
    """Keeps every legal action: plain MCTS."""

    width = None

    def prune(self, game: Game, state: GameState) -> list[str]:
        return game.legal_actions(state)


class MockPruner:
    """Fixed candidate sets.

    ``table`` maps a history tuple to its candidates; histories not in the
    table get ``default`` (filtered to legal moves) or the full legal list.
    """

    def __init__(self, table: Mapping[tuple, Iterable[str]] | None = None,
                 default: Iterable[str] | None = None):
        self.table = {tuple(k): list(v) for k, v in (table or {}).items()}
        self.default = list(default) if default is not None else None

    @property
    def width(self):
        sizes = [len(v) for v in self.table.values()]
        if self.default is not None:
            sizes.append(len(self.default))
        return max(sizes) if sizes else None

    def prune(self, game: Game, state: GameState) -> list[str]:
        legal = game.legal_actions(state)
        chosen = self.table.get(state.history, self.default)
        if chosen is None:
            return legal
        kept = [a for a in chosen if a in legal]
        return kept or legal


class RandomPruner:
    """Keeps a seeded random subset of ``width`` legal actions per state.

    The subset is a function of the game's state key and the seed, so it is
    reproducible across runs and consistent with exact solvers that memoise
    on the same key.
    """

    def __init__(self, width: int, seed: int = 0):
        if width < 1:
            raise ValueError("width must be >= 1")
        self.width = width
        self.seed = seed

    def prune(self, game: Game, state: GameState) -> list[str]:
        legal = game.legal_actions(state)
        if len(legal) <= self.width:
            return legal
        rng = random.Random(int(stable_uniform(self.seed, game.state_key(state)) * 2**53))
        return sorted(rng.sample(legal, self.width))


def cheat_prune(game: Game, state: GameState, solution: str, k: int, seed: int = 0) -> list[str]:
    """The solution first, then k-1 seeded random other legal actions.

    Like a frequency-ranked suggestion list whose top entry is right.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    legal = game.legal_actions(state)
    if solution not in legal:
        raise IllegalAction(solution, "cheat_prune solution is not legal here")
    if len(legal) <= k:
        return legal
    others = [a for a in legal if a != solution]
    rng = random.Random(int(stable_uniform(seed, state.history) * 2**53))
    return [solution] + rng.sample(others, k - 1)


class CheatPruner:
    """Test stand-in for a strong pruner: always keeps a known good move.

    ``solutions`` maps a history (tuple of actions) to the move that must
    survive pruning there; states without an entry get ``k`` seeded random
    legal moves.
    """

    def __init__(self, solutions: Mapping[tuple, str] | Callable[[GameState], str | None],
                 k: int = 5, seed: int = 0):
        self.solutions = solutions
        self.width = k
        self.seed = seed

    def _solution(self, state: GameState):
        if callable(self.solutions):
            return self.solutions(state)
        return self.solutions.get(state.history)

    def prune(self, game: Game, state: GameState) -> list[str]:
        solution = self._solution(state)
        if solution is not None:
            return cheat_prune(game, state, solution, self.width, self.seed)
        legal = game.legal_actions(state)
        if len(legal) <= self.width:
            return legal
        rng = random.Random(int(stable_uniform(self.seed, state.history) * 2**53))
        return sorted(rng.sample(legal, self.width))


# -- critics ----------------------------------------------------------------

def outcome_eval(game: Game, state: GameState, reward_scale: float = 1.0) -> float:
    outcome = game.outcome(state)
    if outcome.is_terminal:
        return outcome.terminal_value * reward_scale
    return 0.0


class OutcomeCritic:
    """Terminal outcome times ``reward_scale``; ``nonterminal`` elsewhere."""

    def __init__(self, reward_scale: float = 1.0, nonterminal: float = 0.0):
        self.reward_scale = reward_scale
        self.nonterminal = nonterminal
        self.bound = max(abs(reward_scale), abs(nonterminal))

    def evaluate(self, game: Game, state: GameState) -> float:
        if game.is_terminal(state):
            return outcome_eval(game, state, self.reward_scale)
        return self.nonterminal


class ConstantCritic:
    def __init__(self, value: float):
        self.value = float(value)
        self.bound = abs(self.value)

    def evaluate(self, game: Game, state: GameState) -> float:
        return self.value


# terminal values of the rule critic: the loss value mirrors the win value
MATERIAL_WIN, MATERIAL_DRAW, MATERIAL_LOSS = 10.0, 0.0, -10.0
CENTIPAWN_DIVISOR = 1000.0


def material_eval(game: Game, state: GameState) -> float:
    """Max-side minus Min-side material in centipawns / 1000; +-10 or 0 when over."""
    if not isinstance(game, Chess):
        raise UnsupportedGame(f"material_eval needs chess, got {game.name}")
    outcome = game.outcome(state)
    if outcome.is_terminal:
        return {1.0: MATERIAL_WIN, 0.0: MATERIAL_DRAW, -1.0: MATERIAL_LOSS}[outcome.terminal_value]
    return game.max_material_edge(state) / CENTIPAWN_DIVISOR


class MaterialCritic:
    def evaluate(self, game: Game, state: GameState) -> float:
        return material_eval(game, state)


def hybrid_eval(game: Game, state: GameState, rule_critic, llm_critic) -> float:
    return rule_critic.evaluate(game, state) + llm_critic.evaluate(game, state)


class HybridCritic:
    """Rule critic plus language-model critic, unclamped."""

    def __init__(self, rule_critic, llm_critic):
        self.rule_critic = rule_critic
        self.llm_critic = llm_critic

    def evaluate(self, game: Game, state: GameState) -> float:
        return hybrid_eval(game, state, self.rule_critic, self.llm_critic)


class ExactCritic:
    """Looks values up in an exact solution (V* or V*_1/2 by the side to move)."""

    def __init__(self, solution):
        self.solution = solution

    def evaluate(self, game: Game, state: GameState) -> float:
        return self.solution.value(state)
