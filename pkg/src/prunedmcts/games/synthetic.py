"""Small synthetic trees with explicit step rewards.

These exist to exercise the reward and discounting paths, which the board
games never touch (they emit zero step rewards).
"""
from __future__ import annotations

import hashlib
import struct
from typing import Callable

from ..core import Game, GameOutcome, GameState


def stable_uniform(seed: int, *parts) -> float:
    """Deterministic uniform draw in [0, 1) from a seed and arbitrary parts."""
    h = hashlib.sha256(repr((seed,) + parts).encode()).digest()
    return struct.unpack(">Q", h[:8])[0] / 2.0**64


class SyntheticGame(Game):
    """Uniform tree: ``branching`` actions per ply, ``depth`` full steps.

    ``reward_fn(history, action)`` gives R(s, a); ``terminal_fn(history)``
    gives the outcome at the leaves (default: draw).
    """

    name = "synthetic"

    def __init__(self, branching: int = 2, depth: int = 1,
                 reward_fn: Callable[[tuple, str], float] | None = None,
                 terminal_fn: Callable[[tuple], GameOutcome] | None = None,
                 r_max: float = 1.0):
        if branching < 1 or depth < 1:
            raise ValueError("branching and depth must be positive")
        self.branching = branching
        self.depth = depth
        self.actions = [str(i) for i in range(branching)]
        self._reward_fn = reward_fn or (lambda history, action: 0.0)
        self._terminal_fn = terminal_fn or (lambda history: GameOutcome.DRAW)
        self.r_max = r_max

    # the board is the history itself
    def _initial_board(self):
        return ()

    def _legal(self, board, ply):
        return self.actions

    def _play(self, board, action, ply):
        return board + (action,)

    def _outcome(self, board, ply):
        if ply >= 2 * self.depth:
            return self._terminal_fn(board)
        return GameOutcome.ONGOING

    def reward(self, state: GameState, action: str) -> float:
        return float(self._reward_fn(state.history, action))


class RandomRewardGame(SyntheticGame):
    """Synthetic tree whose per-edge rewards are seeded draws in [-r_max, r_max].

    Leaves end in a seeded win/loss/draw when ``random_outcomes`` is set.
    """

    name = "random-reward"

    def __init__(self, branching: int = 3, depth: int = 2, r_max: float = 1.0,
                 seed: int = 0, random_outcomes: bool = True):
        self.seed = seed

        def reward_fn(history, action):
            return r_max * (2.0 * stable_uniform(seed, "r", history, action) - 1.0)

        def terminal_fn(history):
            if not random_outcomes:
                return GameOutcome.DRAW
            u = stable_uniform(seed, "t", history)
            return (GameOutcome.MIN_WINS, GameOutcome.DRAW, GameOutcome.MAX_WINS)[int(u * 3)]

        super().__init__(branching, depth, reward_fn, terminal_fn, r_max)
