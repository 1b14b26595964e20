"""Shared contract for deterministic turn-based zero-sum two-player games.

A state is identified by the sequence of actions played from the game's
initial position.  The player to move at ply 0 is always the Max player and
the roles alternate every ply, so a "full step" is one Max action followed by
one Min action and the state between them is a half-step state.

Every value in this package (critic outputs, terminal values, search returns)
is expressed from the Max player's perspective.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Hashable, Sequence


class GameError(Exception):
    """Base class for rule violations raised by games."""


class IllegalAction(GameError):
    def __init__(self, action, reason: str = "not a legal action"):
        super().__init__(f"{action!r}: {reason}")
        self.action = action


class TerminalState(GameError):
    """Raised when an action is applied to a finished game."""


class NoActions(GameError):
    """A pruner returned no candidate actions for a non-terminal state."""


class PlayerRole(enum.Enum):
    MAX = "max"
    MIN = "min"

    @property
    def other(self) -> "PlayerRole":
        return PlayerRole.MIN if self is PlayerRole.MAX else PlayerRole.MAX


class GameOutcome(enum.Enum):
    MAX_WINS = "max_wins"
    MIN_WINS = "min_wins"
    DRAW = "draw"
    ONGOING = "ongoing"

    @property
    def is_terminal(self) -> bool:
        return self is not GameOutcome.ONGOING

    @property
    def terminal_value(self) -> float:
        """+1 / -1 / 0 from the Max perspective."""
        if self is GameOutcome.ONGOING:
            raise ValueError("an ongoing game has no terminal value")
        return {GameOutcome.MAX_WINS: 1.0, GameOutcome.MIN_WINS: -1.0, GameOutcome.DRAW: 0.0}[self]

    def value_for(self, role: PlayerRole) -> float:
        v = self.terminal_value
        return v if role is PlayerRole.MAX else -v


@dataclass(frozen=True, eq=False)
class GameState:
    """An action history plus the cached board it produces.

    Equality and hashing use the history only: two transposed move orders
    are distinct states.
    """

    history: tuple
    board: Any = field(repr=False)

    @property
    def ply(self) -> int:
        return len(self.history)

    def __eq__(self, other):
        if not isinstance(other, GameState):
            return NotImplemented
        return self.history == other.history

    def __hash__(self):
        return hash(self.history)


def turn_of(state: GameState) -> PlayerRole:
    return PlayerRole.MAX if state.ply % 2 == 0 else PlayerRole.MIN


class Game:
    """Base class for concrete games.

    Subclasses implement ``_initial_board``, ``_legal``, ``_play`` and
    ``_outcome`` on boards; this class adds history bookkeeping and
    validation.  Actions are strings in the game's canonical encoding, and
    ``legal_actions`` is sorted lexicographically on that encoding.
    """

    name = "game"
    # bound on |R(s, a)| for every step reward the game emits
    r_max = 0.0

    def initial_state(self) -> GameState:
        return GameState((), self._initial_board())

    def legal_actions(self, state: GameState) -> list[str]:
        if self._outcome(state.board, state.ply).is_terminal:
            return []
        return sorted(self._legal(state.board, state.ply))

    def apply(self, state: GameState, action: str) -> GameState:
        if self._outcome(state.board, state.ply).is_terminal:
            raise TerminalState(f"{self.name}: game already finished at ply {state.ply}")
        if action not in self._legal(state.board, state.ply):
            raise IllegalAction(action)
        return GameState(state.history + (action,), self._play(state.board, action, state.ply))

    def outcome(self, state: GameState) -> GameOutcome:
        return self._outcome(state.board, state.ply)

    def is_terminal(self, state: GameState) -> bool:
        return self.outcome(state).is_terminal

    def reward(self, state: GameState, action: str) -> float:
        """Step reward R(s, a) to the Max player.  Built-in games emit 0."""
        return 0.0

    def turn_of(self, state: GameState) -> PlayerRole:
        return turn_of(state)

    def state_key(self, state: GameState) -> Hashable:
        """Memoisation key for exact solvers.

        Must capture everything legality, rewards and outcomes depend on.
        The default is the full history, which is always safe.
        """
        return state.history

    def replay(self, history: Sequence[str]) -> GameState:
        state = self.initial_state()
        for action in history:
            state = self.apply(state, action)
        return state

    def board_text(self, state: GameState) -> str:
        """Canonical serialisation of the board (used by replay checks and prompts)."""
        return repr(state.board)

    def parse_action(self, state: GameState, text: str) -> str | None:
        """Map free text to an action string, or None if it is not a move token.

        The returned action is not guaranteed to be legal.
        """
        token = text.strip().strip(".,;:!?\"'()[]`*")
        return token or None

    # -- board level hooks ------------------------------------------------
    def _initial_board(self):
        raise NotImplementedError

    def _legal(self, board, ply: int):
        raise NotImplementedError

    def _play(self, board, action: str, ply: int):
        raise NotImplementedError

    def _outcome(self, board, ply: int) -> GameOutcome:
        raise NotImplementedError


def pair_reward(game: Game, state: GameState, a: str, b: str) -> float:
    """r(s, a, b) = R(s, a) + R(s∘a, b)."""
    mid = game.apply(state, a)
    game.apply(mid, b)  # legality of b
    return game.reward(state, a) + game.reward(mid, b)
