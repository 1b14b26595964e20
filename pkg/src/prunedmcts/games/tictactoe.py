"""3x3 tic-tac-toe.  X is the Max player and moves first; actions are "0".."8"."""
from __future__ import annotations

from ..core import Game, GameOutcome, GameState

EMPTY, X, O = ".", "X", "O"

LINES = (
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
)
ACTIONS = tuple(str(i) for i in range(9))


def winner(cells: str) -> str | None:
    for a, b, c in LINES:
        if cells[a] != EMPTY and cells[a] == cells[b] == cells[c]:
            return cells[a]
    return None


class TicTacToe(Game):
    name = "tictactoe"

    def _initial_board(self) -> str:
        return EMPTY * 9

    def _legal(self, board: str, ply: int):
        return [ACTIONS[i] for i, c in enumerate(board) if c == EMPTY]

    def _play(self, board: str, action: str, ply: int) -> str:
        i = int(action)
        mark = X if ply % 2 == 0 else O
        return board[:i] + mark + board[i + 1:]

    def _outcome(self, board: str, ply: int) -> GameOutcome:
        w = winner(board)
        if w == X:
            return GameOutcome.MAX_WINS
        if w == O:
            return GameOutcome.MIN_WINS
        if EMPTY not in board:
            return GameOutcome.DRAW
        return GameOutcome.ONGOING

    def state_key(self, state: GameState) -> str:
        # the side to move follows from the mark counts
        return state.board

    def board_text(self, state: GameState) -> str:
        b = state.board
        return "\n".join(b[r * 3:r * 3 + 3] for r in range(3))

    def parse_action(self, state: GameState, text: str) -> str | None:
        token = text.strip().strip(".,;:!?\"'()[]`*")
        return token if len(token) == 1 and token in "0123456789" else None
