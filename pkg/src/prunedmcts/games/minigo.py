"""Small-board Go with area scoring.

Black moves first and is the Max player.  Rules: suicide is illegal, komi is
zero, the game ends after two consecutive passes (or at ``max_plies``), and
ko is either positional superko (no whole-board repetition, the default) or
simple ko (no immediate return to the position before the opponent's move).
Actions are "A1".."E5" (column letter, row number) plus "pass".
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core import Game, GameError, GameOutcome, GameState

EMPTY, BLACK, WHITE = 0, 1, 2
PASS = "pass"
_SYMBOLS = {EMPTY: ".", BLACK: "X", WHITE: "O"}


class GameOngoing(GameError):
    """Scoring requested before the game ended."""


def _neighbors(size: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for i in range(size * size):
        r, c = divmod(i, size)
        nb = []
        if r > 0:
            nb.append(i - size)
        if r < size - 1:
            nb.append(i + size)
        if c > 0:
            nb.append(i - 1)
        if c < size - 1:
            nb.append(i + 1)
        out.append(tuple(nb))
    return tuple(out)


def point_name(index: int, size: int) -> str:
    r, c = divmod(index, size)
    return f"{chr(ord('A') + c)}{r + 1}"


def point_index(name: str, size: int) -> int:
    name = name.strip().upper()
    if len(name) < 2 or not name[1:].isdigit():
        raise ValueError(f"bad point {name!r}")
    c = ord(name[0]) - ord("A")
    r = int(name[1:]) - 1
    if not (0 <= c < size and 0 <= r < size):
        raise ValueError(f"point {name!r} off a {size}x{size} board")
    return r * size + c


@dataclass(frozen=True, eq=False)
class GoBoard:
    size: int
    stones: tuple
    # earlier stone configurations: all of them (superko) or just the
    # previous one (simple ko)
    previous: frozenset | tuple
    passes: int = 0
    captures: tuple = (0, 0)  # stones captured by (black, white)
    _legal: dict | None = field(default=None, repr=False, compare=False)


def _group(stones, start, nbrs):
    color = stones[start]
    group, libs, stack = {start}, set(), [start]
    while stack:
        p = stack.pop()
        for q in nbrs[p]:
            s = stones[q]
            if s == EMPTY:
                libs.add(q)
            elif s == color and q not in group:
                group.add(q)
                stack.append(q)
    return group, libs


def area_score(stones, size: int) -> int:
    """Black area minus white area (stones plus single-colour-bordered empties)."""
    nbrs = _neighbors(size)
    black = sum(1 for s in stones if s == BLACK)
    white = sum(1 for s in stones if s == WHITE)
    seen = set()
    for i, s in enumerate(stones):
        if s != EMPTY or i in seen:
            continue
        region, borders, stack = {i}, set(), [i]
        while stack:
            p = stack.pop()
            for q in nbrs[p]:
                t = stones[q]
                if t == EMPTY:
                    if q not in region:
                        region.add(q)
                        stack.append(q)
                else:
                    borders.add(t)
        seen |= region
        if borders == {BLACK}:
            black += len(region)
        elif borders == {WHITE}:
            white += len(region)
    return black - white


class MiniGo(Game):
    name = "minigo"

    def __init__(self, size: int = 5, ko: str = "positional", max_plies: int | None = None):
        if ko not in ("positional", "simple"):
            raise ValueError(f"unknown ko rule {ko!r}")
        self.size = size
        self.ko = ko
        self.max_plies = max_plies if max_plies is not None else 4 * size * size
        self._nbrs = _neighbors(size)
        self._points = [point_name(i, size) for i in range(size * size)]
        self._index = {name: i for i, name in enumerate(self._points)}

    def _initial_board(self) -> GoBoard:
        empty = (EMPTY,) * (self.size * self.size)
        prev = frozenset([empty]) if self.ko == "positional" else ()
        return GoBoard(self.size, empty, prev)

    def _place(self, board: GoBoard, idx: int, color: int):
        """Resulting (stones, n_captured) or None when suicide/ko forbids it."""
        stones = list(board.stones)
        stones[idx] = color
        enemy = WHITE if color == BLACK else BLACK
        captured = 0
        for q in self._nbrs[idx]:
            if stones[q] == enemy:
                group, libs = _group(stones, q, self._nbrs)
                if not libs:
                    for p in group:
                        stones[p] = EMPTY
                    captured += len(group)
        if captured == 0:
            _, libs = _group(stones, idx, self._nbrs)
            if not libs:
                return None
        new = tuple(stones)
        if self.ko == "positional":
            if new in board.previous:
                return None
        elif board.previous and new == board.previous[0]:
            return None
        return new, captured

    def _legal_moves(self, board: GoBoard, ply: int) -> dict:
        if board._legal is not None:
            return board._legal
        color = BLACK if ply % 2 == 0 else WHITE
        moves = {PASS: None}
        for idx, s in enumerate(board.stones):
            if s == EMPTY:
                res = self._place(board, idx, color)
                if res is not None:
                    moves[self._points[idx]] = res
        object.__setattr__(board, "_legal", moves)
        return moves

    def _legal(self, board: GoBoard, ply: int):
        return self._legal_moves(board, ply)

    def _play(self, board: GoBoard, action: str, ply: int) -> GoBoard:
        if action == PASS:
            # a pass repeats the position, which superko permits; under simple
            # ko it clears any pending ko
            previous = board.previous if self.ko == "positional" else (board.stones,)
            return GoBoard(board.size, board.stones, previous, board.passes + 1, board.captures)
        stones, captured = self._legal_moves(board, ply)[action]
        if self.ko == "positional":
            previous = board.previous | {stones}
        else:
            previous = (board.stones,)
        caps = list(board.captures)
        caps[ply % 2] += captured
        return GoBoard(board.size, stones, previous, 0, tuple(caps))

    def _outcome(self, board: GoBoard, ply: int) -> GameOutcome:
        if board.passes < 2 and ply < self.max_plies:
            return GameOutcome.ONGOING
        s = area_score(board.stones, self.size)
        if s > 0:
            return GameOutcome.MAX_WINS
        if s < 0:
            return GameOutcome.MIN_WINS
        return GameOutcome.DRAW

    def score(self, state: GameState) -> int:
        """Final area score, Black minus White; komi 0."""
        return minigo_score(state.board, ended=self.is_terminal(state))

    def state_key(self, state: GameState):
        b = state.board
        if self.ko == "positional":
            prev = tuple(sorted(b.previous))
        else:
            prev = b.previous
        return (b.stones, prev, min(b.passes, 2), state.ply)

    def board_text(self, state: GameState) -> str:
        rows = []
        for r in range(self.size - 1, -1, -1):
            row = "".join(_SYMBOLS[s] for s in state.board.stones[r * self.size:(r + 1) * self.size])
            rows.append(f"{r + 1} {row}")
        rows.append("  " + "".join(chr(ord("A") + c) for c in range(self.size)))
        return "\n".join(rows)

    def parse_action(self, state: GameState, text: str) -> str | None:
        token = text.strip().strip(".,;:!?\"'()").upper()
        if token == "PASS":
            return PASS
        try:
            return self._points[point_index(token, self.size)]
        except ValueError:
            return None


def minigo_score(board: GoBoard, ended: bool | None = None) -> int:
    """Area score of a finished game.  Raises GameOngoing before two passes.

    ``ended`` lets a caller that knows the game stopped for another reason
    (the ply cap) score the board anyway.
    """
    if ended is None:
        ended = board.passes >= 2
    if not ended:
        raise GameOngoing("score requested before two consecutive passes")
    return area_score(board.stones, board.size)
