"""Lichess mate puzzles: loading, validation and solving.

Lichess convention: ``Moves[0]`` is the opponent's move into the puzzle
position, after which the agent (the Max player) and the opponent alternate
along the scripted line.  A line of ``2d`` moves is a mate in ``d``.
"""
from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

from ..core import GameState
from ..games.chess import Chess, ParseError, parse_fen
from .records import Agent, Counters, MatchRecord

LICHESS_COLUMNS = ("PuzzleId", "FEN", "Moves", "Rating", "RatingDeviation", "Popularity",
                   "NbPlays", "Themes", "GameUrl", "OpeningTags")
PUZZLE_DEPTHS = range(3, 9)


class SchemaError(ValueError):
    def __init__(self, row: int, column: str, reason: str = "missing or malformed"):
        super().__init__(f"row {row}, column {column}: {reason}")
        self.row = row
        self.column = column


class InvalidLine(ValueError):
    def __init__(self, puzzle_id: str, reason: str):
        super().__init__(f"puzzle {puzzle_id}: {reason}")
        self.puzzle_id = puzzle_id
        self.reason = reason


def mate_theme(depth: int) -> str:
    """Lichess tags mates of five or more moves as mateIn5."""
    return f"mateIn{min(depth, 5)}"


@dataclass(frozen=True)
class Puzzle:
    id: str
    fen: str                  # before the opponent's leading move
    moves: tuple              # full UCI line including the leading move
    rating: int
    themes: tuple
    depth: int
    start_fen: str            # the agent's starting position

    @property
    def line(self) -> tuple:
        """The moves from the agent's starting position."""
        return self.moves[1:]

    def game(self) -> Chess:
        return Chess(self.start_fen)

    def solutions(self) -> dict:
        """History (from the agent's start) -> scripted agent move."""
        return {tuple(self.line[:i]): self.line[i] for i in range(0, len(self.line), 2)}


def validate_line(puzzle_id: str, fen: str, moves: tuple) -> tuple[str, int]:
    """(agent start FEN, depth), or InvalidLine."""
    try:
        pos = parse_fen(fen)
    except ParseError as exc:
        raise InvalidLine(puzzle_id, f"bad FEN: {exc}") from None
    if len(moves) < 2 or len(moves) % 2:
        raise InvalidLine(puzzle_id, f"a mate line needs an even number of moves, got {len(moves)}")
    start = None
    for i, uci in enumerate(moves):
        if pos.outcome()[0] != "*":
            raise InvalidLine(puzzle_id, f"game over before move {i + 1}")
        move = pos.legal_moves().get(uci)
        if move is None:
            raise InvalidLine(puzzle_id, f"illegal move {uci} at index {i}")
        pos = pos.push(move)
        if i == 0:
            start = pos.fen()
    if not pos.is_checkmate():
        raise InvalidLine(puzzle_id, "line does not end in checkmate")
    return start, len(moves) // 2


@dataclass
class PuzzleSet:
    puzzles: list
    skipped: list = field(default_factory=list)   # InvalidLine errors
    filtered: int = 0

    def __len__(self):
        return len(self.puzzles)

    def __iter__(self):
        return iter(self.puzzles)


def _int(row: dict, column: str, rownum: int) -> int:
    try:
        return int(row[column])
    except (TypeError, ValueError):
        raise SchemaError(rownum, column) from None


def load_puzzles(path, theme: str | None = None, depths: Iterable[int] = PUZZLE_DEPTHS,
                 min_rating: int | None = None, max_rating: int | None = None,
                 limit: int | None = None) -> PuzzleSet:
    """Read a lichess puzzle CSV; keep mate puzzles of the given depths, highest rated first.

    Rows without a mateInN tag, or outside the theme/depth/rating filters,
    are counted in ``filtered``; mate rows whose line does not replay to a
    checkmate of the tagged length are counted in ``skipped``.
    """
    depths = set(depths)
    out = PuzzleSet([])
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in LICHESS_COLUMNS:
            if col not in header:
                raise SchemaError(1, col, "missing from header")
        for rownum, row in enumerate(reader, start=2):
            if None in row or any(row[c] is None for c in LICHESS_COLUMNS):
                raise SchemaError(rownum, "*", "wrong number of fields")
            pid = row["PuzzleId"]
            if not pid or not row["FEN"]:
                raise SchemaError(rownum, "PuzzleId" if not pid else "FEN")
            rating = _int(row, "Rating", rownum)
            themes = tuple(row["Themes"].split())
            moves = tuple(row["Moves"].split())
            tags = [t for t in themes if t.startswith("mateIn")]
            if not tags or (theme is not None and theme not in themes):
                out.filtered += 1
                continue
            if (min_rating is not None and rating < min_rating) or (max_rating is not None and rating > max_rating):
                out.filtered += 1
                continue
            try:
                start, depth = validate_line(pid, row["FEN"], moves)
                if mate_theme(depth) not in themes:
                    raise InvalidLine(pid, f"line is a mate in {depth} but tagged {' '.join(tags)}")
            except InvalidLine as exc:
                out.skipped.append(exc)
                continue
            if depth not in depths:
                out.filtered += 1
                continue
            out.puzzles.append(Puzzle(pid, row["FEN"], moves, rating, themes, depth, start))
    out.puzzles.sort(key=lambda p: (-p.rating, p.id))
    if limit is not None:
        out.puzzles = out.puzzles[:limit]
    return out


def run_puzzle(puzzle: Puzzle, agent: Agent, seed: int = 0, timing: bool = False) -> MatchRecord:
    """Play the agent against the scripted line.

    A move that leaves the line fails the puzzle unless it mates at once.
    """
    t0 = time.perf_counter()
    game = puzzle.game()
    state: GameState = game.initial_state()
    line = puzzle.line
    counters = Counters()
    solved = False
    for k in range(puzzle.depth):
        remaining = puzzle.depth - k
        cfg = replace(agent.config, max_depth=remaining)
        move, result = Agent(cfg, agent.pruner, agent.critic).choose(game, state, seed * 1000 + k)
        counters.add(result, cfg.num_simulations)
        state = game.apply(state, move)
        if state.board.is_checkmate():
            solved = True
            break
        if move != line[2 * k] or 2 * k + 1 >= len(line):
            break
        state = game.apply(state, line[2 * k + 1])
    return MatchRecord(
        game_id=puzzle.id, kind="puzzle",
        config={**agent.snapshot(), "seed": seed},
        start={"fen": puzzle.start_fen, "depth": puzzle.depth, "rating": puzzle.rating},
        transcript=list(state.history), result={"solved": solved},
        counters=vars(counters), wall_clock=time.perf_counter() - t0 if timing else None)


def solve_puzzles(puzzles: Iterable[Puzzle], agent_factory: Callable[[Puzzle], Agent], seed: int = 0,
                  workers: int = 1, timing: bool = False) -> list[MatchRecord]:
    """Run every puzzle (in a bounded pool); records come back in input order."""
    puzzles = list(puzzles)

    def one(p):
        return run_puzzle(p, agent_factory(p), seed, timing)

    if workers <= 1:
        return [one(p) for p in puzzles]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, puzzles))
