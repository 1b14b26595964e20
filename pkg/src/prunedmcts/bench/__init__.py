"""Experiment harnesses: chess puzzles, MiniGo battles and UCI engine matches."""
from .matches import MatchSummary, minigo_opponent, run_chess_match, run_minigo_match
from .puzzles import InvalidLine, Puzzle, PuzzleSet, SchemaError, load_puzzles, run_puzzle, solve_puzzles
from .records import (Agent, MatchRecord, audit_record, read_jsonl, score_of, summary_csv,
                      write_jsonl)
from .uci import EngineProtocolError, EngineTimeout, UciEngine

__all__ = [
    "Agent", "EngineProtocolError", "EngineTimeout", "InvalidLine", "MatchRecord", "MatchSummary",
    "Puzzle", "PuzzleSet", "SchemaError", "UciEngine", "audit_record", "load_puzzles",
    "minigo_opponent", "read_jsonl", "run_chess_match", "run_minigo_match", "run_puzzle",
    "score_of", "solve_puzzles", "summary_csv", "write_jsonl",
]
