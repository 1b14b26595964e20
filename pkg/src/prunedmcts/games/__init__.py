from .chess import Chess, ParseError, Position, STARTING_FEN, parse_fen, perft
from .minigo import GameOngoing, MiniGo, area_score, minigo_score
from .synthetic import RandomRewardGame, SyntheticGame
from .tictactoe import TicTacToe

__all__ = [
    "Chess", "ParseError", "Position", "STARTING_FEN", "parse_fen", "perft",
    "GameOngoing", "MiniGo", "area_score", "minigo_score",
    "RandomRewardGame", "SyntheticGame", "TicTacToe",
]
