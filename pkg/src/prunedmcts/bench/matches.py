"""MiniGo battles against a plain-MCTS opponent and chess games against a UCI engine."""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..core import PlayerRole
from ..games import MiniGo, area_score
from ..games.chess import STARTING_FEN, Chess
from ..oracles import IdentityPruner, OutcomeCritic
from ..search import SearchConfig
from .records import Agent, Counters, MatchRecord, score_of
from .uci import EngineProtocolError, UciEngine

OPPONENT_SIMS = 1000


@dataclass
class MatchSummary:
    records: list
    scores: list

    @property
    def mean(self) -> float:
        return sum(self.scores) / len(self.scores)


def minigo_opponent(game: MiniGo, sims: int = OPPONENT_SIMS, gamma: float = 0.99) -> Agent:
    """Identity pruner, outcome critic, deep enough to play every game to its end."""
    depth = math.ceil(game.max_plies / 2) + 1
    cfg = SearchConfig(sims, depth, gamma, randomize_ties=True)
    return Agent(cfg, IdentityPruner(), OutcomeCritic(), label="mcts-opponent")


def play_minigo_game(agent: Agent, opponent: Agent, game: MiniGo, seed: int, game_id: str,
                     timing: bool = False) -> MatchRecord:
    t0 = time.perf_counter()
    state = game.initial_state()
    counters = Counters()
    while not game.is_terminal(state):
        mover = agent if game.turn_of(state) is PlayerRole.MAX else opponent
        move, result = mover.choose(game, state, seed * 1000 + state.ply)
        if mover is agent and result is not None:
            counters.add(result, agent.config.num_simulations)
        state = game.apply(state, move)
    return MatchRecord(
        game_id=game_id, kind="minigo",
        config={"agent": agent.snapshot(), "opponent": opponent.snapshot(), "seed": seed},
        start={"size": game.size, "ko": game.ko, "max_plies": game.max_plies, "seed": seed},
        transcript=list(state.history), result={"score": area_score(state.board.stones, game.size)},
        counters=vars(counters), wall_clock=time.perf_counter() - t0 if timing else None)


def run_minigo_match(agent: Agent, games: int = 20, seeds=None, size: int = 5,
                     opponent_sims: int = OPPONENT_SIMS, ko: str = "positional",
                     max_plies: int | None = None, workers: int = 1, timing: bool = False) -> MatchSummary:
    """The agent plays Black (Max); territory scores are Black minus White."""
    seeds = list(range(games)) if seeds is None else list(seeds)
    if len(seeds) != games:
        raise ValueError("need one seed per game")
    game = MiniGo(size, ko, max_plies)
    opponent = minigo_opponent(game, opponent_sims, agent.config.gamma)

    def one(i):
        return play_minigo_game(agent, opponent, game, seeds[i], f"minigo-{i}", timing)

    if workers <= 1:
        records = [one(i) for i in range(games)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(games)))
    return MatchSummary(records, [r.result["score"] for r in records])


def play_chess_game(agent: Agent, engine: UciEngine, seed: int, game_id: str, level: int,
                    color: str = "white", movetime_ms: int = 100, max_plies: int = 300,
                    timing: bool = False) -> MatchRecord:
    t0 = time.perf_counter()
    game = Chess(STARTING_FEN)
    agent_is_white = color == "white"
    state = game.initial_state()
    counters = Counters()
    engine.new_game()
    while not game.is_terminal(state) and state.ply < max_plies:
        if state.board.white == agent_is_white:
            move, result = agent.choose(game, state, seed * 1000 + state.ply)
            counters.add(result, agent.config.num_simulations)
        else:
            move = engine.best_move(STARTING_FEN, list(state.history), movetime_ms)
            if move not in game.legal_actions(state):
                raise EngineProtocolError("engine played an illegal move", move)
        state = game.apply(state, move)
    outcome = game.outcome(state)
    if outcome.is_terminal:
        v = outcome.terminal_value if agent_is_white else -outcome.terminal_value
        res = "win" if v > 0 else "lose" if v < 0 else "tie"
        reason = state.board.outcome()[1]
    else:
        res, reason = "tie", "move cap"
    return MatchRecord(
        game_id=game_id, kind="chess", config={"agent": agent.snapshot(), "seed": seed},
        start={"fen": STARTING_FEN, "level": level, "agent_color": color, "max_plies": max_plies,
               "movetime_ms": movetime_ms},
        transcript=list(state.history), result={"result": res, "score": score_of(res), "reason": reason},
        counters=vars(counters), wall_clock=time.perf_counter() - t0 if timing else None)


def run_chess_match(agent: Agent, engine_command, level: int = 1, games: int = 1, color: str = "white",
                    seeds=None, movetime_ms: int = 100, max_plies: int = 300,
                    engine_timeout: float = 10.0, timing: bool = False) -> MatchSummary:
    """Games against a UCI engine at ``Skill Level`` ``level``; win/tie/lose score 1/0.5/0."""
    if color not in ("white", "black"):
        raise ValueError("color must be white or black")
    seeds = list(range(games)) if seeds is None else list(seeds)
    records = []
    with UciEngine(engine_command, engine_timeout) as engine:
        engine.set_option("Skill Level", level)
        engine.ready()
        for i, seed in enumerate(seeds):
            records.append(play_chess_game(agent, engine, seed, f"chess-{level}-{i}", level, color,
                                           movetime_ms, max_plies, timing))
    return MatchSummary(records, [r.result["score"] for r in records])
