"""Match records, their JSON-lines/CSV output and the transcript replay audit."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, replace

from ..core import Game, GameOutcome, IllegalAction, TerminalState
from ..games import Chess, MiniGo, area_score
from ..search import SearchConfig, SearchResult, best_action, run_search

SCORES = {"win": 1.0, "tie": 0.5, "lose": 0.0}


def score_of(result: str) -> float:
    """win -> 1, tie -> 1/2, lose -> 0."""
    try:
        return SCORES[result]
    except KeyError:
        raise ValueError(f"unknown result {result!r}") from None


def oracle_id(oracle) -> dict:
    out = {"type": type(oracle).__name__}
    for attr in ("width", "seed", "reward_scale", "nonterminal", "value", "k_max", "n", "temperature"):
        v = getattr(oracle, attr, None)
        if isinstance(v, (int, float, str)) and not isinstance(v, bool):
            out[attr] = v
    for attr in ("rule_critic", "llm_critic"):
        if hasattr(oracle, attr):
            out[attr] = oracle_id(getattr(oracle, attr))
    return out


def config_snapshot(config: SearchConfig) -> dict:
    d = asdict(config)
    beta = d["bonus"]["beta"]
    d["bonus"]["beta"] = list(beta) if isinstance(beta, tuple) else beta
    return d


@dataclass
class Agent:
    """A search configuration plus its oracles."""

    config: SearchConfig
    pruner: object
    critic: object
    label: str = "agent"

    def choose(self, game: Game, state, seed: int) -> tuple[str, SearchResult]:
        cfg = replace(self.config, rng_seed=seed)
        result = run_search(game, state, cfg, self.pruner, self.critic)
        return best_action(result, result.root_role), result

    def snapshot(self) -> dict:
        return {"label": self.label, "search": config_snapshot(self.config),
                "pruner": oracle_id(self.pruner), "critic": oracle_id(self.critic)}


@dataclass
class Counters:
    searches: int = 0
    simulations: int = 0
    pruner_calls: int = 0
    critic_calls: int = 0

    def add(self, result: SearchResult, sims: int):
        self.searches += 1
        self.simulations += sims
        self.pruner_calls += result.diagnostics["pruner_calls"]
        self.critic_calls += result.diagnostics["critic_calls"]


@dataclass
class MatchRecord:
    game_id: str
    kind: str                     # "puzzle" | "minigo" | "chess"
    config: dict
    start: dict                   # what the audit needs to rebuild the game
    transcript: list
    result: dict
    counters: dict = field(default_factory=dict)
    wall_clock: float | None = None

    def to_dict(self) -> dict:
        d = {"game_id": self.game_id, "kind": self.kind, "config": self.config, "start": self.start,
             "transcript": list(self.transcript), "result": self.result, "counters": self.counters}
        if self.wall_clock is not None:
            d["wall_clock"] = self.wall_clock
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "MatchRecord":
        return cls(d["game_id"], d["kind"], d["config"], d["start"], list(d["transcript"]),
                   d["result"], d.get("counters", {}), d.get("wall_clock"))


def write_jsonl(records, path_or_file):
    text = "".join(r.to_json() + "\n" for r in records)
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def read_jsonl(path) -> list[MatchRecord]:
    with open(path, encoding="utf-8") as fh:
        return [MatchRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


def summary_csv(records) -> str:
    """One table per kind: solved rate by depth, territory by game, score by level."""
    records = list(records)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    puzzles = [r for r in records if r.kind == "puzzle"]
    if puzzles:
        w.writerow(["puzzle_depth", "puzzles", "solved", "solved_percent"])
        for depth in sorted({r.start["depth"] for r in puzzles}):
            rows = [r for r in puzzles if r.start["depth"] == depth]
            solved = sum(r.result["solved"] for r in rows)
            w.writerow([depth, len(rows), solved, f"{100.0 * solved / len(rows):.1f}"])
    go = [r for r in records if r.kind == "minigo"]
    if go:
        w.writerow(["game_id", "seed", "territory_score"])
        for r in go:
            w.writerow([r.game_id, r.start.get("seed", ""), r.result["score"]])
        w.writerow(["mean", "", f"{sum(r.result['score'] for r in go) / len(go):.3f}"])
    chess = [r for r in records if r.kind == "chess"]
    if chess:
        w.writerow(["engine_level", "games", "mean_score"])
        for level in sorted({r.start["level"] for r in chess}):
            rows = [r for r in chess if r.start["level"] == level]
            w.writerow([level, len(rows), f"{sum(r.result['score'] for r in rows) / len(rows):.3f}"])
    return buf.getvalue()


# -- audit --------------------------------------------------------------------

def rebuild_game(record: MatchRecord) -> Game:
    if record.kind in ("puzzle", "chess"):
        return Chess(record.start["fen"])
    if record.kind == "minigo":
        return MiniGo(record.start["size"], record.start.get("ko", "positional"),
                      record.start.get("max_plies"))
    raise ValueError(f"unknown record kind {record.kind!r}")


def audit_record(record: MatchRecord) -> tuple[bool, str]:
    """Replay the transcript and recompute the result; (ok, reason)."""
    game = rebuild_game(record)
    try:
        state = game.replay(record.transcript)
    except (IllegalAction, TerminalState) as exc:
        return False, f"illegal transcript: {exc}"
    outcome = game.outcome(state)
    if record.kind == "puzzle":
        agent_moves = (len(record.transcript) + 1) // 2
        solved = (outcome is GameOutcome.MAX_WINS and state.board.is_checkmate()
                  and agent_moves <= record.start["depth"])
        expected = {"solved": solved}
        got = {"solved": record.result["solved"]}
    elif record.kind == "minigo":
        expected = {"score": area_score(state.board.stones, game.size)}
        got = {"score": record.result["score"]}
        if not outcome.is_terminal:
            return False, "transcript does not reach the end of the game"
    else:
        agent_is_max = record.start.get("agent_color", "white") == ("white" if game.max_is_white else "black")
        if outcome.is_terminal:
            v = outcome.terminal_value if agent_is_max else -outcome.terminal_value
            res = "win" if v > 0 else "lose" if v < 0 else "tie"
        elif len(record.transcript) >= record.start.get("max_plies", float("inf")):
            res = "tie"
        else:
            return False, "transcript stops before the game ended"
        expected = {"result": res, "score": score_of(res)}
        got = {"result": record.result["result"], "score": record.result["score"]}
    if expected != got:
        return False, f"recorded {got} but replay gives {expected}"
    return True, "ok"
