"""Mate-in-three fixtures: a pruner that keeps the right move vs no pruning.

Same budget (50 simulations per move) for both agents.
"""
import json
from pathlib import Path

from prunedmcts.bench import Agent, load_puzzles, solve_puzzles, summary_csv
from prunedmcts.oracles import CheatPruner, IdentityPruner, OutcomeCritic
from prunedmcts.search import SearchConfig

fixtures = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
puzzles = load_puzzles(fixtures / "mate_in_3.csv", depths=[3], limit=None)
trees = json.loads((fixtures / "mate_in_3_solutions.json").read_text())
cfg = SearchConfig(50, 3, 0.99)
critic = OutcomeCritic(1.0, -1.0)


def cheat(p):
    table = {tuple(h.split()): m for h, m in trees[p.id].items()}
    return Agent(cfg, CheatPruner(table, k=5), critic, label="cheat")


for name, factory in [("cheat pruner, K=5", cheat),
                      ("no pruning", lambda p: Agent(cfg, IdentityPruner(), critic))]:
    print(name)
    print(summary_csv(solve_puzzles(puzzles, factory)))
