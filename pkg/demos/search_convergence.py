"""Root value error of the pruned search on tic-tac-toe as the budget grows.

Uses an exact critic at depth 1, so only the bandit part of the search is
being measured.  Compare the two exponent presets.
"""
import statistics

from prunedmcts.exact import solve
from prunedmcts.games import TicTacToe
from prunedmcts.oracles import ExactCritic, IdentityPruner
from prunedmcts.search import BonusParams, SearchConfig, run_search

game = TicTacToe()
critic = ExactCritic(solve(game, gamma=0.99))

for label, bonus in [("eta=(1/4,1/2) beta=0.5", BonusParams(0.5, 0.25, 0.5)),
                     ("eta=(1/2,1/2) beta=1.25", BonusParams(1.25, 0.5, 0.5))]:
    print(label)
    for n in (100, 400, 1600, 6400):
        errs = []
        for seed in range(10):
            cfg = SearchConfig(n, 1, 0.99, bonus, seed, randomize_ties=True)
            errs.append(abs(run_search(game, game.initial_state(), cfg, IdentityPruner(), critic).root_value))
        print(f"  N={n:5d}  median |V~ - V*| = {statistics.median(errs):.3f}")
