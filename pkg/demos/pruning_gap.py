"""How much value does a random pruner give up on tic-tac-toe?

Solves the game exactly, then for pruned widths 1..5 compares the pruned
game's value with V* and with the LSE pruning bound at a few temperatures.
"""
from prunedmcts.exact import check_pruning_bound, solve
from prunedmcts.games import TicTacToe
from prunedmcts.oracles import RandomPruner

game = TicTacToe()
solution = solve(game, gamma=0.99)
print(f"{len(solution)} states, V*(s0) = {solution.root_value:+.4f}")
print("width  V~(s0)   max gap   eps1(tau=10)  bound(tau=10)")
for width in range(1, 6):
    pruner = RandomPruner(width, seed=0)
    rep = check_pruning_bound(solution, pruner, [10.0])
    print(f"{width:5d}  {solution.pruned_value(pruner):+.4f}  {rep.max_gap:8.4f}  "
          f"{rep.epsilon1[10.0]:12.4f}  {rep.rhs[10.0]:13.2f}")
