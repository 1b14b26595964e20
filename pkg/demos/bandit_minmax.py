"""Polynomial-bonus UCB for a maximising and a minimising player on the same arms."""
from prunedmcts.bandit import UCB_PRESET, BanditEnv, simulate_bandit, tau_thresholds
from prunedmcts.core import PlayerRole

env = BanditEnv([0.6, 0.1, -0.3], noise=0.3, seed=1)
for role in (PlayerRole.MAX, PlayerRole.MIN):
    trace = simulate_bandit(env, 8192, UCB_PRESET, seed=1, role=role)
    print(f"{role.value}: pulls {trace.counts.tolist()}  target {trace.target:+.2f}")
    for n, err in sorted(trace.checkpoint_errors.items()):
        print(f"  n={n:5d}  |mean - target| = {err:.4f}")
    p = UCB_PRESET
    print("  tau(T), tau* =", tau_thresholds(env.gap(role), p.beta, p.xi, p.alpha, 8192, k=env.k))
