"""Non-stationary multi-armed bandit with a polynomial UCB bonus.

This is the building block the tree-search analysis reduces to: every node
is a bandit whose arms are its children.  The Max player pulls the arm with
the largest empirical mean plus

    B_{t,s} = beta**(1/xi) * t**(alpha/xi) / sqrt(s)

(t completed steps, s pulls of the arm); the Min player pulls the smallest
empirical mean minus the same bonus.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .core import PlayerRole


class ScanCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class UcbParams:
    alpha: float = 2.5
    beta: float = 1.1
    xi: float = 10.0

    def bonus(self, t: int, s: int) -> float:
        return self.beta ** (1.0 / self.xi) * t ** (self.alpha / self.xi) / math.sqrt(s)

    @property
    def theory_range_ok(self) -> bool:
        """alpha > 2 and xi/4 <= alpha < xi/2, the range the convergence theorem covers."""
        return self.alpha > 2 and self.xi / 4 <= self.alpha < self.xi / 2


UCB_PRESET = UcbParams(2.5, 1.1, 10.0)


class BanditEnv:
    """K arms with rewards in [-R, R].

    The s-th pull of arm k returns ``means[k] + drift[k] / s`` plus uniform
    noise of half-width ``noise[k]``.  ``drift`` makes the process
    non-stationary while keeping ``means`` as its limit; all-zero drift and
    noise gives a deterministic environment.
    """

    def __init__(self, means, r_bound: float = 1.0, noise=0.0, drift=0.0, seed: int = 0):
        self.means = np.asarray(means, dtype=float)
        k = self.means.size
        if k < 1:
            raise ValueError("need at least one arm")
        self.noise = np.broadcast_to(np.asarray(noise, dtype=float), (k,)).copy()
        self.drift = np.broadcast_to(np.asarray(drift, dtype=float), (k,)).copy()
        self.r_bound = float(r_bound)
        if np.any(self.noise < 0):
            raise ValueError("noise must be non-negative")
        worst = np.abs(self.means) + np.abs(self.drift) + self.noise
        if np.any(worst > self.r_bound + 1e-12):
            raise ValueError(f"rewards could exceed R={self.r_bound}")
        if k > 1 and np.sum(self.means == self.means.max()) > 1:
            raise ValueError("the optimal (max) arm must be unique")
        if k > 1 and np.sum(self.means == self.means.min()) > 1:
            raise ValueError("the optimal (min) arm must be unique")
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    @property
    def k(self) -> int:
        return self.means.size

    @property
    def deterministic(self) -> bool:
        return not np.any(self.noise)

    def reset(self):
        self.rng = np.random.default_rng(self.seed)

    def pull(self, arm: int, s: int) -> float:
        """Reward of the ``s``-th pull (1-based) of ``arm``."""
        x = self.means[arm] + self.drift[arm] / s
        if self.noise[arm]:
            x += self.rng.uniform(-self.noise[arm], self.noise[arm])
        return float(x)

    def optimum(self, role: PlayerRole) -> tuple[int, float]:
        arm = int(np.argmax(self.means) if role is PlayerRole.MAX else np.argmin(self.means))
        return arm, float(self.means[arm])

    def gap(self, role: PlayerRole) -> float:
        arm, best = self.optimum(role)
        others = np.delete(self.means, arm)
        return float(np.min(np.abs(best - others))) if others.size else math.inf


@dataclass
class UcbState:
    k: int
    params: UcbParams = UCB_PRESET
    counts: np.ndarray = None
    sums: np.ndarray = None
    t: int = 0

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros(self.k, dtype=np.int64)
        if self.sums is None:
            self.sums = np.zeros(self.k, dtype=float)

    def update(self, arm: int, reward: float):
        self.counts[arm] += 1
        self.sums[arm] += reward
        self.t += 1


def ucb_arm_select(state: UcbState, role: PlayerRole) -> int:
    unpulled = np.flatnonzero(state.counts == 0)
    if unpulled.size:
        return int(unpulled[0])
    means = state.sums / state.counts
    bonus = np.array([state.params.bonus(state.t, int(s)) for s in state.counts])
    if role is PlayerRole.MAX:
        return int(np.argmax(means + bonus))     # argmax/argmin keep the lowest index on ties
    return int(np.argmin(means - bonus))


def checkpoints(T: int) -> list[int]:
    return sorted({max(1, T // 8), max(1, T // 4), max(1, T // 2), T})


@dataclass
class BanditTrace:
    role: PlayerRole
    arms: np.ndarray
    rewards: np.ndarray
    counts: np.ndarray
    target: float                   # mu_max for Max, mu_min for Min
    optimal_arm: int
    checkpoint_errors: dict = field(default_factory=dict)   # n -> |X̄_n - target|

    @property
    def running_mean(self) -> np.ndarray:
        return np.cumsum(self.rewards) / np.arange(1, self.rewards.size + 1)

    def error_at(self, n: int) -> float:
        return abs(float(self.running_mean[n - 1]) - self.target)

    @property
    def optimal_share(self) -> float:
        return float(self.counts[self.optimal_arm] / self.counts.sum())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "arm", "reward", "running_mean"])
        for i, (a, r, m) in enumerate(zip(self.arms, self.rewards, self.running_mean), start=1):
            w.writerow([i, int(a), repr(float(r)), repr(float(m))])
        return buf.getvalue()


def simulate_bandit(env: BanditEnv, T: int, params: UcbParams = UCB_PRESET,
                    seed: int | None = None, role: PlayerRole = PlayerRole.MAX,
                    extra_checkpoints=()) -> BanditTrace:
    """Run the UCB variant for ``T`` steps; ``seed`` reseeds the env's noise."""
    if T < env.k:
        raise ValueError("need T >= K")
    if seed is not None:
        env.seed = seed
    env.reset()
    state = UcbState(env.k, params)
    arms = np.empty(T, dtype=np.int64)
    rewards = np.empty(T, dtype=float)
    for i in range(T):
        arm = ucb_arm_select(state, role)
        x = env.pull(arm, int(state.counts[arm]) + 1)
        state.update(arm, x)
        arms[i], rewards[i] = arm, x
    best, target = env.optimum(role)
    trace = BanditTrace(role, arms, rewards, state.counts.copy(), target, best)
    for n in sorted(set(checkpoints(T)) | {n for n in extra_checkpoints if 1 <= n <= T}):
        trace.checkpoint_errors[n] = trace.error_at(n)
    return trace


def tau(delta: float, beta: float, xi: float, alpha: float, t: int) -> int:
    if delta <= 0:
        raise ValueError("delta must be positive")
    # round before the ceiling so exact powers (e.g. 16**0.5) are not bumped
    x = (2.0 / delta * beta ** (1.0 / xi)) ** 2 * t ** (2.0 * alpha / xi)
    return math.ceil(round(x, 9))


def tau_thresholds(delta: float, beta: float, xi: float, alpha: float, t: int,
                   r_bound: float = 1.0, k: int = 2, scan_cap: int = 10**7) -> tuple[int, int]:
    """(tau(t), tau*) where tau* is the first t with t >= tau(t) and
    2 R tau(t) >= sqrt(t) + 2 R (4K - 3), found by scanning upward."""
    first = tau(delta, beta, xi, alpha, t)
    for s in range(1, scan_cap + 1):
        ts = tau(delta, beta, xi, alpha, s)
        if s >= ts and 2 * r_bound * ts >= math.sqrt(s) + 2 * r_bound * (4 * k - 3):
            return first, s
    raise ScanCapExceeded(f"no tau* below {scan_cap}")
