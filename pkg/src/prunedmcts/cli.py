"""Command-line entry point: ``prunedmcts <command> [options]``.

Global options may also come from a JSON file given with ``--config``; keys
are option names with dashes replaced by underscores, and explicit command
line options win over the file.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import exact
from .bandit import BanditEnv, UcbParams, simulate_bandit, tau_thresholds
from .core import PlayerRole
from .games import MiniGo, RandomRewardGame, STARTING_FEN, TicTacToe, parse_fen, perft
from .bench.uci import EngineProtocolError, EngineTimeout
from .llm import LlmClient, LlmCritic, LlmError, LlmPruner, ResponseCache
from .oracles import (CheatPruner, ExactCritic, HybridCritic, IdentityPruner,
                      MaterialCritic, MockPruner, OutcomeCritic, RandomPruner)
from .search import (EXPERIMENT_BONUS, THEORY_BONUS, BonusParams, CriticFailure, PrunerFailure,
                     SearchConfig, run_search)

log = logging.getLogger("prunedmcts")

PRUNERS = ("identity", "mock", "cheat", "llm", "random")
CRITICS = ("outcome", "material", "hybrid", "llm", "exact")
SMALL_GAMES = ("tictactoe", "minigo3", "random-reward")


class UsageError(Exception):
    pass


def small_game(name: str, seed: int = 0):
    if name == "tictactoe":
        return TicTacToe()
    if name == "minigo3":
        return MiniGo(3, ko="simple", max_plies=12)
    if name == "random-reward":
        return RandomRewardGame(branching=3, depth=3, seed=seed)
    raise UsageError(f"unknown game {name!r}; choose from {', '.join(SMALL_GAMES)}")


def search_config(args, max_depth: int | None = None, randomize: bool = False) -> SearchConfig:
    base = THEORY_BONUS if args.bonus == "theory" else EXPERIMENT_BONUS
    bonus = BonusParams(args.beta if args.beta is not None else base.beta, base.eta1, base.eta2)
    return SearchConfig(args.sims, max_depth or args.depth, args.gamma, bonus, args.seed,
                        randomize_ties=randomize or args.randomize_ties)


def llm_client(args) -> LlmClient:
    cache = ResponseCache(args.llm_cache) if args.llm_cache else ResponseCache()
    return LlmClient(args.llm_mode, cache, args.llm_endpoint, args.llm_model)


def make_pruner(args, solutions=None, client=None):
    name = args.pruner
    if name == "identity":
        return IdentityPruner()
    if name == "random":
        return RandomPruner(args.k, args.seed)
    if name == "mock":
        if not args.mock_table:
            raise UsageError("--pruner mock needs --mock-table")
        with open(args.mock_table, encoding="utf-8") as fh:
            table = json.load(fh)
        return MockPruner({tuple(k.split()): v for k, v in table.items()})
    if name == "cheat":
        if solutions is None:
            raise UsageError("--pruner cheat only works where a solution line is known (solve-puzzles)")
        return CheatPruner(solutions, args.k, args.seed)
    if name == "llm":
        return LlmPruner(client or llm_client(args), k_max=args.k)
    raise UsageError(f"unknown pruner {name!r}")


def make_critic(args, client=None, solution=None, puzzle: bool = False):
    name = args.critic
    if name == "outcome":
        # puzzles count anything short of mate within the budget as a failure
        return OutcomeCritic(1.0, -1.0 if puzzle else 0.0)
    if name == "material":
        return MaterialCritic()
    if name == "hybrid":
        return HybridCritic(MaterialCritic(), LlmCritic(client or llm_client(args)))
    if name == "llm":
        return LlmCritic(client or llm_client(args))
    if name == "exact":
        if solution is None:
            raise UsageError("--critic exact needs a small game (estimate-value)")
        return ExactCritic(solution)
    raise UsageError(f"unknown critic {name!r}")


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _records_out(args, records):
    from .bench import summary_csv
    _emit(args, "".join(r.to_json() + "\n" for r in records))
    summary = summary_csv(records)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(summary)
    else:
        sys.stderr.write(summary)


# -- commands -------------------------------------------------------------------

def cmd_solve_puzzles(args) -> int:
    from .bench import Agent, load_puzzles, solve_puzzles
    depths = range(args.min_depth, args.max_depth + 1)
    pset = load_puzzles(args.csv, theme=args.theme, depths=depths, min_rating=args.min_rating,
                        max_rating=args.max_rating, limit=args.limit)
    log.info("%d puzzles, %d skipped, %d filtered", len(pset), len(pset.skipped), pset.filtered)
    client = llm_client(args) if "llm" in (args.pruner, args.critic) or args.critic == "hybrid" else None
    trees = {}
    if args.solutions:
        with open(args.solutions, encoding="utf-8") as fh:
            trees = json.load(fh)

    def solutions(p):
        # a full tree also covers defences the scripted line does not take
        table = p.solutions()
        table.update({tuple(h.split()): m for h, m in trees.get(p.id, {}).items()})
        return table

    def agent_for(p):
        return Agent(search_config(args), make_pruner(args, solutions(p), client),
                     make_critic(args, client, puzzle=True), label=args.pruner)

    records = solve_puzzles(pset.puzzles, agent_for, args.seed, args.workers, args.timing)
    _records_out(args, records)
    return 0


def cmd_play_minigo(args) -> int:
    from .bench import Agent, run_minigo_match
    client = llm_client(args) if "llm" in (args.pruner, args.critic) else None
    game = MiniGo(args.size, args.ko, args.max_plies)
    depth = args.depth if args.depth_given else math.ceil(game.max_plies / 2) + 1
    agent = Agent(search_config(args, depth, randomize=True), make_pruner(args, client=client),
                  make_critic(args, client), label=args.pruner)
    seeds = [args.seed + i for i in range(args.games)]
    summary = run_minigo_match(agent, args.games, seeds, args.size, args.opponent_sims, args.ko,
                               args.max_plies, args.workers, args.timing)
    _records_out(args, summary.records)
    log.info("mean territory score %.3f", summary.mean)
    return 0


def cmd_play_chess(args) -> int:
    from .bench import Agent, run_chess_match
    if not args.engine:
        raise UsageError("play-chess needs --engine '<command>'")
    client = llm_client(args) if "llm" in (args.pruner, args.critic) or args.critic == "hybrid" else None
    agent = Agent(search_config(args), make_pruner(args, client=client), make_critic(args, client),
                  label=args.pruner)
    seeds = [args.seed + i for i in range(args.games)]
    summary = run_chess_match(agent, args.engine, args.level, args.games, args.color, seeds,
                              args.movetime, args.max_plies, timing=args.timing)
    _records_out(args, summary.records)
    log.info("mean score %.3f", summary.mean)
    return 0


def cmd_estimate_value(args) -> int:
    game = small_game(args.game, args.seed)
    solution = exact.solve(game, gamma=args.gamma) if (args.critic == "exact" or args.exact) else None
    client = llm_client(args) if "llm" in (args.pruner, args.critic) else None
    critic = make_critic(args, client, solution)
    pruner = make_pruner(args, client=client)
    result = run_search(game, game.initial_state(), search_config(args), pruner, critic)
    out = result.to_dict()
    if solution is not None:
        out["exact_value"] = solution.root_value
        out["abs_error"] = abs(result.root_value - solution.root_value)
    _emit(args, json.dumps(out, sort_keys=True, indent=1) + "\n")
    return 0


def cmd_bandit_sim(args) -> int:
    env = BanditEnv(args.means, args.r_bound, args.noise, args.drift, args.seed)
    params = UcbParams(args.alpha, args.ucb_beta, args.xi)
    role = PlayerRole.MAX if args.role == "max" else PlayerRole.MIN
    trace = simulate_bandit(env, args.steps, params, args.seed, role)
    out = {"counts": trace.counts.tolist(), "optimal_arm": trace.optimal_arm,
           "optimal_share": trace.optimal_share, "target": trace.target,
           "checkpoint_errors": {str(k): v for k, v in trace.checkpoint_errors.items()}}
    if env.k > 1:
        t, t_star = tau_thresholds(env.gap(role), params.beta, params.xi, params.alpha, args.steps,
                                   args.r_bound, env.k)
        out["tau_T"], out["tau_star"] = t, t_star
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(trace.to_csv())
    _emit(args, json.dumps(out, sort_keys=True, indent=1) + "\n")
    return 0


def cmd_verify_bounds(args) -> int:
    game = small_game(args.game, args.seed)
    solution = exact.solve(game, gamma=args.gamma)
    taus = args.taus or [1.0, 10.0, 100.0, 10.0, 100.0]
    reports, failed = [], False
    for i in range(args.pruners):
        pruner = RandomPruner(args.k, args.seed + i)
        rep = exact.check_pruning_bound(solution, pruner, sorted(set(taus)))
        failed |= not rep.ok
        reports.append({"pruner_seed": args.seed + i, "width": args.k, **rep.to_dict()})
    out = {"game": args.game, "states": len(solution), "value": solution.root_value,
           "bellman_residual": solution.bellman_residual(), "reports": reports, "ok": not failed}
    _emit(args, json.dumps(out, sort_keys=True, indent=1) + "\n")
    return 1 if failed else 0


def cmd_perft(args) -> int:
    pos = parse_fen(args.fen)
    if args.divide:
        lines = [f"{uci}: {perft(pos.push(m), args.depth - 1)}" for uci, m in sorted(pos.legal_moves().items())]
        lines.append(f"total: {perft(pos, args.depth)}")
    else:
        lines = [str(perft(pos, args.depth))]
    _emit(args, "\n".join(lines) + "\n")
    return 0


# -- parser ---------------------------------------------------------------------

def _global_options(p: argparse.ArgumentParser):
    g = p.add_argument_group("search and oracles")
    g.add_argument("--config", help="JSON file with option defaults")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--sims", type=int, default=50, help="simulations per search (N)")
    g.add_argument("--depth", type=int, default=10, help="search depth H in full steps")
    g.add_argument("--gamma", type=float, default=0.99)
    g.add_argument("--bonus", choices=("experiment", "theory"), default="experiment",
                   help="UCB exponents: experiment (1/2, 1/2) or theory (1/4, 1/2)")
    g.add_argument("--beta", type=float, default=None, help="override the bonus scale")
    g.add_argument("--randomize-ties", action="store_true")
    g.add_argument("--pruner", choices=PRUNERS, default="identity")
    g.add_argument("--k", type=int, default=5, help="pruned width (cheat, random, llm)")
    g.add_argument("--mock-table", help="JSON {\"space separated history\": [actions]}")
    g.add_argument("--critic", choices=CRITICS, default="outcome")
    g.add_argument("--llm-mode", choices=("live", "cached-live", "replay"), default="replay")
    g.add_argument("--llm-cache", help="JSON-lines response cache")
    g.add_argument("--llm-endpoint", default=None)
    g.add_argument("--llm-model", default="gpt-4")
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--summary", help="CSV summary file (default stderr)")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--timing", action="store_true", help="record wall-clock times")
    g.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prunedmcts", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-puzzles", help="solve lichess mate puzzles")
    p.add_argument("csv")
    p.add_argument("--theme")
    p.add_argument("--min-depth", type=int, default=3)
    p.add_argument("--max-depth", type=int, default=8)
    p.add_argument("--min-rating", type=int)
    p.add_argument("--max-rating", type=int)
    p.add_argument("--limit", type=int, default=100)
    p.add_argument("--solutions", help="JSON {puzzle id: {space separated history: move}} for --pruner cheat")
    p.set_defaults(func=cmd_solve_puzzles)

    p = sub.add_parser("play-minigo", help="5x5 Go against plain MCTS")
    p.add_argument("--games", type=int, default=20)
    p.add_argument("--opponent-sims", type=int, default=1000)
    p.add_argument("--size", type=int, default=5)
    p.add_argument("--ko", choices=("positional", "simple"), default="positional")
    p.add_argument("--max-plies", type=int)
    p.set_defaults(func=cmd_play_minigo)

    p = sub.add_parser("play-chess", help="chess against a UCI engine")
    p.add_argument("--engine", help="engine command line")
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--games", type=int, default=1)
    p.add_argument("--color", choices=("white", "black"), default="white")
    p.add_argument("--movetime", type=int, default=100, help="engine ms per move")
    p.add_argument("--max-plies", type=int, default=300)
    p.set_defaults(func=cmd_play_chess)

    p = sub.add_parser("estimate-value", help="search value of a small game's initial state")
    p.add_argument("--game", choices=SMALL_GAMES, default="tictactoe")
    p.add_argument("--exact", action="store_true", help="also report the exact value")
    p.set_defaults(func=cmd_estimate_value)

    p = sub.add_parser("bandit-sim", help="polynomial-bonus UCB on a bandit")
    p.add_argument("--means", type=float, nargs="+", default=[1.0, 0.0])
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--role", choices=("max", "min"), default="max")
    p.add_argument("--alpha", type=float, default=2.5)
    p.add_argument("--ucb-beta", type=float, default=1.1)
    p.add_argument("--xi", type=float, default=10.0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--drift", type=float, default=0.0)
    p.add_argument("--r-bound", type=float, default=1.0)
    p.add_argument("--csv", help="trace CSV path")
    p.set_defaults(func=cmd_bandit_sim)

    p = sub.add_parser("verify-bounds", help="check the pruning bound on a small game")
    p.add_argument("--game", choices=SMALL_GAMES, default="tictactoe")
    p.add_argument("--pruners", type=int, default=5)
    p.add_argument("--taus", type=float, nargs="+")
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("perft", help="count chess move-tree leaves")
    p.add_argument("--fen", default=STARTING_FEN)
    p.add_argument("--divide", action="store_true")
    p.set_defaults(func=cmd_perft)

    for name, sp in sub.choices.items():
        _global_options(sp)
        if name == "perft":
            sp.set_defaults(depth=3)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise UsageError("--config must hold a JSON object")
        parser = build_parser()
        for sp in parser._subparsers._group_actions[0].choices.values():
            known = {a.dest for a in sp._actions}
            unknown = set(config) - known
            if unknown and sp.prog.endswith(args.command):
                raise UsageError(f"unknown config keys {sorted(unknown)}")
            sp.set_defaults(**{k: v for k, v in config.items() if k in known})
        args = parser.parse_args(argv)
    args.depth_given = "depth" in config or any(a == "--depth" or a.startswith("--depth=") for a in argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(f"prunedmcts: error: {exc}", file=sys.stderr)
        return 2
    except (LlmError, PrunerFailure, CriticFailure, EngineProtocolError, EngineTimeout, OSError,
            ValueError) as exc:
        print(f"prunedmcts: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
