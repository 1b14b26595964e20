"""Regenerate llm_replay.jsonl, the canned responses for the replay-mode LLM tests.

Run from the repository root: python3 tests/fixtures/make_llm_cache.py
Timestamps are pinned so the file is byte-stable.
"""
import os

from prunedmcts.games import Chess, MiniGo, TicTacToe
from prunedmcts.llm import CacheEntry, LlmClient, ResponseCache, load_templates, render_prompt

OUT = os.path.join(os.path.dirname(__file__), "llm_replay.jsonl")
MODEL = "fixture-model"

# name -> (game factory, history, kind, texts)
PRUNE = {
    "chess_frequency": (Chess, [], ["e2e4"] * 12 + ["d2d4"] * 5 + ["no idea", "???", "pass"]),
    "chess_unparsable": (Chess, ["e2e4", "e7e5"], ["I would resign."] * 20),
    "chess_illegal": (Chess, ["e2e4"], ["e2e5"] * 10 + ["g8f6"] * 3 + ["b8c6"] * 7),
    "chess_san_mixed": (Chess, ["d2d4"], ["e5", "e7e5", "Nf6", "...c5", "c7c5", "Nf6", "Nf6!"]
                        + ["e5"] * 13),
    "ttt_centre": (TicTacToe, [], ["4"] * 15 + ["0"] * 3 + ["9"] * 2),
    "go_pass": (MiniGo, ["C3"], ["pass"] * 8 + ["C3"] * 4 + ["B2"] * 6 + ["nothing"] * 2),
}

EVAL = {
    "cp_positive": (Chess, [], "+150 centipawns"),
    "cp_negative": (Chess, ["e2e4"], "-40"),
    "cp_clamp_low": (Chess, ["d2d4"], "-25000"),
    "cp_clamp_high": (Chess, ["g1f3"], "Score: 99999 cp"),
    "cp_missing": (Chess, ["b1c3"], "It is roughly equal."),
    "cp_decimal": (TicTacToe, [], "12.5"),
}


def prune_request(client, factory, history, n=20, temperature=0.7):
    game = factory()
    state = game.replay(history)
    prompt = render_prompt(load_templates()["move_suggestion"], game, state)
    return client.request(prompt, n, temperature)


def eval_request(client, factory, history):
    game = factory()
    state = game.replay(history)
    prompt = render_prompt(load_templates()["position_evaluation"], game, state)
    return client.request(prompt, 1, 0.0)


def main():
    if os.path.exists(OUT):
        os.remove(OUT)
    cache = ResponseCache(OUT)
    client = LlmClient("replay", cache, model=MODEL)
    for factory, history, texts in PRUNE.values():
        req = prune_request(client, factory, history, n=len(texts))
        cache.put(CacheEntry(req.key, texts, 0.0, "fixture"))
    for factory, history, text in EVAL.values():
        req = eval_request(client, factory, history)
        cache.put(CacheEntry(req.key, [text], 0.0, "fixture"))


if __name__ == "__main__":
    main()
