"""A tiny scripted UCI engine for tests.

Usage: fake_uci.py MODE [ARG]
  first          play the first legal move in UCI order
  script M1,M2   play the listed moves, then fall back to first
  shuffle        move the g8/g1 knight out and back
  garbage        answer "go" with a malformed bestmove
  illegal        answer "go" with e2e5
  hang           never answer "go"
  die            exit on the first "go"
"""
import sys

import chess


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "first"
    script = sys.argv[2].split(",") if len(sys.argv) > 2 else []
    board = chess.Board()
    played = 0
    for line in sys.stdin:
        cmd = line.split()
        if not cmd:
            continue
        if cmd[0] == "uci":
            print("id name fake-" + mode)
            print("option name Skill Level type spin default 20 min 0 max 20")
            print("uciok")
        elif cmd[0] == "isready":
            print("readyok")
        elif cmd[0] == "ucinewgame":
            played = 0
        elif cmd[0] == "position":
            i = cmd.index("fen")
            fen_end = cmd.index("moves") if "moves" in cmd else len(cmd)
            board = chess.Board(" ".join(cmd[i + 1:fen_end]))
            for m in cmd[fen_end + 1:]:
                board.push_uci(m)
        elif cmd[0] == "go":
            if mode == "hang":
                continue
            if mode == "die":
                return
            print("bestmove " + choose(mode, board, script, played))
            played += 1
        elif cmd[0] == "quit":
            return
        sys.stdout.flush()


def choose(mode, board, script, played):
    if mode == "garbage":
        return "??"
    if mode == "illegal":
        return "e2e5"
    legal = sorted(m.uci() for m in board.legal_moves)
    if mode == "script" and played < len(script):
        return script[played]
    if mode == "shuffle":
        for m in ("g8f6", "f6g8", "g1f3", "f3g1"):
            if m in legal:
                return m
    return legal[0]


if __name__ == "__main__":
    main()
