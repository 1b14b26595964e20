"""Minimal UCI engine client over a subprocess pipe."""
from __future__ import annotations

import logging
import queue
import re
import shlex
import subprocess
import threading
import time

log = logging.getLogger(__name__)

_BESTMOVE = re.compile(r"^bestmove\s+(\S+)")
_UCI_MOVE = re.compile(r"^[a-h][1-8][a-h][1-8][qrbn]?$")


class EngineProtocolError(RuntimeError):
    def __init__(self, message: str, raw: str | None = None):
        super().__init__(f"{message}: {raw!r}" if raw is not None else message)
        self.raw = raw


class EngineTimeout(TimeoutError):
    pass


class UciEngine:
    """Speaks ``uci``/``isready``/``ucinewgame``/``setoption``/``position``/``go movetime``."""

    def __init__(self, command, timeout: float = 10.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.proc: subprocess.Popen | None = None
        self.lines: queue.Queue = queue.Queue()
        self.name = None
        self._reader: threading.Thread | None = None

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.quit()

    def start(self):
        self.proc = subprocess.Popen(self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                     stderr=subprocess.DEVNULL, text=True, bufsize=1)
        self._reader = threading.Thread(target=self._read, daemon=True)
        self._reader.start()
        self.send("uci")
        for line in self._until(lambda s: s == "uciok"):
            if line.startswith("id name "):
                self.name = line[8:]
        self.ready()

    def _read(self):
        for line in self.proc.stdout:
            self.lines.put(line.rstrip("\r\n"))
        self.lines.put(None)

    def send(self, line: str):
        log.debug(">> %s", line)
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise EngineProtocolError("engine closed its input", line) from exc

    def _until(self, done, timeout: float | None = None) -> list[str]:
        """Lines read up to and including the first one satisfying ``done``."""
        deadline = time.monotonic() + (self.timeout if timeout is None else timeout)
        seen = []
        while True:
            left = deadline - time.monotonic()
            if left <= 0:
                raise EngineTimeout(f"no reply from engine within the time limit; last lines {seen[-3:]}")
            try:
                line = self.lines.get(timeout=left)
            except queue.Empty:
                continue
            if line is None:
                raise EngineProtocolError("engine exited", "\n".join(seen[-3:]))
            log.debug("<< %s", line)
            seen.append(line)
            if done(line):
                return seen

    def ready(self):
        self.send("isready")
        self._until(lambda s: s == "readyok")

    def set_option(self, name: str, value):
        self.send(f"setoption name {name} value {value}")

    def new_game(self):
        self.send("ucinewgame")
        self.ready()

    def best_move(self, fen: str, moves: list[str], movetime_ms: int = 100) -> str:
        pos = f"position fen {fen}" + (" moves " + " ".join(moves) if moves else "")
        self.send(pos)
        self.send(f"go movetime {int(movetime_ms)}")
        line = self._until(lambda s: s.startswith("bestmove"), self.timeout + movetime_ms / 1000)[-1]
        m = _BESTMOVE.match(line)
        if not m or not _UCI_MOVE.match(m.group(1)):
            log.error("malformed engine reply: %r", line)
            raise EngineProtocolError("malformed bestmove", line)
        return m.group(1)

    def quit(self):
        if self.proc is None:
            return
        try:
            self.send("quit")
        except EngineProtocolError:
            pass
        try:
            self.proc.wait(timeout=2)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait()
        self.proc = None
