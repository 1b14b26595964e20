"""OpenAI-compatible completion client with a persistent response cache.

Three modes:

* ``live``: every request goes to the API;
* ``cached-live``: the cache is consulted first and misses are fetched and stored;
* ``replay``: only the cache is used and a miss raises ``ReplayMiss``.

The cache is an append-only JSON-lines file keyed by the SHA-256 of the
canonical request, so replayed runs are bit-identical and need no network.
On top of the client sit the language-model pruner (frequency-ranked sampled
moves) and critic (a centipawn estimate divided by 1000).
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, NamedTuple

import httpx

from .core import Game, GameState, PlayerRole

MODES = ("live", "cached-live", "replay")
API_KEY_ENV = "LLM_API_KEY"


class LlmError(RuntimeError):
    pass


class HttpError(LlmError):
    def __init__(self, status: int, body: str):
        super().__init__(f"HTTP {status}: {body[:200]}")
        self.status = status
        self.body = body[:200]


class RateLimited(HttpError):
    pass


class ReplayMiss(LlmError):
    def __init__(self, key: str):
        super().__init__(f"no cached response for request {key}")
        self.key = key


def normalize_prompt(text: str) -> str:
    """Unix newlines, runs of blanks collapsed, trailing blanks and blank edges removed."""
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    lines = [re.sub(r"[ \t\f\v]+", " ", line).rstrip() for line in lines]
    return "\n".join(lines).strip()


@dataclass(frozen=True)
class LlmRequest:
    model: str
    prompt: str
    n: int = 1
    temperature: float = 0.0
    max_tokens: int = 32
    stop: tuple = ()
    chat: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        object.__setattr__(self, "prompt", normalize_prompt(self.prompt))
        object.__setattr__(self, "stop", tuple(self.stop))

    def canonical(self) -> str:
        body = {"model": self.model, "prompt": self.prompt, "n": self.n,
                "temperature": float(self.temperature), "max_tokens": self.max_tokens,
                "stop": list(self.stop), "api": "chat" if self.chat else "completions"}
        return json.dumps(body, sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    @property
    def key(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()

    def payload(self, n: int | None = None) -> dict:
        body = {"model": self.model, "n": self.n if n is None else n,
                "temperature": self.temperature, "max_tokens": self.max_tokens}
        if self.stop:
            body["stop"] = list(self.stop)
        if self.chat:
            body["messages"] = [{"role": "user", "content": self.prompt}]
        else:
            body["prompt"] = self.prompt
        return body


@dataclass
class CacheEntry:
    key: str
    texts: list
    timestamp: float
    backend: str

    def to_json(self) -> str:
        return json.dumps({"key": self.key, "texts": self.texts, "timestamp": self.timestamp,
                           "backend": self.backend}, sort_keys=True, ensure_ascii=False)


class ResponseCache:
    """Append-only JSON-lines store; the first entry for a key wins."""

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = os.fspath(path) if path is not None else None
        self._entries: dict[str, CacheEntry] = {}
        self._lock = threading.Lock()
        self.reload()

    def reload(self):
        entries = {}
        if self.path and os.path.exists(self.path):
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    d = json.loads(line)
                    entries.setdefault(d["key"], CacheEntry(d["key"], list(d["texts"]),
                                                            d.get("timestamp", 0.0), d.get("backend", "")))
        with self._lock:
            self._entries = entries

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key: str):
        return key in self._entries

    def get(self, key: str) -> CacheEntry | None:
        return self._entries.get(key)

    def put(self, entry: CacheEntry):
        with self._lock:
            if entry.key in self._entries:
                return
            self._entries[entry.key] = entry
            if self.path:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(entry.to_json() + "\n")

    def store(self, request: LlmRequest, texts: list[str], backend: str = "fixture"):
        """Record texts for a request (fixture authoring helper)."""
        if len(texts) != request.n:
            raise ValueError(f"expected {request.n} texts, got {len(texts)}")
        self.put(CacheEntry(request.key, list(texts), time.time(), backend))


class TokenBucket:
    """Thread-safe limiter: ``rate`` requests per second, bursts up to ``capacity``."""

    def __init__(self, rate: float, capacity: float = 1.0, clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        if rate <= 0 or capacity < 1:
            raise ValueError("need rate > 0 and capacity >= 1")
        self.rate = rate
        self.capacity = capacity
        self.clock = clock
        self.sleep = sleep
        self.tokens = capacity
        self.stamp = clock()
        self._lock = threading.Lock()

    def acquire(self):
        with self._lock:
            while True:
                now = self.clock()
                self.tokens = min(self.capacity, self.tokens + (now - self.stamp) * self.rate)
                self.stamp = now
                if self.tokens >= 1:
                    self.tokens -= 1
                    return
                self.sleep((1 - self.tokens) / self.rate)


class LlmClient:
    def __init__(self, mode: str = "replay", cache: ResponseCache | None = None,
                 endpoint: str | None = None, model: str = "gpt-4", chat: bool = True,
                 api_key: str | None = None, transport: httpx.BaseTransport | None = None,
                 timeout: float = 60.0, rate: float = 2.0, max_retries: int = 5,
                 backoff: float = 1.0, max_backoff: float = 30.0,
                 sleep: Callable[[float], None] = time.sleep):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.mode = mode
        self.cache = cache if cache is not None else ResponseCache()
        self.endpoint = endpoint.rstrip("/") if endpoint else None
        self.model = model
        self.chat = chat
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.transport = transport
        self.timeout = timeout
        self.limiter = TokenBucket(rate, sleep=sleep)
        self.max_retries = max_retries
        self.backoff = backoff
        self.max_backoff = max_backoff
        self.sleep = sleep
        self.live_calls = 0
        self.cache_hits = 0
        self._http: httpx.Client | None = None
        self._lock = threading.Lock()

    def request(self, prompt: str, n: int = 1, temperature: float = 0.0, max_tokens: int = 32) -> LlmRequest:
        return LlmRequest(self.model, prompt, n, temperature, max_tokens, chat=self.chat)

    @property
    def backend_id(self) -> str:
        return f"{self.endpoint or '-'}|{self.model}"

    def complete(self, request: LlmRequest) -> list[str]:
        if self.mode != "live":
            hit = self.cache.get(request.key)
            if hit is not None:
                self.cache_hits += 1
                return list(hit.texts)
            if self.mode == "replay":
                raise ReplayMiss(request.key)
        texts = self._fetch(request)
        if self.mode == "cached-live":
            self.cache.put(CacheEntry(request.key, texts, time.time(), self.backend_id))
        return texts

    # -- HTTP ---------------------------------------------------------------
    def _client(self) -> httpx.Client:
        with self._lock:
            if self._http is None:
                self._http = httpx.Client(transport=self.transport, timeout=self.timeout)
            return self._http

    def close(self):
        if self._http is not None:
            self._http.close()
            self._http = None

    def _fetch(self, request: LlmRequest) -> list[str]:
        if not self.endpoint:
            raise LlmError("live mode needs an endpoint")
        if not self.api_key:
            raise LlmError(f"live mode needs an API key in ${API_KEY_ENV}")
        texts: list[str] = []
        # some backends cap n per call; ask again for the remainder
        for _ in range(request.n):
            texts += self._post(request, request.n - len(texts))
            if len(texts) >= request.n:
                return texts[:request.n]
        raise LlmError(f"backend returned {len(texts)} of {request.n} completions")

    def _post(self, request: LlmRequest, n: int) -> list[str]:
        url = self.endpoint + ("/v1/chat/completions" if request.chat else "/v1/completions")
        headers = {"Authorization": f"Bearer {self.api_key}"}
        for attempt in range(self.max_retries + 1):
            self.limiter.acquire()
            self.live_calls += 1
            resp = self._client().post(url, json=request.payload(n), headers=headers)
            if resp.status_code == 429:
                if attempt == self.max_retries:
                    raise RateLimited(429, resp.text)
                delay = min(self.max_backoff, self.backoff * 2 ** attempt)
                retry_after = resp.headers.get("retry-after")
                if retry_after:
                    try:
                        delay = min(self.max_backoff, max(delay, float(retry_after)))
                    except ValueError:
                        pass
                self.sleep(delay)
                continue
            if resp.status_code >= 400:
                raise HttpError(resp.status_code, resp.text)
            try:
                choices = sorted(resp.json()["choices"], key=lambda c: c.get("index", 0))
                if request.chat:
                    return [c["message"]["content"] or "" for c in choices]
                return [c["text"] for c in choices]
            except (ValueError, KeyError, TypeError) as exc:
                raise HttpError(resp.status_code, f"malformed response: {resp.text}") from exc
        raise AssertionError("unreachable")


# -- prompts ------------------------------------------------------------------

def load_templates(path: str | os.PathLike | None = None) -> dict[str, str]:
    if path is None:
        text = resources.files("prunedmcts").joinpath("prompts/templates.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def describe_state(game: Game, state: GameState) -> dict[str, str]:
    """Template fields; ``board`` embeds the full position so prompts are injective."""
    legal = game.legal_actions(state)
    if game.name == "chess":
        white_to_move = state.board.white
        to_move = "White" if white_to_move else "Black"
        max_side = "White" if game.max_is_white else "Black"
        return {"game_title": "chess", "board": "FEN: " + game.fen(state), "to_move": to_move,
                "max_side": max_side, "legal_moves": " ".join(legal),
                "notation": "UCI long algebraic notation (e.g. e2e4)"}
    maxing = game.turn_of(state) is PlayerRole.MAX
    if game.name == "minigo":
        names = ("Black (X)", "White (O)")
        title, notation = f"Go on a {game.size}x{game.size} board", "a point such as C3, or pass"
    elif game.name == "tictactoe":
        names = ("X", "O")
        title, notation = "tic-tac-toe (cells numbered 0-8 row by row)", "a cell number"
    else:
        names = ("the first player", "the second player")
        title, notation = game.name, "the move notation shown"
    return {"game_title": title, "board": game.board_text(state) + f"\nMoves played: {state.ply}",
            "to_move": names[0] if maxing else names[1], "max_side": names[0],
            "legal_moves": " ".join(legal), "notation": notation}


def render_prompt(template: str, game: Game, state: GameState) -> str:
    return template.format(**describe_state(game, state))


# -- pruner and critic ----------------------------------------------------------

class PruneResult(NamedTuple):
    actions: list
    fallback: bool
    counts: dict          # legal action -> number of suggestions
    illegal: int          # parseable but illegal suggestions
    unparsable: int


class EvalResult(NamedTuple):
    value: float
    unparsable: bool
    raw: str


_TOKEN_SPLIT = re.compile(r"[\s,;]+")
_NUMBER = re.compile(r"[-+]?\d+(?:\.\d+)?")
CLAMP = 10.0
CENTIPAWN_DIVISOR = 1000.0


def parse_suggestion(game: Game, state: GameState, text: str) -> str | None:
    """The first token of ``text`` that reads as a move, legal or not."""
    for token in _TOKEN_SPLIT.split(text):
        action = game.parse_action(state, token)
        if action is not None:
            return action
    return None


def rank_suggestions(game: Game, state: GameState, texts: list[str], k_max: int) -> PruneResult:
    legal = game.legal_actions(state)
    legal_set = set(legal)
    counts: Counter = Counter()
    illegal = unparsable = 0
    for text in texts:
        action = parse_suggestion(game, state, text)
        if action is None:
            unparsable += 1
        elif action not in legal_set:
            illegal += 1
        else:
            counts[action] += 1
    if not counts:
        return PruneResult(list(legal), True, {}, illegal, unparsable)
    order = {a: i for i, a in enumerate(legal)}
    ranked = sorted(counts, key=lambda a: (-counts[a], order[a]))
    return PruneResult(ranked[:k_max], False, dict(counts), illegal, unparsable)


def llm_prune(game: Game, state: GameState, client: LlmClient, k_max: int = 5, n: int = 20,
              temperature: float = 0.7, template: str | None = None) -> PruneResult:
    """Sample ``n`` suggestions and keep the ``k_max`` most frequent legal ones.

    Falls back to every legal action (``fallback=True``) when no suggestion
    parses to a legal move.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    template = template or load_templates()["move_suggestion"]
    texts = client.complete(client.request(render_prompt(template, game, state), n, temperature))
    return rank_suggestions(game, state, texts, k_max)


def parse_centipawns(text: str) -> EvalResult:
    m = _NUMBER.search(text)
    if m is None:
        return EvalResult(0.0, True, text)
    value = float(m.group()) / CENTIPAWN_DIVISOR
    return EvalResult(max(-CLAMP, min(CLAMP, value)), False, text)


def llm_evaluate(game: Game, state: GameState, client: LlmClient, template: str | None = None) -> EvalResult:
    """Centipawn estimate for the Max side / 1000, clamped to [-10, 10]; 0 if unparsable."""
    template = template or load_templates()["position_evaluation"]
    texts = client.complete(client.request(render_prompt(template, game, state), 1, 0.0))
    return parse_centipawns(texts[0])


@dataclass
class LlmPruner:
    client: LlmClient
    k_max: int = 5
    n: int = 20
    temperature: float = 0.7
    template: str | None = None
    fallbacks: int = 0
    calls: int = 0
    log: list = field(default_factory=list, repr=False)

    @property
    def width(self):
        return self.k_max

    def prune(self, game: Game, state: GameState) -> list[str]:
        res = llm_prune(game, state, self.client, self.k_max, self.n, self.temperature, self.template)
        self.calls += 1
        self.fallbacks += res.fallback
        self.log.append(res)
        return res.actions


@dataclass
class LlmCritic:
    client: LlmClient
    template: str | None = None
    unparsable: int = 0
    calls: int = 0
    bound: float = CLAMP

    def evaluate(self, game: Game, state: GameState) -> float:
        res = llm_evaluate(game, state, self.client, self.template)
        self.calls += 1
        self.unparsable += res.unparsable
        return res.value
