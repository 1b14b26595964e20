"""Local OpenAI-style endpoint with deterministic canned answers, for filling caches."""
import hashlib
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


def answers(prompt, n):
    digest = hashlib.sha256(prompt.encode()).digest()
    if "centipawns" in prompt:
        return [f"{digest[0] - 128:+d} centipawns"] * n
    legal = []
    for line in prompt.splitlines():
        if line.startswith("Legal moves:"):
            legal = line.split(":", 1)[1].split()
    if not legal:
        return ["no idea"] * n
    # a skewed but deterministic spread over a few legal moves
    picks = [legal[(digest[i % 32] % 3) * 7 % len(legal)] for i in range(n)]
    if n > 2:
        picks[-1] = "gibberish"
    return picks


class Handler(BaseHTTPRequestHandler):
    calls = 0

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        prompt = body["messages"][0]["content"] if "messages" in body else body["prompt"]
        type(self).calls += 1
        texts = answers(prompt, body.get("n", 1))
        choices = [{"index": i, "message": {"role": "assistant", "content": t}} for i, t in enumerate(texts)]
        data = json.dumps({"choices": choices}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


class FakeLlmServer:
    def __enter__(self):
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()
        Handler.calls = 0
        return self

    @property
    def url(self):
        return f"http://127.0.0.1:{self.server.server_address[1]}"

    @property
    def calls(self):
        return Handler.calls

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()
