"""Deterministic localhost chat-completion server for tests and toy runs.

Completions are a pure function of (model, prompt), so pipeline runs that
label against this server are reproducible. Failure injection: the first
`fail_first` requests answer 503; prompts containing `empty_marker` get an
empty completion.
"""

from __future__ import annotations

import hashlib
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

_WORDS = (
    "classic", "portable", "durable", "cotton", "ceramic", "wireless",
    "compact", "vintage", "premium", "handmade", "lightweight", "waterproof",
)


def mock_completion(model: str, prompt: str) -> str:
    """Three pseudo-words derived from a stable digest of the request."""
    digest = hashlib.sha256(f"{model}\x00{prompt}".encode("utf-8")).digest()
    words = [_WORDS[digest[i] % len(_WORDS)] for i in range(3)]
    return " ".join(words) + f" {digest[3]:02x}{digest[4]:02x}"


class MockChatServer:
    def __init__(self, fail_first: int = 0, empty_marker: str | None = None) -> None:
        self.fail_first = fail_first
        self.empty_marker = empty_marker
        self.request_count = 0
        self._lock = threading.Lock()
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    @property
    def endpoint(self) -> str:
        assert self._server is not None, "server not started"
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/v1/chat/completions"

    def start(self) -> str:
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self) -> None:  # noqa: N802 (http.server API)
                length = int(self.headers.get("Content-Length", "0"))
                payload = json.loads(self.rfile.read(length).decode("utf-8"))
                with outer._lock:
                    outer.request_count += 1
                    fail = outer.request_count <= outer.fail_first
                if fail:
                    self.send_response(503)
                    self.end_headers()
                    return
                model = payload.get("model", "")
                prompt = payload.get("messages", [{}])[-1].get("content", "")
                if outer.empty_marker is not None and outer.empty_marker in prompt:
                    content = ""
                else:
                    content = mock_completion(model, prompt)
                body = json.dumps(
                    {"choices": [{"message": {"role": "assistant", "content": content}}]}
                ).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args) -> None:
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self.endpoint

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None

    def __enter__(self) -> "MockChatServer":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()
