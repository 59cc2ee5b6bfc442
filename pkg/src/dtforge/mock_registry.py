"""In-process HTTP registry double for hermetic tests.

Serves ``GET /<prefix>/<suffix>`` and ``GET /template/<suffix>`` from
``<doc_dir>/<suffix>.json``: 200 with the exact file bytes, 404 when the file
is absent, 500 for suffixes listed in ``fail_suffixes``. Every request is
logged, failures included.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote, urlsplit


class BindError(OSError):
    pass


@dataclass
class MockSpec:
    doc_dir: Path
    fail_suffixes: set[str] = field(default_factory=set)
    latency_ms: float | None = None
    hit_log: list[tuple[str, float]] = field(default_factory=list)


class _Handler(BaseHTTPRequestHandler):
    server: _Server
    protocol_version = "HTTP/1.1"

    def do_GET(self) -> None:  # noqa: N802
        registry = self.server.registry
        path = unquote(urlsplit(self.path).path).rstrip("/")
        suffix = path.rsplit("/", 1)[-1]
        registry._record(suffix)
        spec = registry.spec
        if spec.latency_ms:
            time.sleep(spec.latency_ms / 1000.0)
        if suffix in spec.fail_suffixes:
            self._reply(500, b'{"error": "injected failure"}')
            return
        doc = Path(spec.doc_dir) / f"{suffix}.json"
        if not suffix or suffix in (".", "..") or not doc.is_file():
            self._reply(404, b'{"error": "not found"}')
            return
        self._reply(200, doc.read_bytes())

    def _reply(self, status: int, body: bytes) -> None:
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, format: str, *args: object) -> None:  # noqa: A002
        pass


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    registry: MockRegistry


class MockRegistry:
    """A loopback HTTP server; use as a context manager or call start()/stop()."""

    def __init__(self, spec: MockSpec) -> None:
        self.spec = spec
        self._lock = threading.Lock()
        self._server: _Server | None = None
        self._thread: threading.Thread | None = None

    def _record(self, suffix: str) -> None:
        with self._lock:
            self.spec.hit_log.append((suffix, time.time()))

    def start(self) -> str:
        """Bind an ephemeral loopback port and return the base URL."""
        if not Path(self.spec.doc_dir).is_dir():
            raise FileNotFoundError(f"doc_dir {self.spec.doc_dir} does not exist")
        try:
            server = _Server(("127.0.0.1", 0), _Handler)
        except OSError as exc:
            raise BindError(exc.errno, f"cannot bind mock registry: {exc}") from exc
        server.registry = self
        self._server = server
        self._thread = threading.Thread(
            target=server.serve_forever, kwargs={"poll_interval": 0.05}, name="mock-registry", daemon=True
        )
        self._thread.start()
        return self.base_url

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    @property
    def base_url(self) -> str:
        if self._server is None:
            raise RuntimeError("mock registry is not running")
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def hits(self, suffix: str) -> int:
        with self._lock:
            return sum(1 for s, _ in self.spec.hit_log if s == suffix)

    @property
    def total_hits(self) -> int:
        with self._lock:
            return len(self.spec.hit_log)

    def __enter__(self) -> MockRegistry:
        self.start()
        return self

    def __exit__(self, *exc: object) -> None:
        self.stop()


def start(spec: MockSpec) -> MockRegistry:
    registry = MockRegistry(spec)
    registry.start()
    return registry


def hits(registry: MockRegistry, suffix: str) -> int:
    return registry.hits(suffix)
