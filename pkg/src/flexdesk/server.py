"""HTTP front end and CLI: the gateway POST endpoint plus static assets.

Endpoints: ``POST /gateway`` (application/x-amf request and reply),
``GET /healthz`` -> ``ok``, and ``GET /*`` served from ``--static-dir``
when one is configured.  ``GET /gateway`` is 405: the gateway path is
POST-only.

Routes come from ``<data-dir>/routes.conf`` when that file exists,
otherwise the built-in defaults.
"""

from __future__ import annotations

import argparse
import logging
import mimetypes
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote, urlparse

from .amf3 import AMF_CONTENT_TYPE
from .gateway import ServerContext, ServiceRegistry, handle_http, load_registry
from .services import AppServices
from .store import Store, ingest_seed, open_store

log = logging.getLogger(__name__)

MAX_REQUEST_BODY = 32 * 1024 * 1024

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


@dataclass
class ServerConfig:
    port: int = 8080
    data_dir: Path = Path("data")
    seed_file: Path | None = None
    static_dir: Path | None = None
    log_level: str = "info"


def build_runtime(config: ServerConfig) -> tuple[ServiceRegistry, ServerContext, Store]:
    store = open_store(config.data_dir)
    if config.seed_file is not None:
        count = ingest_seed(store, config.seed_file)
        log.info("seeded %d records from %s", count, config.seed_file)
    registry = load_registry(config.data_dir / "routes.conf")
    return registry, ServerContext(services=AppServices(store)), store


class GatewayServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, config: ServerConfig):
        self.config = config
        self.registry, self.ctx, self.store = build_runtime(config)
        super().__init__(("", config.port), _Handler)

    @property
    def port(self) -> int:
        return self.server_address[1]


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: GatewayServer

    def log_message(self, format: str, *args) -> None:
        log.debug("%s %s", self.address_string(), format % args)

    def _reply(self, status: int, body: bytes, content_type: str, extra: dict | None = None) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for name, value in (extra or {}).items():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self) -> None:
        path = urlparse(self.path).path
        if path != "/gateway":
            self._reply(404, b"not found", "text/plain; charset=utf-8")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
        except ValueError:
            length = -1
        if length < 0 or length > MAX_REQUEST_BODY:
            self._reply(400, b"", AMF_CONTENT_TYPE)
            return
        body = self.rfile.read(length)
        status, payload = handle_http(body, self.server.registry, self.server.ctx)
        self._reply(status, payload, AMF_CONTENT_TYPE)

    def do_GET(self) -> None:
        path = urlparse(self.path).path
        if path == "/gateway":
            self._reply(405, b"POST only", "text/plain; charset=utf-8", {"Allow": "POST"})
            return
        if path == "/healthz":
            self._reply(200, b"ok", "text/plain; charset=utf-8")
            return
        self._serve_static(path)

    def _serve_static(self, path: str) -> None:
        static_dir = self.server.config.static_dir
        if static_dir is None:
            self._reply(404, b"not found", "text/plain; charset=utf-8")
            return
        relative = unquote(path).lstrip("/") or "index.html"
        root = static_dir.resolve()
        candidate = (root / relative).resolve()
        if not candidate.is_relative_to(root):
            self._reply(404, b"not found", "text/plain; charset=utf-8")
            return
        if candidate.is_dir():
            candidate = candidate / "index.html"
        if not candidate.is_file():
            self._reply(404, b"not found", "text/plain; charset=utf-8")
            return
        content_type = mimetypes.guess_type(candidate.name)[0] or "application/octet-stream"
        self._reply(200, candidate.read_bytes(), content_type)


def start_server(config: ServerConfig) -> GatewayServer:
    """Bind and serve on a background thread; caller owns shutdown()."""
    server = GatewayServer(config)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server


def parse_args(argv: list[str] | None = None) -> ServerConfig:
    parser = argparse.ArgumentParser(
        prog="flexdesk-server",
        description="AMF remoting gateway with workbench persistence, search and chat",
    )
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--data-dir", type=Path, default=Path("data"))
    parser.add_argument("--seed-file", type=Path, default=None, help="records seed CSV")
    parser.add_argument("--static-dir", type=Path, default=None, help="UI asset directory")
    parser.add_argument("--log-level", choices=sorted(_LOG_LEVELS), default="info")
    args = parser.parse_args(argv)
    return ServerConfig(
        port=args.port,
        data_dir=args.data_dir,
        seed_file=args.seed_file,
        static_dir=args.static_dir,
        log_level=args.log_level,
    )


def main(argv: list[str] | None = None) -> int:
    config = parse_args(argv)
    logging.basicConfig(
        level=_LOG_LEVELS[config.log_level],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    server = GatewayServer(config)
    log.info("gateway listening on port %d (data in %s)", server.port, config.data_dir)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        log.info("shutting down")
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
