"""
Prometheus metrics HTTP server for long sweeps

Endpoints:
- GET /metrics - Prometheus text format
- GET /health - Liveness plus progress of the running sweep
- GET / or /info - Endpoint list

License: MIT
"""
import json
import logging
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Dict, Optional, Tuple

from prometheus_client import CONTENT_TYPE_LATEST, generate_latest

logger = logging.getLogger(__name__)

StatusProvider = Callable[[], Dict]
Response = Tuple[int, str, bytes]

JSON = "application/json"
ENDPOINTS = {
    "/metrics": "Prometheus metrics (for scraping)",
    "/health": "Liveness and sweep progress",
    "/info": "This page",
}


def _json(code: int, data: Dict) -> Response:
    return code, JSON, json.dumps(data, indent=2).encode("utf-8")


class MetricsHandler(BaseHTTPRequestHandler):
    """Routes GET requests; the server subclass binds status_provider and started_at"""

    status_provider: Optional[StatusProvider] = None
    started_at: float = 0.0

    def log_message(self, format, *args):
        logger.debug(f"{self.address_string()} - {format % args}")

    def do_GET(self):
        routes = {
            "/metrics": self._metrics,
            "/health": self._health,
            "/info": self._info,
            "/": self._info,
        }
        route = routes.get(self.path)
        if route is None:
            code, content_type, body = _json(404, {"error": "Not Found", "path": self.path})
        else:
            try:
                code, content_type, body = route()
            except Exception as e:
                logger.error(f"Error serving {self.path}: {e}")
                code, content_type, body = _json(500, {"error": str(e), "code": 500})
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _metrics(self) -> Response:
        return 200, CONTENT_TYPE_LATEST, generate_latest()

    def _health(self) -> Response:
        health = {"status": "healthy", "uptime_seconds": round(time.time() - self.started_at, 3)}
        provider = type(self).status_provider
        if provider is not None:
            try:
                health["sweep"] = provider()
            except Exception as e:
                logger.debug(f"Status provider failed: {e}")
                health["sweep"] = {"error": str(e)}
        return _json(200, health)

    def _info(self) -> Response:
        return _json(200, {"service": "andreev-spectra sweep metrics", "endpoints": ENDPOINTS})


class MetricsServer:
    """
    Serves the metrics endpoints from a daemon thread.

    Port 0 binds a free port; `port` holds the bound port after start().
    """

    def __init__(self, port: int = 8000, host: str = "127.0.0.1",
                 status_provider: Optional[StatusProvider] = None):
        self.port = port
        self.host = host
        self.status_provider = status_provider
        self.server: Optional[ThreadingHTTPServer] = None
        self.thread: Optional[threading.Thread] = None

    def start(self):
        if self.is_running():
            logger.warning("Metrics server already running")
            return
        handler = type("SweepMetricsHandler", (MetricsHandler,), {
            "status_provider": staticmethod(self.status_provider) if self.status_provider else None,
            "started_at": time.time(),
        })
        self.server = ThreadingHTTPServer((self.host, self.port), handler)
        self.server.daemon_threads = True
        self.port = self.server.server_address[1]
        self.thread = threading.Thread(target=self.server.serve_forever, name="MetricsServer",
                                       daemon=True)
        self.thread.start()
        logger.info(f"Metrics server started on {self.get_url()}")

    def stop(self):
        if not self.is_running():
            return
        self.server.shutdown()
        self.server.server_close()
        self.thread.join(timeout=5.0)
        self.server = None
        self.thread = None
        logger.info("Metrics server stopped")

    def is_running(self) -> bool:
        return self.server is not None

    def get_url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()
