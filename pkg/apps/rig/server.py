"""Launch the rig on a loopback socket or in process.

Loopback mode serves the app with uvicorn in a background thread, the way
a real gateway sits behind a socket. In-process mode skips the socket and
hands out httpx clients bound to the app through ASGITransport.
"""

import json
import socket
import threading
import time
from pathlib import Path
from typing import Literal

import httpx
import structlog
import uvicorn
import yaml
from pydantic import ValidationError

from apps.rig.main import create_rig_app
from apps.rig.models import CanFrame, FaultSpec, RigConfig
from apps.rig.state import RigState
from apps.tester.constants import HEALTH_PATH, HTTP_STATUS_OK
from apps.tester.core.exceptions import (
    BindError,
    ConfigError,
    RigUnreachableError,
    UnknownTargetError,
)
from apps.tester.ingest.spec_parser import load_yaml
from apps.tester.settings import settings

logger = structlog.get_logger(__name__)

RigMode = Literal["loopback", "in_process"]

IN_PROCESS_URL = "http://rig.local"


def load_rig_config(path: str | Path) -> RigConfig:
    """Read a rig configuration from a JSON or YAML file.

    Raises:
        ConfigError: File missing, unreadable or not a valid configuration
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
        data = json.loads(text) if path.suffix == ".json" else load_yaml(text)
        return RigConfig.model_validate(data)
    except OSError as e:
        raise ConfigError(f"Cannot read rig config {path}", {"path": str(path)}) from e
    except (ValueError, yaml.YAMLError) as e:
        # ValidationError is a ValueError
        details = {"path": str(path)}
        if isinstance(e, ValidationError):
            details["errors"] = [error["msg"] for error in e.errors()]
        raise ConfigError(f"Invalid rig config {path}", details) from e


class RigHandle:
    """A running rig: its address, admin operations and shutdown."""

    def __init__(
        self,
        state: RigState,
        url: str,
        mode: RigMode,
        app: object,
        server: uvicorn.Server | None = None,
        thread: threading.Thread | None = None,
    ) -> None:
        self.state = state
        self.url = url
        self.mode = mode
        self.app = app
        self._server = server
        self._thread = thread

    def async_client(self, timeout: httpx.Timeout | None = None) -> httpx.AsyncClient:
        """Client reaching this rig in either mode."""
        timeout = timeout or httpx.Timeout(
            settings.HTTP_TIMEOUT_READ, connect=settings.HTTP_TIMEOUT_CONNECT
        )
        if self.mode == "in_process":
            return httpx.AsyncClient(
                transport=httpx.ASGITransport(app=self.app),  # type: ignore[arg-type]
                base_url=self.url,
                timeout=timeout,
            )
        return httpx.AsyncClient(base_url=self.url, timeout=timeout)

    def vv_set(self, key: str, raw: float) -> None:
        self.state.vv_set(key, raw)

    def vv_get(self, key: str) -> float:
        return self.state.vv_get(key)

    def inject_fault(self, fault: FaultSpec) -> None:
        self.state.inject(fault)

    def can_trace(self) -> list[CanFrame]:
        return self.state.trace()

    def stop(self) -> None:
        """Shut the server down; a no-op in process."""
        if self._server is not None:
            self._server.should_exit = True
        if self._thread is not None:
            self._thread.join(timeout=settings.RIG_STARTUP_TIMEOUT)
        logger.info("rig_handle_stopped", url=self.url, mode=self.mode)

    def __enter__(self) -> "RigHandle":
        return self

    def __exit__(self, *_exc: object) -> None:
        self.stop()


def start_rig(config: RigConfig, port: int = 0, mode: RigMode = "loopback") -> RigHandle:
    """Start a rig serving ``config``.

    Args:
        config: Gateway and VV configuration
        port: Loopback port; 0 picks a free one
        mode: loopback socket or in-process ASGI

    Returns:
        RigHandle: Running rig

    Raises:
        ConfigError: A configured fault targets an unknown endpoint or signal
        BindError: The port cannot be bound
        RigUnreachableError: Server did not come up in time
    """
    try:
        app = create_rig_app(config)
    except UnknownTargetError as e:
        raise ConfigError(e.message, e.details) from e
    state: RigState = app.state.rig

    if mode == "in_process":
        logger.info("rig_started", mode=mode)
        return RigHandle(state, IN_PROCESS_URL, mode, app)

    sock = _bind(settings.RIG_HOST, port)
    bound_port = sock.getsockname()[1]
    server = uvicorn.Server(
        uvicorn.Config(app, log_level="warning", access_log=False, lifespan="on")
    )
    thread = threading.Thread(
        target=server.run, kwargs={"sockets": [sock]}, name="rig-server", daemon=True
    )
    thread.start()

    url = f"http://{settings.RIG_HOST}:{bound_port}"
    handle = RigHandle(state, url, mode, app, server=server, thread=thread)
    try:
        _wait_ready(url)
    except RigUnreachableError:
        handle.stop()
        sock.close()
        raise
    logger.info("rig_started", mode=mode, url=url)
    return handle


def _bind(host: str, port: int) -> socket.socket:
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind((host, port))
    except OSError as e:
        sock.close()
        raise BindError(f"Cannot bind {host}:{port}", {"host": host, "port": port}) from e
    return sock


def _wait_ready(url: str) -> None:
    deadline = time.monotonic() + settings.RIG_STARTUP_TIMEOUT
    with httpx.Client(base_url=url, timeout=1.0) as client:
        while time.monotonic() < deadline:
            try:
                if client.get(HEALTH_PATH).status_code == HTTP_STATUS_OK:
                    return
            except httpx.TransportError:
                pass
            time.sleep(0.05)
    raise RigUnreachableError(f"Rig at {url} did not become healthy", {"url": url})
