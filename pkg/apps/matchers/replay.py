"""Record/replay store for backend traffic.

The store is one JSON file mapping request fingerprints to the raw outputs
the backend produced. Replaying a store makes the whole pipeline
bit-deterministic without network access.
"""

import json
import threading
from pathlib import Path
from typing import Any, Literal

import structlog

from apps.matchers.schemas import BackendRequest
from apps.matchers.transports import Transport
from apps.tester.core.exceptions import ConfigError, ReplayMissError

logger = structlog.get_logger(__name__)

ReplayMode = Literal["record", "replay"]


class ReplayStore:
    """Fingerprint -> outputs, persisted as sorted JSON."""

    def __init__(self, path: Path) -> None:
        self.path = path
        self._lock = threading.Lock()
        self._entries: dict[str, dict[str, Any]] = {}
        if path.exists():
            try:
                loaded = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as e:
                raise ConfigError(f"Replay store {path} is not valid JSON", {"path": str(path)}) from e
            if not isinstance(loaded, dict):
                raise ConfigError(f"Replay store {path} is not a record", {"path": str(path)})
            self._entries = loaded

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, fingerprint: object) -> bool:
        return fingerprint in self._entries

    def get(self, request: BackendRequest) -> Any:
        """Stored outputs for a request.

        Raises:
            ReplayMissError: Request was never recorded
        """
        fingerprint = request.fingerprint()
        with self._lock:
            entry = self._entries.get(fingerprint)
        if entry is None:
            raise ReplayMissError(
                f"No recorded answer for {request.task} request",
                {"task": str(request.task), "fingerprint": fingerprint},
            )
        return entry["outputs"]

    def put(self, request: BackendRequest, outputs: Any) -> None:
        with self._lock:
            self._entries[request.fingerprint()] = {"task": str(request.task), "outputs": outputs}

    def save(self) -> None:
        with self._lock:
            text = json.dumps(self._entries, sort_keys=True, indent=1, ensure_ascii=False)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(text + "\n", encoding="utf-8")


class RecordingTransport(Transport):
    """Forwards to an inner transport and records every answer."""

    name = "record"

    def __init__(self, inner: Transport, store: ReplayStore) -> None:
        self.inner = inner
        self.store = store

    def send(self, request: BackendRequest) -> Any:
        outputs = self.inner.send(request)
        self.store.put(request, outputs)
        return outputs

    def close(self) -> None:
        self.store.save()
        logger.info("replay_store_saved", path=str(self.store.path), entries=len(self.store))
        self.inner.close()


class ReplayTransport(Transport):
    """Serves recorded answers; unknown requests fail with ReplayMissError."""

    name = "replay"

    def __init__(self, store: ReplayStore) -> None:
        self.store = store

    def send(self, request: BackendRequest) -> Any:
        return self.store.get(request)


def record_replay(store_path: Path, mode: ReplayMode, inner: Transport | None = None) -> Transport:
    """Transport backed by a replay store.

    Args:
        store_path: JSON store file
        mode: ``record`` wraps ``inner`` and persists its answers on close;
            ``replay`` serves the stored answers
        inner: Live transport, required for record mode

    Raises:
        ConfigError: Record mode without an inner transport, replay of a
            missing store, or an unreadable store
    """
    if mode == "record":
        if inner is None:
            raise ConfigError("record mode needs a live transport to record from")
        return RecordingTransport(inner, ReplayStore(store_path))
    if not store_path.exists():
        raise ConfigError(f"Replay store {store_path} does not exist", {"path": str(store_path)})
    store = ReplayStore(store_path)
    logger.info("replay_store_loaded", path=str(store_path), entries=len(store))
    return ReplayTransport(store)
