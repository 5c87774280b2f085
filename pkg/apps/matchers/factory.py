"""Backend selection for the ``--backend`` flag."""

from pathlib import Path
from typing import Literal

from apps.matchers.remote_backend import RemoteMatcherBackend
from apps.matchers.replay import record_replay
from apps.matchers.transports import ChatModelTransport, HttpTransport, Transport
from apps.tester.core.exceptions import ConfigError
from apps.tester.domain.ports.matcher_port import MatcherPort
from apps.tester.matching.rules_backend import RuleBasedBackend
from apps.tester.settings import settings

BackendKind = Literal["rules", "remote", "replay"]


def live_transport() -> Transport:
    if settings.REMOTE_TRANSPORT == "chat":
        return ChatModelTransport()
    return HttpTransport()


def build_backend(
    kind: BackendKind,
    *,
    replay_store: Path | None = None,
    record_to: Path | None = None,
    parallelism: int | None = None,
    max_retries: int | None = None,
    transport: Transport | None = None,
) -> MatcherPort:
    """Construct the matcher backend named on the command line.

    Args:
        kind: rules, remote or replay
        replay_store: Store served in replay mode
        record_to: Store the remote backend records into, if given
        parallelism: In-flight request bound for remote backends
        max_retries: Typed-output re-prompt bound
        transport: Live transport override for the remote backend

    Raises:
        ConfigError: Replay without a store
    """
    if kind == "rules":
        return RuleBasedBackend()
    if kind == "replay":
        if replay_store is None:
            raise ConfigError("--backend replay needs --replay-store")
        return RemoteMatcherBackend(
            record_replay(replay_store, "replay"), max_retries=max_retries, parallelism=parallelism
        )

    live = transport or live_transport()
    if record_to is not None:
        live = record_replay(record_to, "record", inner=live)
    return RemoteMatcherBackend(live, max_retries=max_retries, parallelism=parallelism)
