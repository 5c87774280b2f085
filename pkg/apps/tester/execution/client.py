"""Async HTTP client for the rig's gateway and admin routes."""

from typing import Any

import httpx
import structlog
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from apps.rig.server import RigHandle
from apps.tester.constants import ADMIN_TRACE_PATH, ADMIN_VV_PREFIX, HEALTH_PATH
from apps.tester.core.exceptions import RigUnreachableError
from apps.tester.settings import settings

logger = structlog.get_logger(__name__)


class RigClient:
    """Resilient client for one rig.

    Network errors and timeouts are retried; HTTP error statuses are not,
    they surface as ``httpx.HTTPStatusError`` for the caller to judge.
    """

    def __init__(self, client: httpx.AsyncClient) -> None:
        self._client = client

    @classmethod
    def connect(cls, rig: str | RigHandle) -> "RigClient":
        """Client for a rig URL or a running handle."""
        if isinstance(rig, RigHandle):
            return cls(rig.async_client())
        timeout = httpx.Timeout(settings.HTTP_TIMEOUT_READ, connect=settings.HTTP_TIMEOUT_CONNECT)
        return cls(httpx.AsyncClient(base_url=rig, timeout=timeout))

    async def __aenter__(self) -> "RigClient":
        return self

    async def __aexit__(self, *_exc: object) -> None:
        await self.aclose()

    async def aclose(self) -> None:
        await self._client.aclose()

    @retry(
        stop=stop_after_attempt(settings.TRANSPORT_MAX_ATTEMPTS),
        wait=wait_exponential(multiplier=0.1, min=0.1, max=1),
        retry=retry_if_exception_type((httpx.TimeoutException, httpx.NetworkError)),
        reraise=True,
    )
    async def _request(self, method: str, path: str, **kwargs: Any) -> Any:
        response = await self._client.request(method, path, **kwargs)
        logger.debug("rig_response", method=method, path=path, status_code=response.status_code)
        response.raise_for_status()
        return response.json()

    async def health(self) -> None:
        """Probe the rig.

        Raises:
            RigUnreachableError: No healthy answer
        """
        try:
            await self._request("GET", HEALTH_PATH)
        except (httpx.HTTPError, ValueError) as e:
            raise RigUnreachableError(
                f"Rig at {self._client.base_url} is unreachable", {"error": str(e)}
            ) from e

    async def put(self, endpoint: str, payload: dict[str, Any]) -> dict[str, Any]:
        return await self._request("PUT", endpoint, json=payload)

    async def get(self, endpoint: str) -> dict[str, Any]:
        return await self._request("GET", endpoint)

    async def vv_set(self, key: str, raw: float) -> None:
        await self._request("PUT", f"{ADMIN_VV_PREFIX}/{key}", json={"raw": raw})

    async def vv_get(self, key: str) -> float:
        body = await self._request("GET", f"{ADMIN_VV_PREFIX}/{key}")
        return float(body["raw"])

    async def trace(self) -> list[dict[str, Any]]:
        return await self._request("GET", ADMIN_TRACE_PATH)
