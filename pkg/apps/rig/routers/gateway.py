"""Gateway REST routes: GET/PUT on every configured endpoint."""

from typing import Any

from fastapi import APIRouter, Body, Depends, Request

from apps.rig.gateway import Gateway

router = APIRouter(tags=["Gateway"])


def get_gateway(request: Request) -> Gateway:
    return request.app.state.gateway


@router.get("/{path:path}")
def read_endpoint(path: str, gateway: Gateway = Depends(get_gateway)) -> dict[str, Any]:
    """Current API record of an endpoint, rendered from the VV table."""
    return gateway.get(f"/{path}")


@router.put("/{path:path}")
def write_endpoint(
    path: str,
    body: dict[str, Any] = Body(...),
    gateway: Gateway = Depends(get_gateway),
) -> dict[str, Any]:
    """Apply a property record; responds with the CAN raws written."""
    return {"status": "ok", "written": gateway.put(f"/{path}", body)}
