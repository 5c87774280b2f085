"""Admin routes: direct VV access, fault injection and the CAN trace.

These bypass the gateway. GET test cases preset vehicle state through
``PUT /_vv/{key}``; PUT test cases read it back through ``GET /_vv/{key}``.
"""

import structlog
from fastapi import APIRouter, Depends, Request

from apps.rig.models import AckResponse, CanFrame, FaultSpec, VvValue
from apps.rig.state import RigState
from apps.tester.constants import ADMIN_FAULT_PATH, ADMIN_TRACE_PATH, ADMIN_VV_PREFIX

logger = structlog.get_logger(__name__)

router = APIRouter(tags=["Admin"])


def get_state(request: Request) -> RigState:
    return request.app.state.rig


@router.put(ADMIN_VV_PREFIX + "/{key}", response_model=AckResponse)
def set_vv(key: str, value: VvValue, state: RigState = Depends(get_state)) -> AckResponse:
    state.vv_set(key, value.raw)
    return AckResponse(details={"key": key, "raw": value.raw})


@router.get(ADMIN_VV_PREFIX + "/{key}", response_model=VvValue)
def get_vv(key: str, state: RigState = Depends(get_state)) -> VvValue:
    return VvValue(raw=state.vv_get(key))


@router.post(ADMIN_FAULT_PATH, response_model=AckResponse)
def inject_fault(fault: FaultSpec, state: RigState = Depends(get_state)) -> AckResponse:
    """Activate a fault for all later gateway traffic."""
    state.inject(fault)
    return AckResponse(details={"kind": str(fault.kind), "target": fault.target})


@router.get(ADMIN_TRACE_PATH, response_model=list[CanFrame])
def can_trace(state: RigState = Depends(get_state)) -> list[CanFrame]:
    """Frames exchanged since start, oldest first."""
    return state.trace()
