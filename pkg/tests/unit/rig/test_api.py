"""Unit tests for the rig's middlewares, exception handlers and health route."""

import uuid

import pytest
from fastapi import FastAPI, Request
from fastapi.testclient import TestClient

from apps.rig.api.exception_handlers import register_exception_handlers
from apps.rig.api.middlewares import LoggingMiddleware, RequestIDMiddleware
from apps.tester.core.exceptions import (
    AppError,
    BindError,
    RigRequestError,
    StageError,
    UnknownKeyError,
    UnknownTargetError,
)


@pytest.fixture
def test_app():
    """Create a bare app wired like the rig, with routes that raise."""
    app = FastAPI()
    app.add_middleware(LoggingMiddleware)
    app.add_middleware(RequestIDMiddleware)
    register_exception_handlers(app)

    @app.get("/echo")
    async def echo(request: Request):
        return {"request_id": request.state.request_id}

    @app.get("/unknown-key")
    async def unknown_key():
        raise UnknownKeyError("VV key not configured", {"key": "VvNope"})

    @app.get("/unknown-target")
    async def unknown_target():
        raise UnknownTargetError("Fault target not configured", {"target": "/nope"})

    @app.get("/bad-value")
    async def bad_value():
        raise RigRequestError("Value outside range", {"property": "fanLevel"})

    @app.get("/infra")
    async def infra():
        raise BindError("Port busy", {"port": 1})

    @app.get("/boom")
    async def boom():
        raise RuntimeError("unexpected")

    @app.get("/typed/{value}")
    async def typed(value: int):
        return {"value": value}

    return app


@pytest.fixture
def client(test_app):
    """Create test client; unexpected errors come back as responses."""
    return TestClient(test_app, raise_server_exceptions=False)


@pytest.mark.unit
class TestRequestIDMiddleware:
    """Test suite for RequestIDMiddleware."""

    def test_generates_uuid(self, client):
        """Test a missing X-Request-ID is generated as a UUID."""
        response = client.get("/echo")

        request_id = response.headers["X-Request-ID"]
        assert str(uuid.UUID(request_id)) == request_id
        assert response.json()["request_id"] == request_id

    def test_keeps_incoming_id(self, client):
        """Test an incoming X-Request-ID is echoed back unchanged."""
        response = client.get("/echo", headers={"X-Request-ID": "run-42"})

        assert response.headers["X-Request-ID"] == "run-42"
        assert response.json()["request_id"] == "run-42"


@pytest.mark.unit
class TestExceptionHandlers:
    """Test suite for the rig's exception handlers."""

    @pytest.mark.parametrize("path", ["/unknown-key", "/unknown-target"])
    def test_unknown_resources_are_404(self, client, path):
        """Test unknown keys and fault targets map to 404 with details."""
        response = client.get(path)

        assert response.status_code == 404
        body = response.json()
        assert body["details"]
        assert "timestamp" in body

    def test_domain_error_is_400(self, client):
        """Test request errors map to 400 and keep their details."""
        response = client.get("/bad-value")

        assert response.status_code == 400
        assert response.json() == {
            "error": "Value outside range",
            "details": {"property": "fanLevel"},
            "timestamp": response.json()["timestamp"],
        }

    def test_app_error_is_500(self, client):
        """Test non-domain application errors map to 500."""
        assert client.get("/infra").status_code == 500

    def test_unexpected_error_is_500(self, client):
        """Test unexpected exceptions map to a generic 500."""
        response = client.get("/boom")

        assert response.status_code == 500
        assert response.json()["error"] == "Internal server error"

    def test_validation_error_is_422(self, client):
        """Test path validation errors are serializable."""
        response = client.get("/typed/abc")

        assert response.status_code == 422
        assert response.json()["error"] == "Validation error"
        assert set(response.json()["details"][0]) <= {"type", "loc", "msg"}


@pytest.mark.unit
class TestHealth:
    """Test suite for the rig's health route."""

    def test_health(self, rig_client):
        """Test health reports the service and an ISO timestamp."""
        response = rig_client.get("/health")

        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "healthy"
        assert data["service"] == "vehicle-rig"
        assert "T" in data["timestamp"]


@pytest.mark.unit
class TestAppErrorShape:
    """Test suite for AppError and StageError."""

    def test_details_default_to_empty(self):
        """Test details default to an empty mapping."""
        exc = AppError("oops")

        assert str(exc) == "oops"
        assert exc.details == {}

    def test_stage_error_carries_stage(self):
        """Test StageError puts the stage into its details."""
        exc = StageError("match", "backend down", {"api": "PUT /climate"})

        assert exc.stage == "match"
        assert exc.details == {"stage": "match", "api": "PUT /climate"}
