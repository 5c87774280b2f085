"""Centralized application settings.

Environment-based configuration for the test pipeline, the matcher
backends and the simulated rig. CLI flags override these per run.
"""

from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from apps.tester.constants import ENV_DEVELOPMENT, ENV_PRODUCTION


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    # Application
    APP_NAME: str = Field(default="Vehicle API Tester", description="Application name")
    APP_VERSION: str = Field(default="1.0.0", description="Application version")
    ENVIRONMENT: Literal["development", "staging", "production", "testing"] = Field(
        default="development",
        description="Environment",
    )

    # Logging
    LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO",
        description="Logging level",
    )
    LOG_FORMAT: Literal["json", "console"] = Field(
        default="console",
        description="Log output format",
    )

    # Matching
    DEFAULT_STRICTNESS: Literal["strict", "moderate", "relaxed"] = Field(
        default="moderate",
        description="Matcher strictness when --strictness is not given",
    )
    DEFAULT_BACKEND: Literal["rules", "remote", "replay"] = Field(
        default="rules",
        description="Matcher backend when --backend is not given",
    )

    # Remote matcher backend
    MATCH_BACKEND_URL: str = Field(
        default="http://localhost:8100/v1/match",
        description="Endpoint of the remote matcher service",
    )
    MATCH_BACKEND_TOKEN: str = Field(
        default="",
        description="Bearer token sent to the remote matcher",
    )
    REMOTE_TRANSPORT: Literal["http", "chat"] = Field(
        default="http",
        description="http posts to MATCH_BACKEND_URL, chat talks to LLM_MODEL directly",
    )
    BACKEND_PARALLELISM: int = Field(
        default=4,
        ge=1,
        description="Maximum in-flight backend requests",
    )
    BACKEND_MAX_RETRIES: int = Field(
        default=3,
        ge=0,
        description="Re-prompts allowed after a schema violation",
    )

    # LLM Configuration
    LLM_MODEL: str = Field(
        default="openai:gpt-4o-mini",
        description="provider:model identifier for init_chat_model",
    )
    LLM_TEMPERATURE: float = Field(default=0.0, ge=0.0, le=2.0, description="LLM temperature")
    LLM_MAX_TOKENS: int = Field(default=1000, ge=1, description="Max tokens per completion")
    OPENAI_API_KEY: str = Field(default="", description="OpenAI API key")
    ANTHROPIC_API_KEY: str = Field(default="", description="Anthropic API key")

    # HTTP and resilience
    HTTP_TIMEOUT_CONNECT: float = Field(default=5.0, description="HTTP connect timeout (s)")
    HTTP_TIMEOUT_READ: float = Field(default=10.0, description="HTTP read timeout (s)")
    TRANSPORT_MAX_ATTEMPTS: int = Field(
        default=3,
        ge=1,
        description="Attempts per HTTP call on network errors",
    )
    CIRCUIT_BREAKER_FAILURE_THRESHOLD: int = Field(
        default=5,
        description="Consecutive failures before the matcher circuit opens",
    )
    CIRCUIT_BREAKER_RESET_TIMEOUT: int = Field(
        default=60,
        description="Seconds before a half-open retry",
    )

    # Simulated rig
    RIG_HOST: str = Field(default="127.0.0.1", description="Loopback host of the rig")
    RIG_PORT: int = Field(default=8700, description="Port for the standalone rig")
    RIG_STARTUP_TIMEOUT: float = Field(
        default=10.0,
        description="Seconds to wait for the loopback rig to come up",
    )

    # Execution
    NUMERIC_TOLERANCE: float = Field(
        default=1e-6,
        gt=0,
        description="Absolute tolerance for numeric assertions",
    )

    @property
    def is_development(self) -> bool:
        """Check if running in development mode."""
        return self.ENVIRONMENT == ENV_DEVELOPMENT

    @property
    def is_production(self) -> bool:
        """Check if running in production mode."""
        return self.ENVIRONMENT == ENV_PRODUCTION


# Global settings instance
settings = Settings()
