"""Chat-model configuration for the language-model matcher.

Supports OpenAI and Anthropic models through LangChain's init_chat_model;
the provider is the prefix of ``LLM_MODEL`` (``"anthropic:claude-..."``).
"""

from enum import StrEnum
from typing import Any

from langchain.chat_models import init_chat_model
from langchain_core.language_models import BaseChatModel

from apps.tester.settings import settings


class LLMProvider(StrEnum):
    """Supported LLM providers."""

    OPENAI = "openai"
    ANTHROPIC = "anthropic"


def split_model(identifier: str) -> tuple[str, str]:
    """``"openai:gpt-4o-mini"`` -> ``("openai", "gpt-4o-mini")``; bare names default to OpenAI."""
    if ":" in identifier:
        provider, model = identifier.split(":", 1)
        return provider, model
    return LLMProvider.OPENAI.value, identifier


def get_llm(
    model: str | None = None,
    temperature: float | None = None,
    **kwargs: Any,
) -> BaseChatModel:
    """Get a configured chat model.

    Args:
        model: provider:model identifier. Defaults to settings.LLM_MODEL.
        temperature: Defaults to settings.LLM_TEMPERATURE; matching wants 0.
        **kwargs: Additional arguments passed to init_chat_model.

    Returns:
        BaseChatModel: Configured chat model instance.

    Example:
        >>> llm = get_llm("anthropic:claude-3-5-haiku-20241022")
    """
    provider, name = split_model(model or settings.LLM_MODEL)
    init_kwargs: dict[str, Any] = {
        "temperature": settings.LLM_TEMPERATURE if temperature is None else temperature,
        "max_tokens": settings.LLM_MAX_TOKENS,
        **kwargs,
    }

    # Keys from settings only when the caller and the environment gave none
    if provider == LLMProvider.OPENAI and not init_kwargs.get("api_key") and settings.OPENAI_API_KEY:
        init_kwargs["api_key"] = settings.OPENAI_API_KEY
    elif (
        provider == LLMProvider.ANTHROPIC
        and not init_kwargs.get("api_key")
        and settings.ANTHROPIC_API_KEY
    ):
        init_kwargs["api_key"] = settings.ANTHROPIC_API_KEY

    return init_chat_model(f"{provider}:{name}", **init_kwargs)
