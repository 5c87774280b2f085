"""Prompt templates for the language-model matcher.

All prompts use Jinja2 and embed the strictness level plus worked examples.
"""

from langchain_core.prompts import PromptTemplate

from apps.matchers.prompts.inference import TESTCASE_GEN, UNIT_INFER
from apps.matchers.prompts.matching import KEY_MATCH, PSEUDOCODE_MATCH, VALUE_MATCH
from apps.matchers.schemas import BackendRequest, BackendTask

PROMPTS: dict[BackendTask, PromptTemplate] = {
    BackendTask.KEY_MATCH: KEY_MATCH,
    BackendTask.VALUE_MATCH: VALUE_MATCH,
    BackendTask.PSEUDOCODE_MATCH: PSEUDOCODE_MATCH,
    BackendTask.UNIT_INFER: UNIT_INFER,
    BackendTask.TESTCASE_GEN: TESTCASE_GEN,
}


def render_prompt(request: BackendRequest) -> str:
    """Prompt text for one request, retry context included."""
    return PROMPTS[request.task].format(
        inputs=request.inputs,
        strictness=request.strictness.value,
        output_schema=[field.model_dump() for field in request.output_schema],
        context=list(request.context),
    )


__all__ = [
    "KEY_MATCH",
    "VALUE_MATCH",
    "PSEUDOCODE_MATCH",
    "UNIT_INFER",
    "TESTCASE_GEN",
    "PROMPTS",
    "render_prompt",
]
