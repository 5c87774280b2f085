"""Prompts for unit inference and test value suggestion."""

from langchain_core.prompts import PromptTemplate

from apps.matchers.prompts.matching import OUTPUT_RULES

UNIT_INFER_PROMPT = (
    """Name the physical unit of a vehicle API attribute.

ATTRIBUTE: {{ inputs.key }}
DESCRIPTION: {{ inputs.description or "(none)" }}
{% if inputs.known_units %}UNITS USED BY THE MATCHED SIGNAL: {{ inputs.known_units | join(", ") }}
{% endif %}
Answer a unit symbol such as km/h, m/s, kW, W, s, min, h, or null when the
description does not say. Never guess from the attribute name alone.

"""
    + OUTPUT_RULES
)

UNIT_INFER = PromptTemplate.from_template(UNIT_INFER_PROMPT, template_format="jinja2")


TESTCASE_GEN_PROMPT = (
    """Suggest boundary test values for a numeric vehicle API attribute.

ATTRIBUTE: {{ inputs.key }}
RANGE: {{ inputs.minimum }} .. {{ inputs.maximum }}

Answer the minimum, the maximum and the midpoint, in that order.

"""
    + OUTPUT_RULES
)

TESTCASE_GEN = PromptTemplate.from_template(TESTCASE_GEN_PROMPT, template_format="jinja2")
