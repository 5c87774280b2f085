"""Prompts for key, value and pseudocode matching.

Every prompt states the strictness level and shows worked examples of what
that level accepts, then asks for a JSON object with the declared fields.
"""

from langchain_core.prompts import PromptTemplate

STRICTNESS_GUIDE = """STRICTNESS: {{ strictness }}
{% if strictness == "strict" %}Pair only names that are the same apart from case, separators or a
one-letter typo. Example: standard_mode ~ STANDARDMODE. Not: standard ~ STD.
{% elif strictness == "moderate" %}Also pair abbreviations, logical equivalents and synonyms.
Examples: standard ~ STD, OFF ~ NOT_ON, AutoStart ~ AutoLaunch.
{% else %}Pair anything a domain expert would plausibly read as the same signal.
Examples: all moderate pairs, plus AlarmActive=TRUE ~ AlarmClockStat=Ringing.
{% endif %}"""

OUTPUT_RULES = """Answer with ONE JSON object and nothing else, fields:
{% for field in output_schema %}- {{ field.name }}: {{ field.type }}
{% endfor %}{% if context %}
YOUR PREVIOUS ANSWER WAS REJECTED:
{% for violation in context %}- {{ violation }}
{% endfor %}{% endif %}"""

KEY_MATCH_PROMPT = (
    """You map vehicle API attribute names to CAN signal or Virtual Vehicle keys.

LEFT KEYS: {{ inputs.left | join(", ") }}
RIGHT KEYS: {{ inputs.right | join(", ") }}

Each key is used at most once. Leave keys without a counterpart out.
Category is one of exact, format, spelling, abbreviation, logical, semantic.
Score is your confidence in [0, 1].

"""
    + STRICTNESS_GUIDE
    + "\n"
    + OUTPUT_RULES
)

KEY_MATCH = PromptTemplate.from_template(KEY_MATCH_PROMPT, template_format="jinja2")


VALUE_MATCH_PROMPT = (
    """You pair the enumerated values of two encodings of the same vehicle signal.

LEFT LABELS: {{ inputs.left_labels | join(", ") }}
RIGHT LABELS: {{ inputs.right_labels | join(", ") }}

Pair labels meaning the same state (TRUE ~ Active, OFF ~ NOT_ON). Each label
is used at most once; leave labels without a counterpart out. Answer pairs as
[left, right].

"""
    + STRICTNESS_GUIDE
    + "\n"
    + OUTPUT_RULES
)

VALUE_MATCH = PromptTemplate.from_template(VALUE_MATCH_PROMPT, template_format="jinja2")


PSEUDOCODE_MATCH_PROMPT = (
    """A signal table documents a value as alternatives "key:label OR key:label".
Decide which alternatives realize the API value below.

API VALUE: {{ inputs.left_key }} = {{ inputs.left_label }}
ALTERNATIVES:
{% for key, label in inputs.alternatives %}- {{ key }}:{{ label }}
{% endfor %}
Under strict answer at most the single best alternative. Under relaxed
answer every alternative that belongs to the same state. Answer matches as
[key, label].

"""
    + STRICTNESS_GUIDE
    + "\n"
    + OUTPUT_RULES
)

PSEUDOCODE_MATCH = PromptTemplate.from_template(PSEUDOCODE_MATCH_PROMPT, template_format="jinja2")
