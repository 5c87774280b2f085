"""Application constants.

This module contains true constants - values that never change throughout
the application lifecycle. Tunables that operators may change live in
settings.py.
"""

# ============================================================================
# ENVIRONMENT NAMES
# ============================================================================

ENV_DEVELOPMENT = "development"
ENV_PRODUCTION = "production"
ENV_TEST = "testing"

# ============================================================================
# HTTP STATUS CODES
# ============================================================================

HTTP_STATUS_OK = 200
HTTP_STATUS_BAD_REQUEST = 400
HTTP_STATUS_NOT_FOUND = 404
HTTP_STATUS_INTERNAL_ERROR = 500

# ============================================================================
# MATCHING
# ============================================================================

STRICT_THRESHOLD = 0.95
MODERATE_THRESHOLD = 0.80
RELAXED_THRESHOLD = 0.60

# First rule that fires wins, in this order
CATEGORY_PRIORITY: tuple[str, ...] = (
    "exact",
    "format",
    "spelling",
    "abbreviation",
    "logical",
    "semantic",
    "pseudocode",
)

SPELLING_MAX_DISTANCE = 2
SPELLING_MIN_LENGTH = 6
ABBREVIATION_BASE_SCORE = 0.8
ABBREVIATION_COVERAGE_WEIGHT = 0.2
ABBREVIATION_MIN_SUBSEQUENCE = 3

# Pseudocode alternatives: an anchor is scored by its direct label match,
# the rest by chain membership
PSEUDOCODE_SAME_KEY_SCORE = 0.85
PSEUDOCODE_FOREIGN_KEY_SCORE = 0.65

NEGATION_TOKENS = frozenset({"not", "no", "non"})

# ============================================================================
# SKIP REASONS
# ============================================================================

SKIP_NO_CANDIDATES = "no_candidates"
SKIP_NO_KEY_MATCH = "no_key_match"
SKIP_NO_VALUE_MATCH = "no_value_match"
SKIP_PSEUDOCODE_GRAMMAR = "pseudocode_grammar"
SKIP_DIMENSION_MISMATCH = "dimension_mismatch"
SKIP_NO_VV_MATCH = "no_vv_match"
SKIP_MISSING_UNIT = "missing_unit"
SKIP_MISSING_RANGE = "missing_range"
SKIP_MISSING_ROLE = "missing_role"
SKIP_UNSUPPORTED_TYPE = "unsupported_type"
SKIP_DOMAIN_VIOLATION = "domain_violation"
SKIP_NO_TEST_VALUES = "no_test_values"

STAGE_API_TO_CAN = "api_to_can"
STAGE_CAN_TO_VV = "can_to_vv"
STAGE_GENERATION = "generation"

# ============================================================================
# GENERATION
# ============================================================================

# Times of day sampled for datetime properties: (hour, minute)
DATETIME_SAMPLES: tuple[tuple[int, int], ...] = ((0, 0), (7, 45), (23, 59))
DATETIME_SAMPLE_DATE = "2024-01-01"

HOURS_SUFFIXES: tuple[str, ...] = ("Hours", "Hour", "Hr")
MINUTES_SUFFIXES: tuple[str, ...] = ("Minutes", "Minute", "Min")

PLAN_HEADER = "# vehicle-api-tester plan v1"

# ============================================================================
# EXECUTION
# ============================================================================

ADMIN_VV_PREFIX = "/_vv"
ADMIN_FAULT_PATH = "/_fault"
ADMIN_TRACE_PATH = "/_trace"
HEALTH_PATH = "/health"

CAN_LOG_EXCERPT = 50

# ============================================================================
# ARTIFACT FILE NAMES
# ============================================================================

TEST_OBJECTS_FILE = "test_objects.json"
MATCHES_FILE = "matches.json"
CASES_FILE = "cases.json"
PLAN_FILE = "plan.txt"
PYTEST_MODULE_FILE = "test_generated.py"
RUN_FILE = "run.json"
TIMINGS_FILE = "timings.json"
REPORT_RECORD_FILE = "report.rec"
REPORT_TEXT_FILE = "report.txt"
SCORES_FILE = "scores.json"

# ============================================================================
# CORPUS
# ============================================================================

CORPUS_PROFILES: tuple[str, ...] = ("fuzzy5", "pseudocode", "units", "dependencies", "mixed")

# Mapping categories besides the key perturbation categories
CATEGORY_CLEAN = "clean"
CATEGORY_DEPENDENCY = "dependency"

# Stages a perturbation may apply to besides api_to_can and can_to_vv
STAGE_VALUES = "values"
STAGE_UNITS = "units"

# Share of semantic substitutions drawn from outside the bundled lexicon
SEMANTIC_OUT_OF_LEXICON_RATE = 0.1

CORPUS_SPEC_FILE = "spec.yaml"
CORPUS_CAN_FILE = "can_table.txt"
CORPUS_VV_FILE = "vv_table.txt"
CORPUS_RIG_FILE = "rig.json"
CORPUS_MANIFEST_FILE = "manifest.rec"
