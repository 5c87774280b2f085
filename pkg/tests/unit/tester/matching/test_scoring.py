"""Unit tests for key and label scoring rules."""

import pytest

from apps.tester.core.exceptions import ConfigError
from apps.tester.domain.entities.matching import MatchCategory
from apps.tester.matching.lexicons import Lexicons, default_lexicons
from apps.tester.matching.scoring import label_score, score_keys, tokenize


@pytest.fixture
def lexicons():
    """Bundled lexicons."""
    return default_lexicons()


@pytest.mark.unit
class TestTokenize:
    """Test suite for tokenize."""

    @pytest.mark.parametrize(
        ("key", "tokens"),
        [
            ("fanLevel", ["fan", "level"]),
            ("fan_level", ["fan", "level"]),
            ("ACMode", ["ac", "mode"]),
            ("seat-heat-2", ["seat", "heat", "2"]),
        ],
    )
    def test_splits_case_styles(self, key, tokens):
        """Test camel, snake and kebab case split into lower-case words."""
        assert tokenize(key) == tokens


@pytest.mark.unit
class TestScoreKeys:
    """Test suite for score_keys."""

    @pytest.mark.parametrize(
        ("left", "right", "category"),
        [
            ("fanLevel", "fanLevel", MatchCategory.EXACT),
            ("fanLevel", "fan_level", MatchCategory.FORMAT),
            ("temperature", "temprature", MatchCategory.SPELLING),
            ("AC", "airConditioning", MatchCategory.ABBREVIATION),
            ("temp", "temperature", MatchCategory.ABBREVIATION),
            ("notLocked", "unlocked", MatchCategory.LOGICAL),
            ("fanSpeed", "blowerVelocity", MatchCategory.SEMANTIC),
            ("fanSpeed", "doorLock", MatchCategory.NONE),
        ],
    )
    def test_categories(self, lexicons, left, right, category):
        """Test the first rule that fires decides the category."""
        assert score_keys(left, right, lexicons).category is category

    def test_spelling_score(self, lexicons):
        """Test spelling scores one minus distance over the longer length."""
        assert score_keys("temperature", "temprature", lexicons).score == pytest.approx(1 - 1 / 11)

    def test_abbreviation_score(self, lexicons):
        """Test abbreviation scores grow with coverage of the long form."""
        assert score_keys("temp", "temperature", lexicons).score == pytest.approx(0.8 + 0.2 * 4 / 11)

    def test_short_keys_never_spelling(self, lexicons):
        """Test keys under six characters are not spelling variants."""
        assert score_keys("spd", "speed", lexicons).category is MatchCategory.NONE

    def test_no_match_scores_zero(self, lexicons):
        """Test unrelated keys score 0.0."""
        assert score_keys("", "x", lexicons).score == 0.0


@pytest.mark.unit
class TestLabelScore:
    """Test suite for label_score."""

    def test_boolean_equivalence(self, lexicons):
        """Test labels with the same truth value match."""
        result = label_score("ON", "ACTIVE", lexicons)

        assert result.category is MatchCategory.SEMANTIC
        assert result.score == 1.0

    def test_boolean_contradiction(self, lexicons):
        """Test labels with opposite truth values never match."""
        assert label_score("ON", "INACTIVE", lexicons).score == 0.0

    def test_exact_labels(self, lexicons):
        """Test identical labels are exact."""
        assert label_score("TRUE", "TRUE", lexicons).category is MatchCategory.EXACT


@pytest.mark.unit
class TestLexicons:
    """Test suite for Lexicons."""

    def test_custom_documents(self):
        """Test lexicons built from custom word lists are symmetric."""
        lexicons = Lexicons.from_documents("car\tauto\n", "hot\tcold\n", "AN\ttrue\n")

        assert lexicons.are_synonyms("Auto", "CAR")
        assert lexicons.antonym("cold") == "hot"
        assert lexicons.truth("an") is True

    def test_bad_truth_value(self):
        """Test truth values other than true/false raise ConfigError."""
        with pytest.raises(ConfigError):
            Lexicons.from_documents("", "", "AN\tmaybe\n")

    def test_coverage(self, lexicons):
        """Test coverage counts known synonym pairs."""
        assert lexicons.coverage([]) == 1.0
        assert lexicons.coverage([("fan", "blower"), ("fan", "propeller")]) == 0.5
