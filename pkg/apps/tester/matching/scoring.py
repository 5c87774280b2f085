"""Key and label similarity rules.

Rules are tried in priority order and the first that fires decides the
category:

- exact: identical strings
- format: identical after case folding and dropping ``_``, ``-`` and spaces
- spelling: format-normalized edit distance of at most 2 on keys of at
  least 6 characters, scored ``1 - distance / maxlen``
- abbreviation: whole-key prefix, token initials, token-wise prefixes, or
  an ordered subsequence sharing the first letter, scored
  ``0.8 + 0.2 * coverage``
- logical: equal once ``not <word>`` is rewritten to the word's antonym
- semantic: token-wise equal up to lexicon synonyms
"""

import re
from typing import NamedTuple

from rapidfuzz.distance import Levenshtein

from apps.tester.constants import (
    ABBREVIATION_BASE_SCORE,
    ABBREVIATION_COVERAGE_WEIGHT,
    ABBREVIATION_MIN_SUBSEQUENCE,
    NEGATION_TOKENS,
    SPELLING_MAX_DISTANCE,
    SPELLING_MIN_LENGTH,
)
from apps.tester.domain.entities.matching import MatchCategory
from apps.tester.matching.lexicons import Lexicons

_FORMAT_NOISE = re.compile(r"[\s_\-]")
_SEPARATOR = re.compile(r"[^0-9A-Za-z]+")
_CAMEL = re.compile(r"[A-Z]+(?![a-z])|[A-Z]?[a-z]+|\d+")


class KeyScore(NamedTuple):
    category: MatchCategory
    score: float


NO_MATCH = KeyScore(MatchCategory.NONE, 0.0)


def format_normalize(text: str) -> str:
    return _FORMAT_NOISE.sub("", text).casefold()


def tokenize(text: str) -> list[str]:
    """Lower-cased word tokens across camelCase, snake_case and kebab-case."""
    return [
        token.lower() for part in _SEPARATOR.split(text) if part for token in _CAMEL.findall(part)
    ]


def score_keys(a: str, b: str, lexicons: Lexicons) -> KeyScore:
    """Categorize and score the relation between two keys.

    Args:
        a: Left key
        b: Right key
        lexicons: Synonym/antonym lists for the logical and semantic rules

    Returns:
        (category, score); ``(none, 0.0)`` when no rule fires
    """
    if a == b:
        return KeyScore(MatchCategory.EXACT, 1.0)

    fa, fb = format_normalize(a), format_normalize(b)
    if not fa or not fb:
        return NO_MATCH
    if fa == fb:
        return KeyScore(MatchCategory.FORMAT, 1.0)

    longest = max(len(fa), len(fb))
    if longest >= SPELLING_MIN_LENGTH:
        distance = Levenshtein.distance(fa, fb, score_cutoff=SPELLING_MAX_DISTANCE)
        if distance <= SPELLING_MAX_DISTANCE:
            return KeyScore(MatchCategory.SPELLING, 1.0 - distance / longest)

    ta, tb = tokenize(a), tokenize(b)
    abbreviation = _abbreviation_score(fa, fb, ta, tb)
    if abbreviation is not None:
        return KeyScore(MatchCategory.ABBREVIATION, abbreviation)

    if _logically_equal(ta, tb, lexicons):
        return KeyScore(MatchCategory.LOGICAL, 1.0)

    if _semantically_equal(ta, tb, lexicons):
        return KeyScore(MatchCategory.SEMANTIC, 1.0)

    return NO_MATCH


def label_score(a: str, b: str, lexicons: Lexicons) -> KeyScore:
    """score_keys for enum labels, with boolean equivalences on top.

    Labels the boolean lexicon knows on both sides match exactly when their
    truth values agree (TRUE ~ Active) and never when they disagree.
    """
    truth_a, truth_b = lexicons.truth(a), lexicons.truth(b)
    if truth_a is not None and truth_b is not None:
        if truth_a != truth_b:
            return NO_MATCH
        scored = score_keys(a, b, lexicons)
        return scored if scored.score >= 1.0 else KeyScore(MatchCategory.SEMANTIC, 1.0)
    return score_keys(a, b, lexicons)


def _abbreviation_score(fa: str, fb: str, ta: list[str], tb: list[str]) -> float | None:
    if len(fa) == len(fb):
        return None
    (short, short_tokens), (long, long_tokens) = sorted(
        ((fa, ta), (fb, tb)), key=lambda item: len(item[0])
    )
    if len(short) < 2:
        return None

    compact = len(short) * 2 <= len(long)
    fires = (
        (compact and long.startswith(short))
        or (len(long_tokens) > 1 and short == "".join(token[0] for token in long_tokens))
        or _tokenwise_prefix(short_tokens, long_tokens)
        or (
            compact
            and len(short) >= ABBREVIATION_MIN_SUBSEQUENCE
            and short[0] == long[0]
            and _is_subsequence(short, long)
        )
    )
    if not fires:
        return None
    return ABBREVIATION_BASE_SCORE + ABBREVIATION_COVERAGE_WEIGHT * len(short) / len(long)


def _tokenwise_prefix(short: list[str], long: list[str]) -> bool:
    if len(short) != len(long) or len(short) < 2:
        return False
    pairs = list(zip(short, long, strict=True))
    return all(lt.startswith(st) for st, lt in pairs) and any(st != lt for st, lt in pairs)


def _is_subsequence(short: str, long: str) -> bool:
    remaining = iter(long)
    return all(char in remaining for char in short)


def _negation_rewrite(tokens: list[str], lexicons: Lexicons) -> list[str]:
    rewritten: list[str] = []
    index = 0
    while index < len(tokens):
        token = tokens[index]
        antonym = lexicons.antonym(tokens[index + 1]) if index + 1 < len(tokens) else None
        if token in NEGATION_TOKENS and antonym is not None:
            rewritten.append(antonym)
            index += 2
        else:
            rewritten.append(token)
            index += 1
    return rewritten


def _logically_equal(ta: list[str], tb: list[str], lexicons: Lexicons) -> bool:
    ra, rb = _negation_rewrite(ta, lexicons), _negation_rewrite(tb, lexicons)
    changed = ra != ta or rb != tb
    return changed and ra == rb


def _semantically_equal(ta: list[str], tb: list[str], lexicons: Lexicons) -> bool:
    if not ta or len(ta) != len(tb):
        return False
    synonym_used = False
    for left, right in zip(ta, tb, strict=True):
        if left == right:
            continue
        if not lexicons.are_synonyms(left, right):
            return False
        synonym_used = True
    return synonym_used
