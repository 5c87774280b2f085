"""Key perturbations, one per fuzzy-matching obstacle.

Each function returns a variant of a camelCase key, or None when the key
does not admit that perturbation. The forge checks every variant with
score_keys and redraws when it lands in another category.
"""

import random
import string
from collections.abc import Sequence
from typing import NamedTuple

from apps.tester.corpus.vocabulary import EXTRA_SYNONYMS, LEXICON_SYNONYMS
from apps.tester.domain.entities.matching import MatchCategory
from apps.tester.matching.lexicons import Lexicons
from apps.tester.matching.scoring import tokenize

# Below this length a second edit would push the spelling score under moderate
TWO_EDIT_MIN_LENGTH = 10


class Perturbed(NamedTuple):
    key: str
    substitution: tuple[str, str] | None = None


def camel(tokens: Sequence[str]) -> str:
    head, *rest = tokens
    return head.lower() + "".join(token.capitalize() for token in rest)


def pascal(tokens: Sequence[str]) -> str:
    return "".join(token.capitalize() for token in tokens)


def misspell(key: str, rng: random.Random) -> Perturbed | None:
    """One or two single-character edits, never on the first character."""
    chars = list(key)
    edits = rng.choice((1, 2)) if len(key) >= TWO_EDIT_MIN_LENGTH else 1
    for _ in range(edits):
        positions = [i for i in range(1, len(chars)) if chars[i].islower()]
        if not positions:
            return None
        index = rng.choice(positions)
        match rng.choice(("substitute", "delete", "insert")):
            case "substitute":
                chars[index] = rng.choice([c for c in string.ascii_lowercase if c != chars[index]])
            case "delete":
                del chars[index]
            case _:
                chars.insert(index, rng.choice(string.ascii_lowercase))
    variant = "".join(chars)
    return Perturbed(variant) if variant != key else None


def abbreviate(key: str, rng: random.Random) -> Perturbed | None:
    """Upper-case initials or three-letter token prefixes."""
    tokens = tokenize(key)
    if len(tokens) < 2:
        return None
    if rng.random() < 0.5:
        return Perturbed("".join(token[0] for token in tokens).upper())
    clipped = [token[:3] for token in tokens]
    if clipped == tokens:
        return None
    return Perturbed(camel(clipped))


def restyle(key: str, rng: random.Random) -> Perturbed | None:
    tokens = tokenize(key)
    styles = ["_".join(tokens), "_".join(tokens).upper(), pascal(tokens)]
    variants = [style for style in styles if style != key]
    return Perturbed(rng.choice(variants)) if variants else None


def negate(key: str, rng: random.Random, lexicons: Lexicons) -> Perturbed | None:
    """Replace a state word by ``not`` and its antonym: locked -> notUnlocked."""
    tokens = tokenize(key)
    positions = [i for i, token in enumerate(tokens) if lexicons.antonym(token) is not None]
    if not positions:
        return None
    index = rng.choice(positions)
    antonym = lexicons.antonym(tokens[index]) or ""
    return Perturbed(camel([*tokens[:index], "not", antonym, *tokens[index + 1 :]]))


def substitute_synonym(key: str, rng: random.Random, *, in_lexicon: bool) -> Perturbed | None:
    """Swap one word for a synonym, from the bundled lexicon or outside it."""
    pool = LEXICON_SYNONYMS if in_lexicon else EXTRA_SYNONYMS
    tokens = tokenize(key)
    positions = [i for i, token in enumerate(tokens) if token in pool]
    if not positions:
        return None
    index = rng.choice(positions)
    original = tokens[index]
    replaced = [*tokens[:index], pool[original], *tokens[index + 1 :]]
    return Perturbed(camel(replaced), (original, pool[original]))


def perturb(
    category: MatchCategory,
    key: str,
    rng: random.Random,
    lexicons: Lexicons,
    *,
    in_lexicon: bool = True,
) -> Perturbed | None:
    """Apply the perturbation of one fuzzy-matching category."""
    match category:
        case MatchCategory.EXACT:
            return Perturbed(key)
        case MatchCategory.SPELLING:
            return misspell(key, rng)
        case MatchCategory.ABBREVIATION:
            return abbreviate(key, rng)
        case MatchCategory.FORMAT:
            return restyle(key, rng)
        case MatchCategory.LOGICAL:
            return negate(key, rng, lexicons)
        case MatchCategory.SEMANTIC:
            return substitute_synonym(key, rng, in_lexicon=in_lexicon)
    raise ValueError(f"no perturbation for category {category}")
