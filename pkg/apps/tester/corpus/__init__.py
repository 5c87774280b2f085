"""Seeded corpora with ground truth for evaluating the pipeline."""

from apps.tester.corpus.forge import Corpus, forge
from apps.tester.corpus.manifest import (
    CorpusManifest,
    Perturbation,
    TrueMapping,
    emit_manifest,
    parse_manifest,
)
from apps.tester.corpus.scoring import score_against_manifest, semantic_coverage

__all__ = [
    "Corpus",
    "CorpusManifest",
    "Perturbation",
    "TrueMapping",
    "emit_manifest",
    "forge",
    "parse_manifest",
    "score_against_manifest",
    "semantic_coverage",
]
