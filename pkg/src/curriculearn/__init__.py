"""Curriculum data pipelines for noisy data-to-text corpora.

Score training pairs by difficulty or quality, cut them into ordered
shards, generate expanding/annealing phase schedules with deterministic
sampling manifests, build round-trip-translation-filtered cross-lingual
corpora, and sanity-check schedule choices with a synthetic learner.
"""

from .corpus import (
    FactTriple,
    Sample,
    SampleSet,
    Table,
    TableCell,
    linearize_facts,
    linearize_table,
    load_samples,
    save_samples,
)
from .criteria import (
    AlignmentScorer,
    LengthScorer,
    RarityScorer,
    ScoredSample,
    UnigramModel,
    alignment_from_file,
    build_unigram,
    heuristic_alignment,
    score_length,
    score_rarity,
    score_samples,
    tokenize,
)
from .loss_trunc import LossTruncation, truncate_stream
from .metrics import MetricReport, chrf_pp, corpus_bleu, rouge_n
from .rtt import (
    FilterConfig,
    HttpTranslator,
    IdentityTranslator,
    NoisingTranslator,
    RoundTripPair,
    TsvTranslator,
    filter_pairs,
    round_trip,
)
from .scheduler import (
    CurriculumPlanner,
    PhaseManifest,
    Schedule,
    Sharding,
    emit_manifests,
    make_schedule,
    make_shards,
    read_manifest,
    sample_phase,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentScorer",
    "CurriculumPlanner",
    "FactTriple",
    "FilterConfig",
    "HttpTranslator",
    "IdentityTranslator",
    "LengthScorer",
    "LossTruncation",
    "MetricReport",
    "NoisingTranslator",
    "PhaseManifest",
    "RarityScorer",
    "RoundTripPair",
    "Sample",
    "SampleSet",
    "Schedule",
    "ScoredSample",
    "Sharding",
    "Table",
    "TableCell",
    "TsvTranslator",
    "UnigramModel",
    "alignment_from_file",
    "build_unigram",
    "chrf_pp",
    "corpus_bleu",
    "emit_manifests",
    "filter_pairs",
    "heuristic_alignment",
    "linearize_facts",
    "linearize_table",
    "load_samples",
    "make_schedule",
    "make_shards",
    "read_manifest",
    "rouge_n",
    "round_trip",
    "sample_phase",
    "save_samples",
    "score_length",
    "score_rarity",
    "score_samples",
    "tokenize",
    "truncate_stream",
]
