"""teasercut: co-creating short single-moment teasers from long-form video podcasts."""

from .bundle import (
    AmplitudeEnvelope,
    FeatureBundle,
    Sentence,
    Speaker,
    VisibilityInterval,
    Word,
    parse_feature_bundle,
    range_duration,
    sentence_duration,
    serialize_feature_bundle,
)
from .extract import ExtractionResult, KeywordSuggestion, Moment, MomentQuery, extract_moments
from .refine import CutList, CutSegment, build_cutlist, context_suggestions, search_sentences
from .review import MomentOverview, build_overview, keyword_containment, liveliness

__version__ = "0.1.0"

__all__ = [
    "AmplitudeEnvelope",
    "CutList",
    "CutSegment",
    "ExtractionResult",
    "FeatureBundle",
    "KeywordSuggestion",
    "Moment",
    "MomentOverview",
    "MomentQuery",
    "Sentence",
    "Speaker",
    "VisibilityInterval",
    "Word",
    "build_cutlist",
    "build_overview",
    "context_suggestions",
    "extract_moments",
    "keyword_containment",
    "liveliness",
    "parse_feature_bundle",
    "range_duration",
    "search_sentences",
    "sentence_duration",
    "serialize_feature_bundle",
]
