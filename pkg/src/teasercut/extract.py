"""Multi-parameter moment search and trend-ranked keyword suggestion.

Two search backends share one contract: pass a CompletionBackend to route the
pick through the clip-extraction prompt, or pass backend=None to run the
deterministic heuristic search. The heuristic additionally guarantees a hard
speaker filter and near-target durations whenever near-target windows exist;
see windows.rank_and_select for the tiered selection policy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import llm
from .bundle import FeatureBundle, range_duration
from .errors import ContractViolation, NoFeasibleWindow, ParseError
from .text import count_phrase, tokenize
from .windows import (
    RankedWindow,
    WindowSentence,
    rank_and_select,
    score_window,
)

log = logging.getLogger("teasercut.extract")

TARGET_LENGTHS_S = (15, 30, 45)
SPEAKER_OPTIONS = ("host_only", "guest_only", "both")
STYLES = ("informational", "curiosity_arousing", "funny", "emotional")


@dataclass(frozen=True)
class MomentQuery:
    """The four search parameters. Defaults: 30 s, both speakers, informational."""

    target_length_s: int = 30
    speakers: str = "both"
    style: str = "informational"
    keywords: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.target_length_s not in TARGET_LENGTHS_S:
            raise ValueError(f"target_length_s must be one of {TARGET_LENGTHS_S}")
        if self.speakers not in SPEAKER_OPTIONS:
            raise ValueError(f"speakers must be one of {SPEAKER_OPTIONS}")
        if self.style not in STYLES:
            raise ValueError(f"style must be one of {STYLES}")
        object.__setattr__(self, "keywords", tuple(k.strip().lower() for k in self.keywords if k.strip()))

    @property
    def target_ms(self) -> int:
        return self.target_length_s * 1000


@dataclass(frozen=True)
class Moment:
    """A consecutive sentence range [first_sentence .. last_sentence]."""

    first_sentence: int
    last_sentence: int
    duration_ms: int
    source_backend: str  # "llm" | "heuristic"

    def sentence_ids(self, bundle: FeatureBundle) -> list[int]:
        lo, hi = bundle.position(self.first_sentence), bundle.position(self.last_sentence)
        return [bundle.sentence_at(p).id for p in range(lo, hi + 1)]

    def overlaps(self, other: "Moment", bundle: FeatureBundle) -> bool:
        a = (bundle.position(self.first_sentence), bundle.position(self.last_sentence))
        b = (bundle.position(other.first_sentence), bundle.position(other.last_sentence))
        return a[0] <= b[1] and b[0] <= a[1]


@dataclass(frozen=True)
class KeywordSuggestion:
    keyword: str
    trend_score: float


@dataclass(frozen=True)
class ExtractionResult:
    moments: tuple[Moment, ...]
    warning: str | None = None


# --- trend clients -----------------------------------------------------------

class OfflineTrendClient:
    """Fallback trend source: scores a keyword by its whole-word frequency in
    the episode transcript. Never errors."""

    def __init__(self, bundle: FeatureBundle) -> None:
        self._tokens = tokenize(bundle.text())

    def score(self, keyword: str) -> float:
        return float(count_phrase(self._tokens, tokenize(keyword)))


def suggest_keywords(bundle: FeatureBundle, trend_client, backend) -> list[KeywordSuggestion]:
    """Six topic keywords from the keyword prompt, ranked by trend score
    (descending, ties broken lexicographically)."""
    reply = llm.complete(backend, llm.render_keywords_prompt(bundle))
    keywords = llm.parse_keyword_response(reply)
    suggestions = [KeywordSuggestion(kw, float(trend_client.score(kw))) for kw in keywords]
    suggestions.sort(key=lambda s: (-s.trend_score, s.keyword))
    return suggestions


# --- moment search -----------------------------------------------------------

def _sentence_views(bundle: FeatureBundle, query: MomentQuery) -> list[WindowSentence]:
    views = []
    for s in bundle.sentences:
        role = bundle.speaker(s.speaker_id).role
        if query.speakers == "host_only":
            allowed = role == "host"
        elif query.speakers == "guest_only":
            allowed = role == "guest"
        else:
            allowed = True
        text = bundle.sentence_text(s.id)
        start, end = bundle.sentence_span(s.id)
        total, count = bundle.envelope.interval_sum(start, end)
        views.append(
            WindowSentence(
                id=s.id,
                duration_ms=end - start,
                allowed=allowed,
                text=text,
                tokens=tuple(tokenize(text)),
                role=role,
                liveliness=total / count if count else 0.0,
            )
        )
    return views


def _window_liveliness_fn(bundle: FeatureBundle):
    def fn(start_pos: int, end_pos: int) -> float:
        start, _ = bundle.sentence_span(bundle.sentence_at(start_pos).id)
        _, end = bundle.sentence_span(bundle.sentence_at(end_pos).id)
        total, count = bundle.envelope.interval_sum(start, end)
        return total / count if count else 0.0

    return fn


def heuristic_score(bundle: FeatureBundle, window: tuple[int, int], query: MomentQuery) -> float:
    """Score one consecutive window (first_id, last_id) under the pinned
    formula: 0.35 keyword hit ratio + 0.25 style lexicon + 0.25 duration
    closeness + 0.15 liveliness."""
    first_id, last_id = window
    lo, hi = bundle.position(first_id), bundle.position(last_id)
    ids = [bundle.sentence_at(p).id for p in range(lo, hi + 1)]
    text = " ".join(bundle.sentence_text(sid) for sid in ids)
    duration = range_duration(bundle, ids)
    start, _ = bundle.sentence_span(ids[0])
    _, end = bundle.sentence_span(ids[-1])
    total, count = bundle.envelope.interval_sum(start, end)
    liveliness = total / count if count else 0.0
    return score_window(
        text, tokenize(text), duration, liveliness, query.keywords, query.style, query.target_ms
    )


def select_windows(bundle: FeatureBundle, query: MomentQuery, count: int = 3) -> list[RankedWindow]:
    views = _sentence_views(bundle, query)
    return rank_and_select(
        views,
        query.target_ms,
        query.keywords,
        query.style,
        count=count,
        liveliness_fn=_window_liveliness_fn(bundle),
        both_roles_bonus=(query.speakers == "both"),
    )


def extract_moments(bundle: FeatureBundle, query: MomentQuery, backend=None, count: int = 3) -> ExtractionResult:
    """Find up to `count` pairwise non-overlapping consecutive moments.

    backend=None runs the heuristic search; a CompletionBackend routes the
    pick through the extraction prompt (re-asked up to twice on malformed or
    contract-violating replies).

    Heuristic path: raises NoFeasibleWindow when not a single window passes
    the hard speaker filter; returns fewer than `count` moments with a
    warning when the transcript cannot supply that many disjoint windows.
    """
    if backend is None:
        picked = select_windows(bundle, query, count=count)
        if not picked:
            raise NoFeasibleWindow(f"no window satisfies speaker filter {query.speakers!r}")
        moments = tuple(
            Moment(
                first_sentence=w.first_id,
                last_sentence=w.last_id,
                duration_ms=w.duration_ms,
                source_backend="heuristic",
            )
            for w in picked
        )
        warning = None
        if len(moments) < count:
            warning = f"only {len(moments)} disjoint windows satisfy the speaker filter"
        return ExtractionResult(moments=moments, warning=warning)

    prompt = llm.render_extract_prompt(bundle, query)
    last_error: Exception | None = None
    for attempt in range(1 + llm.CONTRACT_RETRIES):
        reply = llm.complete(backend, prompt)
        try:
            clips = llm.parse_clip_response(reply, bundle)
        except (ParseError, ContractViolation) as exc:
            last_error = exc
            log.warning("clip reply rejected (attempt %d/%d): %s", attempt + 1, 1 + llm.CONTRACT_RETRIES, exc)
            continue
        moments = tuple(
            Moment(
                first_sentence=ids[0],
                last_sentence=ids[-1],
                duration_ms=range_duration(bundle, ids),
                source_backend="llm",
            )
            for ids in clips
        )
        return ExtractionResult(moments=moments)
    assert last_error is not None
    raise last_error
