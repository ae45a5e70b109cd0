"""Per-candidate overview cards: tagline, duration, speakers, liveliness,
keyword containment, transcript preview.

Everything except the tagline is computed locally and deterministically.
The tagline comes from the gateway; when that fails the card degrades to the
moment's first words and is flagged, never silently."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import llm
from .bundle import AmplitudeEnvelope, FeatureBundle, TimeMs, range_duration
from .errors import EmptyInterval, GatewayError
from .text import contains_keyword, tokenize

log = logging.getLogger("teasercut.review")

PAGE_SIZE = 3        # candidates per review page; "show more" pages by three
PREVIEW_WORDS = 30
DEGRADED_TAGLINE_WORDS = 8


@dataclass(frozen=True)
class MomentOverview:
    moment: object  # extract.Moment
    tagline: str
    tagline_degraded: bool
    duration_ms: int
    speakers_featured: dict  # speaker_id -> role
    liveliness_by_speaker: dict  # speaker_id -> mean amplitude over their sentences
    liveliness_overall: float
    keywords_contained: tuple[str, ...]
    preview: str
    full_text: str


def liveliness(envelope: AmplitudeEnvelope, start: TimeMs, end: TimeMs) -> float:
    """Mean of envelope samples whose frame midpoint falls in [start, end)."""
    if start >= end:
        raise EmptyInterval(f"empty interval [{start}, {end})")
    total, count = envelope.interval_sum(start, end)
    if count == 0:
        raise EmptyInterval(f"no envelope frames inside [{start}, {end})")
    return total / count


def keyword_containment(bundle: FeatureBundle, moment, keywords) -> tuple[str, ...]:
    """Subset of keywords occurring as case-insensitive whole words in the moment text."""
    ids = moment.sentence_ids(bundle)
    tokens = tokenize(" ".join(bundle.sentence_text(sid) for sid in ids))
    return tuple(kw for kw in keywords if contains_keyword(tokens, kw))


def _speaker_liveliness(bundle: FeatureBundle, ids) -> tuple[dict, float]:
    """(per-speaker mean, overall mean) over the moment's sentence spans.

    The overall mean runs over the union of sentence word spans (not the raw
    window span), so it is a weighted average of the per-speaker means and
    always lies between their min and max."""
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for sid in ids:
        speaker = bundle.sentence(sid).speaker_id
        start, end = bundle.sentence_span(sid)
        total, count = bundle.envelope.interval_sum(start, end)
        sums[speaker] = sums.get(speaker, 0.0) + total
        counts[speaker] = counts.get(speaker, 0) + count
    per_speaker = {spk: sums[spk] / counts[spk] for spk in sums if counts[spk] > 0}
    grand_count = sum(counts.values())
    overall = sum(sums.values()) / grand_count if grand_count else 0.0
    return per_speaker, overall


def build_overview(bundle: FeatureBundle, moment, query, backend) -> MomentOverview:
    ids = moment.sentence_ids(bundle)
    full_text = " ".join(bundle.sentence_text(sid) for sid in ids)
    word_list = full_text.split()

    tagline_degraded = False
    try:
        reply = llm.complete(backend, llm.render_tagline_prompt(full_text))
        tagline = llm.parse_tagline_response(reply)
    except GatewayError as exc:
        log.warning("tagline generation degraded: %s", exc)
        tagline = " ".join(word_list[:DEGRADED_TAGLINE_WORDS]) + "…"
        tagline_degraded = True

    speakers_featured = {}
    for sid in ids:
        speaker = bundle.speaker(bundle.sentence(sid).speaker_id)
        speakers_featured[speaker.id] = speaker.role
    per_speaker, overall = _speaker_liveliness(bundle, ids)

    return MomentOverview(
        moment=moment,
        tagline=tagline,
        tagline_degraded=tagline_degraded,
        duration_ms=range_duration(bundle, ids),
        speakers_featured=speakers_featured,
        liveliness_by_speaker=per_speaker,
        liveliness_overall=overall,
        keywords_contained=keyword_containment(bundle, moment, query.keywords),
        preview=" ".join(word_list[:PREVIEW_WORDS]),
        full_text=full_text,
    )


def page_of(candidates, page: int, size: int = PAGE_SIZE):
    """Slice a candidate pool into review pages of three."""
    return candidates[page * size : (page + 1) * size]
