"""Sentence-level refinement: context suggestions and cut-list construction.

The cut list is the teaser's editable skeleton: ordered source segments, one
per selected sentence (split into sub-segments when filler words are removed),
each optionally carrying transition effects."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .bundle import FeatureBundle
from .errors import DuplicateSentence

DEFAULT_CONTEXT_K = 3
LEADING_QUESTION_LOOKBACK = 20


@dataclass(frozen=True)
class RefineContext:
    core: tuple[int, ...]
    before: tuple[int, ...]
    after: tuple[int, ...]
    leading_question: int | None
    between: tuple[int, ...]


@dataclass(frozen=True)
class CutSegment:
    sentence_id: int
    source_in: int
    source_out: int
    effects: tuple = ()

    @property
    def duration(self) -> int:
        return self.source_out - self.source_in

    def with_effects(self, effects: tuple) -> "CutSegment":
        return replace(self, effects=effects)


@dataclass(frozen=True)
class CutList:
    segments: tuple[CutSegment, ...]
    fillers_removed: bool = False

    def duration_ms(self) -> int:
        return sum(seg.duration for seg in self.segments)

    def sentence_ids(self) -> list[int]:
        """Distinct sentence ids in cut-list order."""
        seen: list[int] = []
        for seg in self.segments:
            if seg.sentence_id not in seen:
                seen.append(seg.sentence_id)
        return seen

    def timeline_start_of(self, index: int) -> int:
        return sum(seg.duration for seg in self.segments[:index])


def context_suggestions(
    bundle: FeatureBundle,
    moment,
    k: int = DEFAULT_CONTEXT_K,
    lookback: int = LEADING_QUESTION_LOOKBACK,
) -> RefineContext:
    """Neighbor suggestions around the moment plus the leading question.

    before/after are the k sentences immediately on either side (clipped at
    episode bounds). The leading question is the nearest earlier sentence
    whose speaker role differs from the moment's opening speaker, searched up
    to `lookback` sentences back; sentences strictly between it and the
    moment are reported for lazy reveal."""
    ids = moment.sentence_ids(bundle)
    first_pos = bundle.position(ids[0])
    last_pos = bundle.position(ids[-1])
    before = tuple(
        bundle.sentence_at(p).id for p in range(max(0, first_pos - k), first_pos)
    )
    after = tuple(
        bundle.sentence_at(p).id
        for p in range(last_pos + 1, min(len(bundle.sentences), last_pos + 1 + k))
    )
    opening_role = bundle.sentence_role(ids[0])
    leading_question = None
    for p in range(first_pos - 1, max(-1, first_pos - 1 - lookback), -1):
        candidate = bundle.sentence_at(p)
        if bundle.speaker(candidate.speaker_id).role != opening_role:
            leading_question = candidate.id
            break
    between: tuple[int, ...] = ()
    if leading_question is not None:
        lq_pos = bundle.position(leading_question)
        if lq_pos < first_pos - 1:
            between = tuple(bundle.sentence_at(p).id for p in range(lq_pos + 1, first_pos))
    return RefineContext(
        core=tuple(ids),
        before=before,
        after=after,
        leading_question=leading_question,
        between=between,
    )


def build_cutlist(bundle: FeatureBundle, ordered_ids, remove_fillers: bool = False) -> CutList:
    """One segment per sentence in the given order; with remove_fillers each
    sentence is split into sub-segments that skip filler-word intervals.

    Total cut-list duration equals range_duration(ordered_ids, remove_fillers).
    """
    ordered_ids = list(ordered_ids)
    seen: set[int] = set()
    for sid in ordered_ids:
        bundle.sentence(sid)  # raises UnknownSentence
        if sid in seen:
            raise DuplicateSentence(f"sentence {sid} selected twice")
        seen.add(sid)

    segments: list[CutSegment] = []
    for sid in ordered_ids:
        words = bundle.sentence_words(sid)
        start, end = words[0].start, words[-1].end
        if not remove_fillers:
            segments.append(CutSegment(sentence_id=sid, source_in=start, source_out=end))
            continue
        cursor = start
        for w in words:
            if not w.is_filler:
                continue
            if w.start > cursor:
                segments.append(CutSegment(sentence_id=sid, source_in=cursor, source_out=w.start))
            cursor = max(cursor, w.end)
        if end > cursor:
            segments.append(CutSegment(sentence_id=sid, source_in=cursor, source_out=end))
    return CutList(segments=tuple(segments), fillers_removed=remove_fillers)


def search_sentences(bundle: FeatureBundle, query: str) -> list[int]:
    """Case-insensitive substring search over sentence text, transcript order.
    An empty query matches every sentence."""
    needle = query.lower()
    return [s.id for s in bundle.sentences if needle in bundle.sentence_text(s.id).lower()]
