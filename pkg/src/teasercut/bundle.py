"""Feature bundle: the episode-level input the engine works from.

A bundle carries everything the upstream ML tooling produced for one episode:
words with millisecond timing and filler flags, sentence spans with speaker
assignment, the speaker roster, an audio amplitude envelope, and person
visibility intervals. The engine never re-segments sentences or touches
media; it only does timeline arithmetic over this structure.

All times are integer milliseconds from episode start. Durations are measured
word-edge to word-edge (inter-sentence silence is not part of any duration),
which keeps range durations permutation-invariant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import IntegrityError, SchemaError, UnknownSentence

TimeMs = int

ROLES = ("host", "guest")


@dataclass(frozen=True)
class Word:
    text: str
    start: TimeMs
    end: TimeMs
    is_filler: bool = False

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Speaker:
    id: str
    display_name: str
    role: str  # "host" | "guest"


@dataclass(frozen=True)
class Sentence:
    id: int
    first_word: int  # index into the bundle word list
    last_word: int   # inclusive
    speaker_id: str


@dataclass
class AmplitudeEnvelope:
    """Uniform-period amplitude samples in [0, 1].

    Frame i covers [i*period, (i+1)*period); a frame belongs to an interval
    [start, end) iff its midpoint does. Midpoint comparisons are done in
    doubled integer units so odd periods stay exact.
    """

    frame_period_ms: int
    samples: tuple[float, ...]
    _prefix: tuple[float, ...] | None = field(default=None, repr=False, compare=False)

    def frame_range(self, start: TimeMs, end: TimeMs) -> tuple[int, int]:
        """Half-open frame index range whose midpoints fall in [start, end)."""
        p = self.frame_period_ms
        # start <= i*p + p/2  <=>  2*i*p >= 2*start - p
        lo = max(0, -(-(2 * start - p) // (2 * p)))
        # i*p + p/2 < end  <=>  2*i*p + p < 2*end  <=>  i < (2*end - p) / (2*p)
        hi = max(0, -(-(2 * end - p) // (2 * p)))
        n = len(self.samples)
        return min(lo, n), min(hi, n)

    def interval_sum(self, start: TimeMs, end: TimeMs) -> tuple[float, int]:
        """(sum of samples, frame count) over [start, end)."""
        if self._prefix is None:
            acc = [0.0]
            for s in self.samples:
                acc.append(acc[-1] + s)
            self._prefix = tuple(acc)
        lo, hi = self.frame_range(start, end)
        if hi <= lo:
            return 0.0, 0
        return self._prefix[hi] - self._prefix[lo], hi - lo


@dataclass(frozen=True)
class VisibilityInterval:
    person_id: str
    start: TimeMs
    end: TimeMs
    center_x: float | None = None  # normalized box center, when the detector provides one
    center_y: float | None = None


@dataclass
class FeatureBundle:
    media_ref: str
    duration_ms: TimeMs
    words: tuple[Word, ...]
    sentences: tuple[Sentence, ...]
    speakers: tuple[Speaker, ...]
    envelope: AmplitudeEnvelope
    visibility: tuple[VisibilityInterval, ...]

    def __post_init__(self) -> None:
        self._sentence_by_id = {s.id: s for s in self.sentences}
        self._position_by_id = {s.id: i for i, s in enumerate(self.sentences)}
        self._speaker_by_id = {s.id: s for s in self.speakers}

    # --- lookups ---

    def sentence(self, sentence_id: int) -> Sentence:
        try:
            return self._sentence_by_id[sentence_id]
        except KeyError:
            raise UnknownSentence(f"unknown sentence id {sentence_id}") from None

    def has_sentence(self, sentence_id: int) -> bool:
        return sentence_id in self._sentence_by_id

    def position(self, sentence_id: int) -> int:
        self.sentence(sentence_id)
        return self._position_by_id[sentence_id]

    def sentence_at(self, position: int) -> Sentence:
        return self.sentences[position]

    def speaker(self, speaker_id: str) -> Speaker:
        return self._speaker_by_id[speaker_id]

    def sentence_words(self, sentence_id: int) -> tuple[Word, ...]:
        s = self.sentence(sentence_id)
        return self.words[s.first_word : s.last_word + 1]

    def sentence_text(self, sentence_id: int) -> str:
        return " ".join(w.text for w in self.sentence_words(sentence_id))

    def sentence_span(self, sentence_id: int) -> tuple[TimeMs, TimeMs]:
        """[start of first word, end of last word] of the sentence."""
        words = self.sentence_words(sentence_id)
        return words[0].start, words[-1].end

    def sentence_role(self, sentence_id: int) -> str:
        return self.speaker(self.sentence(sentence_id).speaker_id).role

    def sentence_at_time(self, ts: TimeMs) -> Sentence | None:
        """The sentence actively spoken at source time ts, if any."""
        for s in self.sentences:
            start, end = self.words[s.first_word].start, self.words[s.last_word].end
            if start <= ts < end:
                return s
        return None

    def text(self) -> str:
        return " ".join(w.text for w in self.words)


# --- duration arithmetic ------------------------------------------------------

def sentence_duration(bundle: FeatureBundle, sentence_id: int) -> int:
    """End of last word minus start of first word, in ms."""
    start, end = bundle.sentence_span(sentence_id)
    return end - start


def range_duration(bundle: FeatureBundle, ids, exclude_fillers: bool = False) -> int:
    """Sum of per-sentence durations over ids (order-insensitive).

    With exclude_fillers, the summed duration of filler-flagged words inside
    those sentences is subtracted.
    """
    total = 0
    for sid in ids:
        total += sentence_duration(bundle, sid)
        if exclude_fillers:
            total -= sum(w.duration for w in bundle.sentence_words(sid) if w.is_filler)
    return total


# --- parsing ------------------------------------------------------------------

def _require(obj: dict, key: str, types, path: str):
    if key not in obj:
        raise SchemaError(f"{path}: missing required field '{key}'")
    value = obj[key]
    if not isinstance(value, types) or (types is int and isinstance(value, bool)):
        raise SchemaError(f"{path}.{key}: expected {getattr(types, '__name__', types)}, got {type(value).__name__}")
    return value


def _require_int(obj: dict, key: str, path: str) -> int:
    value = _require(obj, key, int, path)
    if isinstance(value, bool):
        raise SchemaError(f"{path}.{key}: expected int, got bool")
    return value


def _require_number(obj: dict, key: str, path: str) -> float:
    value = _require(obj, key, (int, float), path)
    if isinstance(value, bool):
        raise SchemaError(f"{path}.{key}: expected number, got bool")
    return float(value)


def parse_feature_bundle(document: bytes) -> FeatureBundle:
    """Parse and validate the bundle JSON document.

    Raises SchemaError for structural problems (missing field, wrong type,
    out-of-vocabulary enum) and IntegrityError for cross-field violations
    (non-monotonic times, dangling references, non-partitioning sentence
    spans). Every rejection names the offending field. Unknown fields are
    ignored.
    """
    try:
        doc = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("document: expected a JSON object at top level")

    media_ref = _require(doc, "media_ref", str, "document")
    duration_ms = _require_int(doc, "duration_ms", "document")
    if duration_ms < 0:
        raise IntegrityError("document.duration_ms: must be >= 0")

    raw_speakers = _require(doc, "speakers", list, "document")
    speakers = []
    seen_speaker_ids = set()
    for i, item in enumerate(raw_speakers):
        path = f"speakers[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(f"{path}: expected object")
        sid = _require(item, "id", str, path)
        name = _require(item, "name", str, path)
        role = _require(item, "role", str, path)
        if role not in ROLES:
            raise SchemaError(f"{path}.role: expected one of {ROLES}, got {role!r}")
        if sid in seen_speaker_ids:
            raise IntegrityError(f"{path}.id: duplicate speaker id {sid!r}")
        seen_speaker_ids.add(sid)
        speakers.append(Speaker(id=sid, display_name=name, role=role))
    if not speakers:
        raise IntegrityError("speakers: at least one speaker required")

    raw_words = _require(doc, "words", list, "document")
    words = []
    for i, item in enumerate(raw_words):
        path = f"words[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(f"{path}: expected object")
        wtext = _require(item, "text", str, path)
        start = _require_int(item, "start_ms", path)
        end = _require_int(item, "end_ms", path)
        filler = item.get("filler", False)
        if not isinstance(filler, bool):
            raise SchemaError(f"{path}.filler: expected bool")
        if not wtext:
            raise IntegrityError(f"{path}.text: must be non-empty")
        if start < 0:
            raise IntegrityError(f"{path}.start_ms: must be >= 0")
        if start > end:
            raise IntegrityError(f"{path}: start_ms {start} > end_ms {end}")
        if end > duration_ms:
            raise IntegrityError(f"{path}.end_ms: {end} exceeds episode duration {duration_ms}")
        if words and (start < words[-1].start or end < words[-1].end):
            raise IntegrityError(f"{path}: word timings must be non-decreasing across the word list")
        words.append(Word(text=wtext, start=start, end=end, is_filler=filler))

    raw_sentences = _require(doc, "sentences", list, "document")
    sentences = []
    for i, item in enumerate(raw_sentences):
        path = f"sentences[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(f"{path}: expected object")
        sid = _require_int(item, "id", path)
        first = _require_int(item, "first_word", path)
        last = _require_int(item, "last_word", path)
        speaker_id = _require(item, "speaker_id", str, path)
        if speaker_id not in seen_speaker_ids:
            raise IntegrityError(f"{path}.speaker_id: dangling speaker id {speaker_id!r}")
        if sentences and sid <= sentences[-1].id:
            raise IntegrityError(f"{path}.id: sentence ids must be strictly increasing")
        expected_first = sentences[-1].last_word + 1 if sentences else 0
        if first != expected_first:
            raise IntegrityError(
                f"{path}.first_word: sentence spans must partition the word list "
                f"(expected {expected_first}, got {first})"
            )
        if last < first:
            raise IntegrityError(f"{path}: last_word {last} < first_word {first}")
        if last >= len(words):
            raise IntegrityError(f"{path}.last_word: {last} out of range for {len(words)} words")
        sentences.append(Sentence(id=sid, first_word=first, last_word=last, speaker_id=speaker_id))
    if not sentences:
        raise IntegrityError("sentences: at least one sentence required")
    if sentences[-1].last_word != len(words) - 1:
        raise IntegrityError("sentences: spans must cover the whole word list")

    raw_env = _require(doc, "amplitude", dict, "document")
    frame_period = _require_int(raw_env, "frame_period_ms", "amplitude")
    if frame_period <= 0:
        raise IntegrityError("amplitude.frame_period_ms: must be > 0")
    raw_samples = _require(raw_env, "samples", list, "amplitude")
    samples = []
    for i, s in enumerate(raw_samples):
        if not isinstance(s, (int, float)) or isinstance(s, bool):
            raise SchemaError(f"amplitude.samples[{i}]: expected number")
        s = float(s)
        if not 0.0 <= s <= 1.0:
            raise IntegrityError(f"amplitude.samples[{i}]: {s} outside [0, 1]")
        samples.append(s)

    raw_vis = _require(doc, "visibility", list, "document")
    visibility = []
    for i, item in enumerate(raw_vis):
        path = f"visibility[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(f"{path}: expected object")
        pid = _require(item, "person_id", str, path)
        start = _require_int(item, "start_ms", path)
        end = _require_int(item, "end_ms", path)
        if pid not in seen_speaker_ids:
            raise IntegrityError(f"{path}.person_id: dangling speaker id {pid!r}")
        if start >= end:
            raise IntegrityError(f"{path}: start_ms must be < end_ms")
        cx = cy = None
        if "cx" in item:
            cx = _require_number(item, "cx", path)
        if "cy" in item:
            cy = _require_number(item, "cy", path)
        visibility.append(VisibilityInterval(person_id=pid, start=start, end=end, center_x=cx, center_y=cy))

    return FeatureBundle(
        media_ref=media_ref,
        duration_ms=duration_ms,
        words=tuple(words),
        sentences=tuple(sentences),
        speakers=tuple(speakers),
        envelope=AmplitudeEnvelope(frame_period_ms=frame_period, samples=tuple(samples)),
        visibility=tuple(visibility),
    )


def serialize_feature_bundle(bundle: FeatureBundle) -> bytes:
    """Inverse of parse_feature_bundle; parse(serialize(b)) == b."""
    doc = {
        "media_ref": bundle.media_ref,
        "duration_ms": bundle.duration_ms,
        "speakers": [
            {"id": s.id, "name": s.display_name, "role": s.role} for s in bundle.speakers
        ],
        "words": [
            {"text": w.text, "start_ms": w.start, "end_ms": w.end, "filler": w.is_filler}
            for w in bundle.words
        ],
        "sentences": [
            {"id": s.id, "first_word": s.first_word, "last_word": s.last_word, "speaker_id": s.speaker_id}
            for s in bundle.sentences
        ],
        "amplitude": {
            "frame_period_ms": bundle.envelope.frame_period_ms,
            "samples": list(bundle.envelope.samples),
        },
        "visibility": [
            {
                "person_id": v.person_id,
                "start_ms": v.start,
                "end_ms": v.end,
                **({"cx": v.center_x} if v.center_x is not None else {}),
                **({"cy": v.center_y} if v.center_y is not None else {}),
            }
            for v in bundle.visibility
        ],
    }
    return json.dumps(doc, indent=1).encode("utf-8")
