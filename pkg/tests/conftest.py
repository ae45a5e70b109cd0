import json

import pytest

from teasercut.bundle import (
    AmplitudeEnvelope,
    FeatureBundle,
    Sentence,
    Speaker,
    VisibilityInterval,
    Word,
)
from teasercut.synth import make_bundle


def build_bundle(
    sentence_specs,
    speakers=(("h1", "host"), ("g1", "guest")),
    envelope=(50, None),
    visibility=(),
    duration_ms=None,
    media_ref="episode.mp4",
):
    """Hand-build a bundle from explicit word timings.

    sentence_specs: list of (speaker_id, [(text, start, end, is_filler?), ...])
    envelope: (frame_period_ms, samples or None for a flat 0.5 envelope)
    """
    words, sentences = [], []
    for sid, (speaker_id, word_specs) in enumerate(sentence_specs):
        first = len(words)
        for spec in word_specs:
            text, start, end = spec[0], spec[1], spec[2]
            filler = bool(spec[3]) if len(spec) > 3 else False
            words.append(Word(text=text, start=start, end=end, is_filler=filler))
        sentences.append(
            Sentence(id=sid, first_word=first, last_word=len(words) - 1, speaker_id=speaker_id)
        )
    if duration_ms is None:
        duration_ms = words[-1].end + 1000
    period, samples = envelope
    if samples is None:
        samples = [0.5] * (duration_ms // period)
    return FeatureBundle(
        media_ref=media_ref,
        duration_ms=duration_ms,
        words=tuple(words),
        sentences=tuple(sentences),
        speakers=tuple(Speaker(id=i, display_name=i.upper(), role=r) for i, r in speakers),
        envelope=AmplitudeEnvelope(frame_period_ms=period, samples=tuple(samples)),
        visibility=tuple(
            VisibilityInterval(person_id=p, start=a, end=b, center_x=cx, center_y=cy)
            for (p, a, b, cx, cy) in visibility
        ),
    )


def bundle_doc(**overrides):
    """A minimal valid bundle JSON document as a dict (tests tweak and break it)."""
    doc = {
        "media_ref": "ep.mp4",
        "duration_ms": 2000,
        "speakers": [{"id": "g1", "name": "Guest", "role": "guest"}],
        "words": [
            {"text": "hello", "start_ms": 0, "end_ms": 500},
            {"text": "world", "start_ms": 500, "end_ms": 900, "filler": False},
        ],
        "sentences": [{"id": 0, "first_word": 0, "last_word": 1, "speaker_id": "g1"}],
        "amplitude": {"frame_period_ms": 50, "samples": [0.5] * 40},
        "visibility": [],
    }
    doc.update(overrides)
    return doc


def doc_bytes(doc) -> bytes:
    return json.dumps(doc).encode("utf-8")


@pytest.fixture(scope="session")
def long_bundle():
    """The 200-sentence, ~60-minute synthetic episode."""
    return make_bundle(seed=7, n_sentences=200)


@pytest.fixture(scope="session")
def small_bundle():
    """A short episode sized for exhaustive window oracles (<= 60 sentences)."""
    return make_bundle(seed=11, n_sentences=24, long_form=False)
