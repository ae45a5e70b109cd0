"""Deterministic synthetic episode generator.

Produces feature bundles that look like a plausible two-person interview:
speaker runs of varying length, mixed short/long sentences, topic words with
skewed frequencies, filler words, a 50 ms amplitude envelope correlated with
per-sentence energy, and visibility intervals with optional box centers.
Same seed, same bundle."""

from __future__ import annotations

import random

from .bundle import (
    AmplitudeEnvelope,
    FeatureBundle,
    Sentence,
    Speaker,
    VisibilityInterval,
    Word,
)

ENVELOPE_PERIOD_MS = 50

_COMMON = (
    "the a and to of that you it in we was is for on they but have this with not "
    "are be at as do when what how there from or about me my so if then because "
    "people time way life work day year thing part point"
).split()

_TOPICS = (
    ["marathon"] * 9 + ["training"] * 8 + ["nutrition"] * 7 + ["recovery"] * 6
    + ["mindset"] * 5 + ["sleep"] * 5 + ["injury"] * 4 + ["coaching"] * 3
    + ["discipline"] * 2 + ["breathing"] * 2 + ["hydration"] + ["altitude"]
)

_STYLE_SPICE = {
    "informational": ["research", "study", "data", "evidence", "percent", "results"],
    "curiosity_arousing": ["secret", "surprising", "nobody", "hidden", "discover"],
    "funny": ["laugh", "joke", "hilarious", "ridiculous", "kidding"],
    "emotional": ["heart", "family", "proud", "grateful", "tears"],
}
_STYLE_END = {"informational": ".", "curiosity_arousing": "?", "funny": "!", "emotional": "."}
_STYLE_ENERGY = {"informational": 0.40, "curiosity_arousing": 0.55, "funny": 0.78, "emotional": 0.50}


def make_bundle(
    seed: int = 7,
    n_sentences: int = 200,
    hosts: int = 1,
    guests: int = 1,
    media_ref: str = "episode.mp4",
    long_form: bool = True,
) -> FeatureBundle:
    """Generate an episode. long_form sizes sentences for a ~60-minute show;
    otherwise sentences stay short (handy for small oracle instances)."""
    rng = random.Random(seed)
    speakers = tuple(
        [Speaker(id=f"h{i + 1}", display_name=f"Host {i + 1}", role="host") for i in range(hosts)]
        + [Speaker(id=f"g{i + 1}", display_name=f"Guest {i + 1}", role="guest") for i in range(guests)]
    )

    words: list[Word] = []
    sentences: list[Sentence] = []
    sentence_energy: list[float] = []
    cursor = rng.randint(200, 800)

    speaker_idx = rng.randrange(len(speakers))
    run_left = rng.randint(1, 6)

    for sid in range(n_sentences):
        if run_left == 0:
            next_idx = rng.randrange(len(speakers))
            if len(speakers) > 1:
                while next_idx == speaker_idx:
                    next_idx = rng.randrange(len(speakers))
            speaker_idx = next_idx
            run_left = rng.randint(1, 6)
        run_left -= 1
        speaker = speakers[speaker_idx]

        style = rng.choice(list(_STYLE_SPICE))
        if long_form:
            bucket = rng.random()
            if bucket < 0.30:
                count = rng.randint(8, 22)
            elif bucket < 0.70:
                count = rng.randint(28, 62)
            else:
                count = rng.randint(62, 105)
        else:
            count = rng.randint(4, 12)

        first_word_index = len(words)
        texts: list[str] = []
        for _ in range(count):
            roll = rng.random()
            if roll < 0.12:
                texts.append(rng.choice(_TOPICS))
            elif roll < 0.18:
                texts.append(rng.choice(_STYLE_SPICE[style]))
            else:
                texts.append(rng.choice(_COMMON))
        texts[-1] += _STYLE_END[style]

        for i, text in enumerate(texts):
            is_filler = rng.random() < 0.05
            if is_filler:
                text = rng.choice(["um", "uh"])
            dur = rng.randint(120, 250) if is_filler else rng.randint(180, 420)
            start = cursor
            end = start + dur
            words.append(Word(text=text, start=start, end=end, is_filler=is_filler))
            cursor = end + (rng.randint(20, 120) if i < len(texts) - 1 else 0)

        sentences.append(
            Sentence(
                id=sid,
                first_word=first_word_index,
                last_word=len(words) - 1,
                speaker_id=speaker.id,
            )
        )
        base = _STYLE_ENERGY[style] + rng.gauss(0, 0.12)
        sentence_energy.append(min(0.95, max(0.05, base)))
        cursor += rng.randint(200, 1200)

    duration_ms = words[-1].end + rng.randint(500, 2000)

    n_frames = duration_ms // ENVELOPE_PERIOD_MS
    spans = [
        (words[s.first_word].start, words[s.last_word].end, sentence_energy[i])
        for i, s in enumerate(sentences)
    ]
    samples: list[float] = []
    span_i = 0
    for frame in range(n_frames):
        mid = frame * ENVELOPE_PERIOD_MS + ENVELOPE_PERIOD_MS / 2
        while span_i < len(spans) and spans[span_i][1] <= mid:
            span_i += 1
        if span_i < len(spans) and spans[span_i][0] <= mid < spans[span_i][1]:
            value = spans[span_i][2] + rng.uniform(-0.08, 0.08)
        else:
            value = rng.uniform(0.0, 0.06)
        samples.append(min(1.0, max(0.0, round(value, 4))))

    visibility: list[VisibilityInterval] = []
    for speaker in speakers:
        t = rng.randint(0, 4000)
        while t < duration_ms - 2000:
            length = rng.randint(4000, 25000)
            end = min(t + length, duration_ms)
            if rng.random() < 0.8:
                visibility.append(
                    VisibilityInterval(
                        person_id=speaker.id,
                        start=t,
                        end=end,
                        center_x=round(rng.uniform(0.2, 0.8), 3) if rng.random() < 0.8 else None,
                        center_y=round(rng.uniform(0.35, 0.65), 3) if rng.random() < 0.6 else None,
                    )
                )
            t = end + rng.randint(1000, 15000)
    visibility.sort(key=lambda v: (v.start, v.person_id))

    return FeatureBundle(
        media_ref=media_ref,
        duration_ms=duration_ms,
        words=tuple(words),
        sentences=tuple(sentences),
        speakers=speakers,
        envelope=AmplitudeEnvelope(frame_period_ms=ENVELOPE_PERIOD_MS, samples=tuple(samples)),
        visibility=tuple(visibility),
    )
