"""Transition planning and music layout.

Jump cuts are boundaries where the same speaker continues but the source
material does not: reordered material, skipped sentences, or removed filler
words all leave a visible seam. Two hiding effects are planned here (zoom
punch-in on the post-cut segment, video-only reaction-shot overlay), plus
the emphasis pick and the peak-aligned music timeline."""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, replace
from functools import lru_cache

from . import llm
from .bundle import FeatureBundle
from .errors import (
    EffectAlreadyPresent,
    EffectNotPresent,
    EmptyTrack,
    GatewayError,
    NoReactionAvailable,
    NotAJumpCut,
    SchemaError,
)
from .refine import CutList

log = logging.getLogger("teasercut.production")

DEFAULT_ZOOM_SCALE = 1.15
MAX_REACTION_OVERLAY_MS = 1500

MUSIC_STYLES = ("inspirational", "emotional", "uplifting", "light_hearted")


# --- effects ------------------------------------------------------------------

@dataclass(frozen=True)
class ZoomEffect:
    scale: float = DEFAULT_ZOOM_SCALE

    kind = "zoom"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "scale": self.scale}


@dataclass(frozen=True)
class ReactionShotEffect:
    """Video-only overlay drawn from visibility data; underlying audio untouched."""

    person_id: str
    source_in: int
    source_out: int
    overlay_duration_ms: int

    kind = "reaction_shot"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "person_id": self.person_id,
            "source_in_ms": self.source_in,
            "source_out_ms": self.source_out,
            "overlay_duration_ms": self.overlay_duration_ms,
        }


def effect_from_dict(data: dict):
    kind = data.get("kind")
    if kind == "zoom":
        return ZoomEffect(scale=data["scale"])
    if kind == "reaction_shot":
        return ReactionShotEffect(
            person_id=data["person_id"],
            source_in=data["source_in_ms"],
            source_out=data["source_out_ms"],
            overlay_duration_ms=data["overlay_duration_ms"],
        )
    raise SchemaError(f"unknown effect kind {kind!r}")


@dataclass(frozen=True)
class JumpCut:
    boundary_index: int  # between segments boundary_index and boundary_index + 1
    speaker_id: str


# --- jump cuts ------------------------------------------------------------------

def _gap_has_words(bundle: FeatureBundle, gap_start: int, gap_end: int) -> bool:
    for w in bundle.words:
        if max(w.start, gap_start) < min(w.end, gap_end):
            return True
    return False


def detect_jump_cuts(bundle: FeatureBundle, cutlist: CutList) -> list[JumpCut]:
    """Boundaries where adjacent segments share a speaker but are not
    source-contiguous.

    Source-contiguous means the skipped source material (if any) between
    source_out(i) and source_in(i+1) is pure silence: no reordering and no
    word — filler or otherwise — inside the gap. Natural inter-sentence
    silence between adjacent sentences therefore does not count as a jump
    cut, while a removed junction filler does."""
    cuts: list[JumpCut] = []
    for i in range(len(cutlist.segments) - 1):
        a, b = cutlist.segments[i], cutlist.segments[i + 1]
        speaker_a = bundle.sentence(a.sentence_id).speaker_id
        speaker_b = bundle.sentence(b.sentence_id).speaker_id
        if speaker_a != speaker_b:
            continue
        if b.source_in >= a.source_out and not _gap_has_words(bundle, a.source_out, b.source_in):
            continue
        cuts.append(JumpCut(boundary_index=i, speaker_id=speaker_a))
    return cuts


def _require_jump_cut(bundle: FeatureBundle, cutlist: CutList, boundary_index: int) -> JumpCut:
    for cut in detect_jump_cuts(bundle, cutlist):
        if cut.boundary_index == boundary_index:
            return cut
    raise NotAJumpCut(f"boundary {boundary_index} is not a jump cut")


def plan_zoom(
    bundle: FeatureBundle, cutlist: CutList, boundary_index: int, scale: float = DEFAULT_ZOOM_SCALE
) -> CutList:
    """Attach a zoom punch-in to the post-cut segment. Pure: returns a new cut list."""
    _require_jump_cut(bundle, cutlist, boundary_index)
    target = cutlist.segments[boundary_index + 1]
    if any(isinstance(e, ZoomEffect) for e in target.effects):
        raise EffectAlreadyPresent(f"segment {boundary_index + 1} already zoomed")
    segments = list(cutlist.segments)
    segments[boundary_index + 1] = target.with_effects(target.effects + (ZoomEffect(scale=scale),))
    return replace(cutlist, segments=tuple(segments))


def remove_effect(cutlist: CutList, boundary_index: int, kind: str) -> CutList:
    """Inverse of plan_zoom / attach_reaction_shot for the given effect kind."""
    if boundary_index + 1 >= len(cutlist.segments):
        raise EffectNotPresent(f"no segment after boundary {boundary_index}")
    target = cutlist.segments[boundary_index + 1]
    kept = tuple(e for e in target.effects if e.kind != kind)
    if len(kept) == len(target.effects):
        raise EffectNotPresent(f"no {kind} effect at boundary {boundary_index}")
    segments = list(cutlist.segments)
    segments[boundary_index + 1] = target.with_effects(kept)
    return replace(cutlist, segments=tuple(segments))


def find_reaction_shot(
    bundle: FeatureBundle, jump_cut: JumpCut, boundary_source_time: int
) -> ReactionShotEffect:
    """Nearest-midpoint visibility interval showing someone other than the
    person speaking at that point of the source."""
    candidates = []
    for interval in bundle.visibility:
        overlaps_other_speech = False
        for s in bundle.sentences:
            if s.speaker_id == interval.person_id:
                continue
            s_start = bundle.words[s.first_word].start
            s_end = bundle.words[s.last_word].end
            if max(s_start, interval.start) < min(s_end, interval.end):
                overlaps_other_speech = True
                break
        if overlaps_other_speech:
            midpoint = (interval.start + interval.end) // 2
            candidates.append((abs(midpoint - boundary_source_time), midpoint, interval))
    if not candidates:
        raise NoReactionAvailable("no visibility interval overlaps another speaker's speech")
    candidates.sort(key=lambda c: (c[0], c[2].start, c[2].person_id))
    _, midpoint, interval = candidates[0]
    overlay = min(MAX_REACTION_OVERLAY_MS, interval.end - interval.start)
    half = overlay // 2
    src_in = max(interval.start, midpoint - half)
    src_out = src_in + overlay
    if src_out > interval.end:
        src_out = interval.end
        src_in = src_out - overlay
    return ReactionShotEffect(
        person_id=interval.person_id,
        source_in=src_in,
        source_out=src_out,
        overlay_duration_ms=overlay,
    )


def attach_reaction_shot(bundle: FeatureBundle, cutlist: CutList, boundary_index: int) -> CutList:
    """Find the nearest reaction shot for a jump cut and attach it to the
    post-cut segment as a video-only overlay."""
    cut = _require_jump_cut(bundle, cutlist, boundary_index)
    target = cutlist.segments[boundary_index + 1]
    if any(isinstance(e, ReactionShotEffect) for e in target.effects):
        raise EffectAlreadyPresent(f"segment {boundary_index + 1} already has a reaction shot")
    boundary_time = cutlist.segments[boundary_index].source_out
    shot = find_reaction_shot(bundle, cut, boundary_time)
    segments = list(cutlist.segments)
    segments[boundary_index + 1] = target.with_effects(target.effects + (shot,))
    return replace(cutlist, segments=tuple(segments))


# --- emphasis ---------------------------------------------------------------------

@dataclass(frozen=True)
class EmphasisChoice:
    sentence_id: int
    source: str  # "llm" | "heuristic"
    degraded: bool = False


def sentence_liveliness(bundle: FeatureBundle, sentence_id: int) -> float:
    start, end = bundle.sentence_span(sentence_id)
    total, count = bundle.envelope.interval_sum(start, end)
    return total / count if count else 0.0


def detect_emphasis(bundle: FeatureBundle, cutlist: CutList, backend=None) -> EmphasisChoice:
    """Pick the sentence the music peak should land on.

    With a remote backend the emphasis prompt is asked and parsed against the
    cut-list sentence ids; gateway failures fall back to the heuristic with a
    degraded flag. The heuristic (and the offline mock) picks the sentence
    with maximal liveliness, ties to the later sentence in cut order."""
    ids = cutlist.sentence_ids()
    if backend is not None and getattr(backend, "kind", "mock") == "remote":
        try:
            reply = llm.complete(backend, llm.render_emphasis_prompt(bundle, ids))
            chosen = llm.parse_single_sentence_id(reply, ids)
            return EmphasisChoice(sentence_id=chosen, source="llm")
        except GatewayError as exc:
            log.warning("emphasis detection degraded to heuristic: %s", exc)
            best = _liveliness_argmax(bundle, ids)
            return EmphasisChoice(sentence_id=best, source="heuristic", degraded=True)
    return EmphasisChoice(sentence_id=_liveliness_argmax(bundle, ids), source="heuristic")


def _liveliness_argmax(bundle: FeatureBundle, ids) -> int:
    best_id = ids[0]
    best = sentence_liveliness(bundle, ids[0])
    for sid in ids[1:]:
        value = sentence_liveliness(bundle, sid)
        if value >= best:
            best, best_id = value, sid
    return best_id


# --- music ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MusicSegment:
    kind: str  # "regular" | "peak"
    start_ms: int
    end_ms: int


@dataclass(frozen=True)
class MusicTrackMeta:
    track_id: str
    style: str
    audio_ref: str
    segments: tuple[MusicSegment, ...]

    def peak(self) -> MusicSegment:
        return next(s for s in self.segments if s.kind == "peak")

    def regulars(self) -> tuple[MusicSegment, ...]:
        return tuple(s for s in self.segments if s.kind == "regular")


@dataclass(frozen=True)
class MusicPlacement:
    kind: str
    source_in: int
    source_out: int
    timeline_start: int

    @property
    def duration(self) -> int:
        return self.source_out - self.source_in


@dataclass(frozen=True)
class MusicPlan:
    style: str
    track_id: str
    audio_ref: str
    placements: tuple[MusicPlacement, ...]
    peak_timeline_start: int


def lay_music(track: MusicTrackMeta, teaser_duration_ms: int, emphasis_timeline_ms: int) -> MusicPlan:
    """Tile regular patterns over the teaser and land the peak on the emphasis.

    The peak onset is the emphasis timestamp, clamped back so the whole peak
    fits before the teaser end (trimmed only when the peak alone is longer
    than the teaser). Regular segments loop as one continuous stream that
    pauses for the peak, so placements cover [0, teaser_duration) exactly."""
    if teaser_duration_ms <= 0:
        raise ValueError("teaser duration must be positive")
    if not 0 <= emphasis_timeline_ms < teaser_duration_ms:
        raise ValueError("emphasis timestamp must fall inside the teaser")
    peak = track.peak()
    peak_len = peak.end_ms - peak.start_ms
    if peak_len <= 0:
        raise EmptyTrack(f"track {track.track_id} has an empty peak segment")
    onset = max(0, min(emphasis_timeline_ms, teaser_duration_ms - peak_len))
    peak_out = min(onset + peak_len, teaser_duration_ms)

    regulars = [s for s in track.regulars() if s.end_ms > s.start_ms]
    placements: list[MusicPlacement] = []
    if (onset > 0 or peak_out < teaser_duration_ms) and not regulars:
        raise EmptyTrack(f"track {track.track_id} has no regular segments to tile with")

    reg_index = 0
    reg_offset = 0

    def fill(timeline_from: int, timeline_to: int) -> None:
        nonlocal reg_index, reg_offset
        cursor = timeline_from
        while cursor < timeline_to:
            seg = regulars[reg_index]
            available = (seg.end_ms - seg.start_ms) - reg_offset
            take = min(available, timeline_to - cursor)
            placements.append(
                MusicPlacement(
                    kind="regular",
                    source_in=seg.start_ms + reg_offset,
                    source_out=seg.start_ms + reg_offset + take,
                    timeline_start=cursor,
                )
            )
            cursor += take
            reg_offset += take
            if reg_offset >= seg.end_ms - seg.start_ms:
                reg_index = (reg_index + 1) % len(regulars)
                reg_offset = 0

    fill(0, onset)
    placements.append(
        MusicPlacement(
            kind="peak",
            source_in=peak.start_ms,
            source_out=peak.start_ms + (peak_out - onset),
            timeline_start=onset,
        )
    )
    fill(peak_out, teaser_duration_ms)

    return MusicPlan(
        style=track.style,
        track_id=track.track_id,
        audio_ref=track.audio_ref,
        placements=tuple(placements),
        peak_timeline_start=onset,
    )


# --- music library -----------------------------------------------------------------------

def _parse_manifest(doc: dict, base_dir: str) -> dict[str, MusicTrackMeta]:
    tracks: dict[str, MusicTrackMeta] = {}
    for i, item in enumerate(doc.get("tracks", [])):
        path = f"tracks[{i}]"
        try:
            segments = tuple(
                MusicSegment(kind=s["kind"], start_ms=s["start_ms"], end_ms=s["end_ms"])
                for s in item["segments"]
            )
            meta = MusicTrackMeta(
                track_id=item["track_id"],
                style=item["style"],
                audio_ref=os.path.join(base_dir, item["audio_ref"])
                if not os.path.isabs(item["audio_ref"])
                else item["audio_ref"],
                segments=segments,
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"{path}: malformed track entry: {exc}") from exc
        if meta.style not in MUSIC_STYLES:
            raise SchemaError(f"{path}.style: unknown style {meta.style!r}")
        peaks = [s for s in segments if s.kind == "peak"]
        if len(peaks) != 1:
            raise SchemaError(f"{path}: track must have exactly one peak segment")
        spans = sorted((s.start_ms, s.end_ms) for s in segments)
        for (a1, a2), (b1, b2) in zip(spans, spans[1:]):
            if b1 < a2:
                raise SchemaError(f"{path}: segments overlap")
        tracks[meta.style] = meta
    return tracks


_DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


@lru_cache(maxsize=4)
def load_music_manifest(path: str | None = None) -> dict[str, MusicTrackMeta]:
    """Style -> track map. Resolution order: explicit path, MUSIC_MANIFEST env
    var, the bundled library (one track per style). Relative audio_refs
    resolve against the manifest's directory."""
    path = path or os.environ.get("MUSIC_MANIFEST") or os.path.join(_DATA_DIR, "music_manifest.json")
    with open(path, "rb") as fh:
        return _parse_manifest(json.load(fh), os.path.dirname(os.path.abspath(path)))
