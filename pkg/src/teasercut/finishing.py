"""Finish-step planning: caption tracks, aspect-ratio reframe, logo overlay,
and the source-to-teaser timeline remap everything downstream relies on."""

from __future__ import annotations

from dataclasses import dataclass

from .bundle import FeatureBundle
from .errors import NotInCutlist, UnsupportedAspect
from .refine import CutList

ASPECT_RATIOS = {
    "vertical": 9 / 16,
    "square": 1.0,
    "horizontal": 16 / 9,
}
SOURCE_ASPECT = 16 / 9

CAPTION_WORDS_PER_CUE = {"standard": 5, "rapid": 2}

LOGO_CORNERS = ("top_left", "top_right", "bottom_left", "bottom_right")


@dataclass(frozen=True)
class Cue:
    start_ms: int  # teaser timeline
    end_ms: int
    text: str


@dataclass(frozen=True)
class CaptionTrack:
    style: str  # "standard" | "rapid"
    cues: tuple[Cue, ...]


@dataclass(frozen=True)
class ReframeKeyframe:
    timeline_ms: int
    center_x: float  # normalized crop-window center
    center_y: float


@dataclass(frozen=True)
class ReframePlan:
    aspect: str
    crop_width: float  # crop window size as a fraction of the source frame
    crop_height: float
    keyframes: tuple[ReframeKeyframe, ...]


@dataclass(frozen=True)
class LogoOverlay:
    image_ref: str
    corner: str = "bottom_right"
    margin_px: int = 24
    span: str = "full"  # "full" | "trailing_card"


# --- timeline remap -----------------------------------------------------------

def timeline_remap(cutlist: CutList, source_ts: int) -> int:
    """Source timestamp -> teaser timeline timestamp.

    The timestamp must fall inside some segment's [in, out); prior segment
    lengths plus the offset into the containing segment give the teaser time.
    """
    offset = 0
    for seg in cutlist.segments:
        if seg.source_in <= source_ts < seg.source_out:
            return offset + (source_ts - seg.source_in)
        offset += seg.duration
    raise NotInCutlist(f"source time {source_ts} not covered by any segment")


def timeline_unremap(cutlist: CutList, teaser_ts: int) -> int:
    """Inverse of timeline_remap over segment interiors."""
    offset = 0
    for seg in cutlist.segments:
        if offset <= teaser_ts < offset + seg.duration:
            return seg.source_in + (teaser_ts - offset)
        offset += seg.duration
    raise NotInCutlist(f"teaser time {teaser_ts} beyond cut-list duration")


# --- captions --------------------------------------------------------------------

def generate_captions(bundle: FeatureBundle, cutlist: CutList, style: str) -> CaptionTrack:
    """Greedy fixed-size word chunking: 5 words per cue (standard) or 2
    (rapid). Chunks never cross segment boundaries; cue times are the first
    and last word times remapped onto the teaser timeline."""
    per_cue = CAPTION_WORDS_PER_CUE[style]
    cues: list[Cue] = []
    timeline_offset = 0
    prev_end = 0
    for seg in cutlist.segments:
        words = [
            w
            for w in bundle.sentence_words(seg.sentence_id)
            if w.start >= seg.source_in and w.end <= seg.source_out
        ]
        for i in range(0, len(words), per_cue):
            chunk = words[i : i + per_cue]
            # overlapping word timings are legal in the bundle; keep cues monotone
            start = max(prev_end, timeline_offset + (chunk[0].start - seg.source_in))
            end = max(start, timeline_offset + (chunk[-1].end - seg.source_in))
            cues.append(Cue(start_ms=start, end_ms=end, text=" ".join(w.text for w in chunk)))
            prev_end = end
        timeline_offset += seg.duration
    return CaptionTrack(style=style, cues=tuple(cues))


# --- reframe ---------------------------------------------------------------------

def plan_reframe(
    bundle: FeatureBundle,
    cutlist: CutList,
    aspect: str,
    source_aspect: float = SOURCE_ASPECT,
) -> ReframePlan:
    """One keyframe per segment; the crop window centers on the active
    speaker's visibility box when the detector provided one, else the frame
    center, clamped so the window stays inside the frame."""
    target = ASPECT_RATIOS[aspect]
    if target > source_aspect + 1e-9:
        raise UnsupportedAspect(f"{aspect} ({target:.3f}) is wider than the source ({source_aspect:.3f})")
    crop_w = min(1.0, target / source_aspect)
    crop_h = 1.0

    keyframes: list[ReframeKeyframe] = []
    offset = 0
    for seg in cutlist.segments:
        speaker_id = bundle.sentence(seg.sentence_id).speaker_id
        weighted_x = weighted_y = weight = 0.0
        for interval in bundle.visibility:
            if interval.person_id != speaker_id or interval.center_x is None:
                continue
            overlap = min(interval.end, seg.source_out) - max(interval.start, seg.source_in)
            if overlap <= 0:
                continue
            weighted_x += interval.center_x * overlap
            weighted_y += (interval.center_y if interval.center_y is not None else 0.5) * overlap
            weight += overlap
        cx = weighted_x / weight if weight else 0.5
        cy = weighted_y / weight if weight else 0.5
        cx = min(max(cx, crop_w / 2), 1.0 - crop_w / 2)
        cy = min(max(cy, crop_h / 2), 1.0 - crop_h / 2)
        keyframes.append(ReframeKeyframe(timeline_ms=offset, center_x=round(cx, 6), center_y=round(cy, 6)))
        offset += seg.duration
    return ReframePlan(
        aspect=aspect,
        crop_width=round(crop_w, 6),
        crop_height=round(crop_h, 6),
        keyframes=tuple(keyframes),
    )
