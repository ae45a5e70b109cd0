"""Edit-decision-list export, caption files, and the external-renderer script.

The EDL is canonical JSON (sorted keys, compact separators, floats rounded to
six decimals) so identical projects export byte-identical documents. The
render script is an ordered ffmpeg-style command plan; the engine itself
never decodes media."""

from __future__ import annotations

import json
import os
import shlex
from dataclasses import dataclass

from .errors import EmptyProject, IntegrityError, MissingAsset, SchemaError

EDL_VERSION = 1
MUSIC_GAIN_DB = -18.0     # advisory: constant music gain under speech
MUSIC_CROSSFADE_MS = 200  # advisory: renderer-side crossfade at music placement joins


@dataclass(frozen=True)
class RendererProfile:
    binary: str = "ffmpeg"
    output: str = "teaser.mp4"
    burn_captions: bool = False


def _round6(value: float) -> float:
    return round(float(value), 6)


def build_edl_doc(
    media_ref: str,
    cutlist,
    music_plan=None,
    caption_track=None,
    reframe_plan=None,
    logo=None,
) -> dict:
    video = [
        {
            "sentence_id": seg.sentence_id,
            "source_in_ms": seg.source_in,
            "source_out_ms": seg.source_out,
            "effects": [e.to_dict() for e in seg.effects],
        }
        for seg in cutlist.segments
    ]
    doc = {
        "version": EDL_VERSION,
        "media_ref": media_ref,
        "fillers_removed": cutlist.fillers_removed,
        "total_duration_ms": cutlist.duration_ms(),
        "video": video,
        "music": None,
        "captions": None,
        "reframe": None,
        "overlays": [],
    }
    if music_plan is not None:
        doc["music"] = {
            "style": music_plan.style,
            "track_id": music_plan.track_id,
            "audio_ref": music_plan.audio_ref,
            "gain_db": _round6(MUSIC_GAIN_DB),
            "crossfade_ms": MUSIC_CROSSFADE_MS,
            "peak_timeline_start_ms": music_plan.peak_timeline_start,
            "placements": [
                {
                    "kind": p.kind,
                    "source_in_ms": p.source_in,
                    "source_out_ms": p.source_out,
                    "timeline_start_ms": p.timeline_start,
                }
                for p in music_plan.placements
            ],
        }
    if caption_track is not None:
        doc["captions"] = {
            "style": caption_track.style,
            "cues": [
                {"start_ms": c.start_ms, "end_ms": c.end_ms, "text": c.text}
                for c in caption_track.cues
            ],
        }
    if reframe_plan is not None:
        doc["reframe"] = {
            "aspect": reframe_plan.aspect,
            "crop_width": _round6(reframe_plan.crop_width),
            "crop_height": _round6(reframe_plan.crop_height),
            "keyframes": [
                {
                    "timeline_ms": k.timeline_ms,
                    "center_x": _round6(k.center_x),
                    "center_y": _round6(k.center_y),
                }
                for k in reframe_plan.keyframes
            ],
        }
    if logo is not None:
        doc["overlays"] = [
            {
                "kind": "logo",
                "image_ref": logo.image_ref,
                "corner": logo.corner,
                "margin_px": logo.margin_px,
                "span": logo.span,
            }
        ]
    return doc


def canonical_bytes(doc: dict) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def export_edl(project) -> bytes:
    """Canonical EDL bytes for a project carrying a non-empty cut list."""
    if project.cutlist is None or not project.cutlist.segments:
        raise EmptyProject("project has no cut list to export")
    doc = build_edl_doc(
        media_ref=project.media_ref,
        cutlist=project.cutlist,
        music_plan=project.music_plan,
        caption_track=project.caption_track,
        reframe_plan=project.reframe_plan,
        logo=project.logo,
    )
    return canonical_bytes(doc)


def parse_edl(data: bytes) -> dict:
    """Validate an exported EDL document; export(parse(x)) round-trips."""
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"EDL is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("EDL: expected JSON object")
    for key in ("version", "media_ref", "total_duration_ms", "video"):
        if key not in doc:
            raise SchemaError(f"EDL: missing field {key!r}")
    if doc["version"] != EDL_VERSION:
        raise SchemaError(f"EDL: unsupported version {doc['version']!r}")
    total = 0
    for i, seg in enumerate(doc["video"]):
        if seg["source_in_ms"] >= seg["source_out_ms"]:
            raise IntegrityError(f"EDL video[{i}]: empty or inverted segment")
        total += seg["source_out_ms"] - seg["source_in_ms"]
    if total != doc["total_duration_ms"]:
        raise IntegrityError(
            f"EDL: total_duration_ms {doc['total_duration_ms']} != segment sum {total}"
        )
    return doc


# --- captions ---------------------------------------------------------------------

def _timestamp(ms: int, decimal_sep: str) -> str:
    hours, rem = divmod(ms, 3_600_000)
    minutes, rem = divmod(rem, 60_000)
    seconds, millis = divmod(rem, 1000)
    return f"{hours:02d}:{minutes:02d}:{seconds:02d}{decimal_sep}{millis:03d}"


def export_captions(track, fmt: str) -> bytes:
    """Render a caption track as SRT or VTT."""
    if fmt not in ("srt", "vtt"):
        raise ValueError(f"unsupported caption format {fmt!r}")
    lines: list[str] = []
    if fmt == "vtt":
        lines.append("WEBVTT")
        lines.append("")
    sep = "," if fmt == "srt" else "."
    for i, cue in enumerate(track.cues, start=1):
        lines.append(str(i))
        lines.append(f"{_timestamp(cue.start_ms, sep)} --> {_timestamp(cue.end_ms, sep)}")
        lines.append(cue.text)
        lines.append("")
    return ("\n".join(lines) + ("\n" if lines and lines[-1] != "" else "")).encode("utf-8")


# --- render script ------------------------------------------------------------------

def _fmt_s(ms: int) -> str:
    return f"{ms / 1000:.3f}"


def emit_render_script(project, profile: RendererProfile | None = None) -> str:
    """Ordered command plan for an external CLI renderer.

    Steps are labeled with "# step:<name>" markers: one trim per video
    segment, one concat, then optional crop (reframe), overlay steps
    (reactions, logo), one music mix with the gain hint, and caption
    burn-in or sidecar. Raises MissingAsset when a referenced music or logo
    file does not resolve on disk."""
    if project.cutlist is None or not project.cutlist.segments:
        raise EmptyProject("project has no cut list to render")
    profile = profile or RendererProfile()
    cutlist = project.cutlist
    bin_ = profile.binary

    if project.music_plan is not None and not os.path.exists(project.music_plan.audio_ref):
        raise MissingAsset(f"music file not found: {project.music_plan.audio_ref}")
    if project.logo is not None and not os.path.exists(project.logo.image_ref):
        raise MissingAsset(f"logo file not found: {project.logo.image_ref}")

    src = shlex.quote(project.media_ref)
    out = shlex.quote(profile.output)
    lines = [
        "#!/usr/bin/env bash",
        "# generated render plan; requires an ffmpeg-compatible renderer",
        "set -euo pipefail",
        f"SRC={src}",
        f"OUT={out}",
        'WORK="$(mktemp -d)"',
        'trap \'rm -rf "$WORK"\' EXIT',
    ]

    for i, seg in enumerate(cutlist.segments):
        lines.append(f"# step:trim segment {i} (sentence {seg.sentence_id})")
        lines.append(
            f'{bin_} -y -ss {_fmt_s(seg.source_in)} -to {_fmt_s(seg.source_out)} '
            f'-i "$SRC" -avoid_negative_ts make_zero "$WORK/seg{i:03d}.mp4"'
        )

    lines.append("# step:concat")
    lines.append(f'for f in "$WORK"/seg*.mp4; do echo "file \'$f\'" >> "$WORK/concat.txt"; done')
    lines.append(f'{bin_} -y -f concat -safe 0 -i "$WORK/concat.txt" -c copy "$WORK/cut.mp4"')
    current = "cut.mp4"

    if project.reframe_plan is not None:
        plan = project.reframe_plan
        kf = plan.keyframes[0] if plan.keyframes else None
        cx = kf.center_x if kf else 0.5
        crop = (
            f"crop=w=iw*{plan.crop_width:.6f}:h=ih*{plan.crop_height:.6f}:"
            f"x=iw*{max(0.0, cx - plan.crop_width / 2):.6f}:y=0"
        )
        lines.append(f"# step:crop reframe {plan.aspect}")
        lines.append(f'{bin_} -y -i "$WORK/{current}" -vf "{crop}" "$WORK/reframed.mp4"')
        current = "reframed.mp4"

    overlay_idx = 0
    timeline = 0
    for seg in cutlist.segments:
        for effect in seg.effects:
            if effect.kind == "reaction_shot":
                lines.append(f"# step:overlay reaction shot ({effect.person_id})")
                lines.append(
                    f'{bin_} -y -ss {_fmt_s(effect.source_in)} -to {_fmt_s(effect.source_out)} '
                    f'-i "$SRC" "$WORK/react{overlay_idx:02d}.mp4"'
                )
                lines.append(
                    f'{bin_} -y -i "$WORK/{current}" -i "$WORK/react{overlay_idx:02d}.mp4" '
                    f"-filter_complex \"[1:v]setpts=PTS-STARTPTS+{timeline / 1000:.3f}/TB[ov];"
                    f"[0:v][ov]overlay=eof_action=pass\" -map 0:a "
                    f'"$WORK/ovl{overlay_idx:02d}.mp4"'
                )
                current = f"ovl{overlay_idx:02d}.mp4"
                overlay_idx += 1
            elif effect.kind == "zoom":
                lines.append(f"# step:zoom scale {effect.scale}")
                lines.append(
                    f'{bin_} -y -i "$WORK/{current}" -vf '
                    f'"scale=iw*{effect.scale}:-2,crop=iw/{effect.scale}:ih/{effect.scale}" '
                    f'"$WORK/zoom{overlay_idx:02d}.mp4"'
                )
                current = f"zoom{overlay_idx:02d}.mp4"
                overlay_idx += 1
        timeline += seg.duration

    if project.logo is not None:
        lines.append(f"# step:overlay logo ({project.logo.corner})")
        logo_path = shlex.quote(project.logo.image_ref)
        lines.append(
            f'{bin_} -y -i "$WORK/{current}" -i {logo_path} '
            f'-filter_complex "overlay=W-w-{project.logo.margin_px}:H-h-{project.logo.margin_px}" '
            f'"$WORK/branded.mp4"'
        )
        current = "branded.mp4"

    if project.music_plan is not None:
        plan = project.music_plan
        music_path = shlex.quote(plan.audio_ref)
        concat_parts = []
        for p in plan.placements:
            concat_parts.append(
                f"atrim={p.source_in / 1000:.3f}:{p.source_out / 1000:.3f},asetpts=PTS-STARTPTS"
            )
        chains = ";".join(
            f"[1:a]{part}[m{i}]" for i, part in enumerate(concat_parts)
        )
        inputs = "".join(f"[m{i}]" for i in range(len(concat_parts)))
        lines.append(f"# step:mix-music style {plan.style} gain {MUSIC_GAIN_DB}dB crossfade {MUSIC_CROSSFADE_MS}ms")
        lines.append(
            f'{bin_} -y -i "$WORK/{current}" -i {music_path} -filter_complex '
            f'"{chains};{inputs}concat=n={len(concat_parts)}:v=0:a=1,volume={MUSIC_GAIN_DB}dB[mus];'
            f'[0:a][mus]amix=inputs=2:duration=first[aout]" '
            f'-map 0:v -map "[aout]" "$WORK/scored.mp4"'
        )
        current = "scored.mp4"

    if project.caption_track is not None:
        srt_text = export_captions(project.caption_track, "srt").decode("utf-8")
        lines.append("cat > \"$WORK/captions.srt\" <<'CAPTIONS_EOF'")
        lines.append(srt_text.rstrip("\n"))
        lines.append("CAPTIONS_EOF")
        if profile.burn_captions:
            lines.append("# step:captions burn-in")
            lines.append(
                f'{bin_} -y -i "$WORK/{current}" -vf "subtitles=$WORK/captions.srt" "$WORK/captioned.mp4"'
            )
            current = "captioned.mp4"
        else:
            lines.append("# step:captions sidecar")
            lines.append('cp "$WORK/captions.srt" "${OUT%.*}.srt"')

    lines.append("# step:finalize")
    lines.append(f'cp "$WORK/{current}" "$OUT"')
    return "\n".join(lines) + "\n"
