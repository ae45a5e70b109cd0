#!/usr/bin/env python3
"""Regenerate the bundled music library: one short synthesized track per
style plus the manifest describing its regular/peak segmentation.

The engine never decodes these files; they exist so render scripts have a
resolvable asset to reference and so the library layout is realistic."""

import json
import math
import struct
import wave
from pathlib import Path

RATE = 8000
STYLE_TONES = {
    "inspirational": (262, 392),   # C4 / G4
    "emotional": (220, 330),       # A3 / E4
    "uplifting": (294, 440),       # D4 / A4
    "light_hearted": (330, 494),   # E4 / B4
}
REGULAR_SEGMENTS = [(0, 3000), (3000, 6000)]
PEAK_SEGMENT = (6000, 10000)
TOTAL_MS = 10000


def synth(path: Path, base_hz: float, peak_hz: float) -> None:
    frames = bytearray()
    for i in range(int(RATE * TOTAL_MS / 1000)):
        t = i / RATE
        in_peak = t * 1000 >= PEAK_SEGMENT[0]
        hz = peak_hz if in_peak else base_hz
        amp = 0.5 if in_peak else 0.3
        envelope = 0.7 + 0.3 * math.sin(2 * math.pi * 0.5 * t)
        value = amp * envelope * math.sin(2 * math.pi * hz * t)
        frames += struct.pack("<h", int(value * 32767))
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(RATE)
        fh.writeframes(bytes(frames))


def main() -> None:
    data_dir = Path(__file__).resolve().parent.parent / "src" / "teasercut" / "data"
    music_dir = data_dir / "music"
    music_dir.mkdir(parents=True, exist_ok=True)

    tracks = []
    for style, (base_hz, peak_hz) in STYLE_TONES.items():
        filename = f"{style}.wav"
        synth(music_dir / filename, base_hz, peak_hz)
        tracks.append(
            {
                "track_id": f"{style}-01",
                "style": style,
                "audio_ref": f"music/{filename}",
                "segments": [
                    *(
                        {"kind": "regular", "start_ms": a, "end_ms": b}
                        for a, b in REGULAR_SEGMENTS
                    ),
                    {"kind": "peak", "start_ms": PEAK_SEGMENT[0], "end_ms": PEAK_SEGMENT[1]},
                ],
            }
        )

    manifest = {"tracks": tracks}
    (data_dir / "music_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(tracks)} tracks to {music_dir}")


if __name__ == "__main__":
    main()
