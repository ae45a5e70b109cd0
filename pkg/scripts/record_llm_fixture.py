#!/usr/bin/env python3
"""Capture the recorded completion conversation used by the replay tests.

Renders the real prompts for a fixed small episode and freezes a reply for
each, keyed by the prompt's SHA-256. Replies are written the way a chat model
actually answers (prose around the payload), so the parsers get exercised on
realistic material. Re-run only when the prompt templates change, then update
the expectations in tests that consume the fixture."""

import hashlib
import json
from pathlib import Path

from teasercut import llm
from teasercut.extract import MomentQuery
from teasercut.synth import make_bundle

REPLIES = {
    "extract": "Here are three options that fit your criteria:\n[2, 3], [5, 6, 7], [9, 10]",
    "keywords": "1. marathon\n2. training\n3. nutrition\n4. recovery\n5. mindset\n6. sleep",
    "tagline": '"Chasing the wall: what marathon pain teaches"',
    "emphasis": "The emphasis should be sentence 6.",
}


def main() -> None:
    bundle = make_bundle(seed=42, n_sentences=12, long_form=False)
    query = MomentQuery(target_length_s=30, speakers="both", style="informational",
                        keywords=("marathon",))
    clip_ids = [5, 6, 7]

    prompts = {
        "extract": llm.render_extract_prompt(bundle, query),
        "keywords": llm.render_keywords_prompt(bundle),
        "tagline": llm.render_tagline_prompt(
            " ".join(bundle.sentence_text(sid) for sid in clip_ids)
        ),
        "emphasis": llm.render_emphasis_prompt(bundle, clip_ids),
    }
    records = [
        {
            "name": name,
            "prompt_sha256": hashlib.sha256(prompt.encode("utf-8")).hexdigest(),
            "reply": REPLIES[name],
        }
        for name, prompt in prompts.items()
    ]
    out = Path(__file__).resolve().parent.parent / "tests" / "data" / "recorded_llm.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(records)} exchanges)")


if __name__ == "__main__":
    main()
