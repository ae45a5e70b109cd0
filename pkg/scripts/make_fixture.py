#!/usr/bin/env python3
"""Write a synthetic episode feature bundle to disk.

Handy for driving the CLI or the service without running any ML ingestion:

    python scripts/make_fixture.py --out episode_bundle.json
    teasercut ingest episode_bundle.json --project ./work
"""

import argparse

from teasercut.bundle import serialize_feature_bundle
from teasercut.synth import make_bundle


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="episode_bundle.json")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--sentences", type=int, default=200)
    parser.add_argument("--hosts", type=int, default=1)
    parser.add_argument("--guests", type=int, default=1)
    parser.add_argument("--short", action="store_true",
                        help="short sentences (small episode for quick experiments)")
    args = parser.parse_args()

    bundle = make_bundle(
        seed=args.seed,
        n_sentences=args.sentences,
        hosts=args.hosts,
        guests=args.guests,
        long_form=not args.short,
    )
    with open(args.out, "wb") as fh:
        fh.write(serialize_feature_bundle(bundle))
    print(
        f"wrote {args.out}: {len(bundle.sentences)} sentences, "
        f"{len(bundle.words)} words, {bundle.duration_ms / 60000:.1f} min"
    )


if __name__ == "__main__":
    main()
