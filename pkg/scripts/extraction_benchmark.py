#!/usr/bin/env python3
"""Benchmark the heuristic moment search over randomized queries.

Reports per-query latency, how often the near-target duration guarantee was
exercised, and the speaker-filter violation count (expected: zero)."""

import argparse
import random
import statistics
import time

from teasercut.extract import MomentQuery, extract_moments
from teasercut.synth import make_bundle

STYLES = ("informational", "curiosity_arousing", "funny", "emotional")
SPEAKERS = ("host_only", "guest_only", "both")
KEYWORD_POOL = ["marathon", "training", "sleep", "nutrition", "recovery", "mindset"]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--queries", type=int, default=200)
    parser.add_argument("--sentences", type=int, default=200)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    bundle = make_bundle(seed=args.seed, n_sentences=args.sentences)
    rng = random.Random(args.seed * 13 + 1)

    latencies = []
    violations = 0
    near_target = 0
    short_results = 0
    for _ in range(args.queries):
        query = MomentQuery(
            target_length_s=rng.choice((15, 30, 45)),
            speakers=rng.choice(SPEAKERS),
            style=rng.choice(STYLES),
            keywords=tuple(rng.sample(KEYWORD_POOL, rng.randint(0, 3))),
        )
        started = time.perf_counter()
        result = extract_moments(bundle, query, None)
        latencies.append(time.perf_counter() - started)

        if len(result.moments) < 3:
            short_results += 1
        for m in result.moments:
            if query.speakers in ("host_only", "guest_only"):
                want = "host" if query.speakers == "host_only" else "guest"
                if any(bundle.sentence_role(s) != want for s in m.sentence_ids(bundle)):
                    violations += 1
            if abs(m.duration_ms - query.target_ms) <= 5000:
                near_target += 1

    total_moments = args.queries * 3 - short_results
    print(f"bundle: {len(bundle.sentences)} sentences, {bundle.duration_ms / 60000:.1f} min")
    print(f"queries: {args.queries}")
    print(f"latency: mean {statistics.mean(latencies) * 1000:.1f}ms, "
          f"p95 {sorted(latencies)[int(len(latencies) * 0.95)] * 1000:.1f}ms, "
          f"max {max(latencies) * 1000:.1f}ms")
    print(f"speaker-filter violations: {violations}")
    print(f"moments within +/-5s of target: {near_target}/{total_moments}")
    print(f"queries with fewer than three candidates: {short_results}")


if __name__ == "__main__":
    main()
